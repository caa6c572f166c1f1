#include "viaduct/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "viaduct/journey.hpp"
#include "viaduct/oracle.hpp"
#include "viaduct/regulator.hpp"
#include "viaduct/scenario.hpp"
#include "viaduct/solver.hpp"

namespace viaduct::cli {

namespace fs = std::filesystem;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::budget:
      return Exit::budget;
    case ErrorKind::not_in_kernel:
    case ErrorKind::synthesis_failure:
    case ErrorKind::unverified:
      return Exit::synthesis;
    case ErrorKind::io:
      return Exit::io;
    default:
      return Exit::validation;
  }
}

namespace {

struct Options {
  std::string scenario;
  std::string kernel;
  std::string feedback;
  std::string out = ".";
  std::string oracle;
  std::size_t horizon = 8;
  unsigned threads = 0;
  std::vector<double> states;
};

Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.threads != 0) s.solver.threads = o.threads;
  return s;
}

std::pair<TrafficState, TrafficState> parse_states(const Scenario& s, const std::vector<double>& v) {
  const std::size_t p = s.grid->p_dim(), m = s.grid->m_dim(), w = 2 + p + m;
  if (v.size() != 2 * w)
    throw CLI::ValidationError("states", "expected " + std::to_string(2 * w) +
                                             " numbers: t d p.. x.. for departure, then arrival");
  auto take = [&](std::size_t off) {
    TrafficState st;
    st.t = v[off];
    st.d = v[off + 1];
    st.p.assign(v.begin() + std::ptrdiff_t(off + 2), v.begin() + std::ptrdiff_t(off + 2 + p));
    st.x.assign(v.begin() + std::ptrdiff_t(off + 2 + p), v.begin() + std::ptrdiff_t(off + w));
    st.validate(p, m);
    return st;
  };
  return {take(0), take(w)};
}

KernelResult kernel_for(const Options& o, const Scenario& s) {
  if (o.kernel.empty()) return solve(s);
  KernelResult k = read_kernel(o.kernel);
  if (!(*k.traffic == *s.grid)) throw Error(ErrorKind::scenario_mismatch, "kernel grid differs from the scenario grid");
  return k;
}

std::pair<FeedbackMap, FeedbackMap> feedback_for(const Options& o, const Scenario& s, const KernelResult& k) {
  if (o.feedback.empty()) return extract_regulators(s, k);
  const fs::path d(o.feedback);
  return {load_feedback((d / "feedback_in.txt").string(), s), load_feedback((d / "feedback_ou.txt").string(), s)};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path.string());
  os << text;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const KernelResult k = solve(s);
  write_kernel(o.out, k);
  out << "mode " << to_string(k.mode) << "\niterations " << k.iterations << "\nfixed_point_reached "
      << (k.fixed_point_reached ? "true" : "false") << '\n';
  if (k.mode == Mode::product)
    out << "cells_in " << k.basin_in.count() << "\ncells_ou " << k.basin_ou.count() << '\n';
  else
    out << "cells_pair " << k.basin_pair.count() << '\n';
  return Exit::ok;
}

int cmd_query(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const auto [dep, arr] = parse_states(s, o.states);
  const KernelResult k = kernel_for(o, s);
  const bool member = kernel_membership(k, dep, arr, s.junction, s.fluidities);
  out << (member ? "member" : "non-member") << '\n';
  return member ? Exit::ok : Exit::not_member;
}

int cmd_regulate(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const KernelResult k = kernel_for(o, s);
  const auto [in, ou] = extract_regulators(s, k);
  fs::create_directories(o.out);
  save_feedback((fs::path(o.out) / "feedback_in.txt").string(), in);
  save_feedback((fs::path(o.out) / "feedback_ou.txt").string(), ou);
  out << "feedback_in " << in.cells.size() << " cells\nfeedback_ou " << ou.cells.size() << " cells\n";
  return Exit::ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const auto [dep, arr] = parse_states(s, o.states);
  const KernelResult k = kernel_for(o, s);
  const auto [in, ou] = feedback_for(o, s, k);
  const TransportEvolution evo = synthesize(dep, arr, k, in, ou, s.junction);
  const VerificationReport rep = verify_evolution(evo, s, &k);
  fs::create_directories(o.out);
  std::ostringstream csv, txt;
  write_trajectory_csv(csv, evo);
  write_report(txt, rep);
  txt << "omega=" << format_double(evo.omega) << '\n';
  if (rep.passed()) {
    const MonadTrajectory m = concatenate(evo, rep);
    txt << "jump=" << m.jump_label << " from=" << format_double(m.jump_begin) << " to=" << format_double(m.jump_end)
        << '\n';
  }
  write_file(fs::path(o.out) / "trajectory.csv", csv.str());
  write_file(fs::path(o.out) / "report.txt", txt.str());
  out << txt.str();
  return rep.passed() ? Exit::ok : Exit::synthesis;
}

int cmd_check(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  for (const auto& w : s.warnings) out << "warning: " << w << '\n';
  const JunctionValidation v = validate_junction(s.junction, s.monad);
  out << "junction " << (v.valid() ? "valid" : "invalid") << (v.impulsive ? " impulsive" : "") << '\n';
  for (const auto& viol : v.violations) out << "  " << viol.detail << '\n';
  const bool safe = safety_check(s.monad);
  out << "safety " << (safe ? "holds" : "fails") << '\n';
  if (!safe) {
    out << "decomposability not guaranteed\n";
  } else if (s.mode != Mode::product || !s.junction.is_product()) {
    out << "decomposability guaranteed; the coupled representation is not split\n";
  } else {
    const KernelResult k = solve(s);
    const Decomposition d = decompose(ProductTransport{k.basin_in, k.basin_ou}, s.junction);
    out << "decomposability guaranteed; q_in " << d.q_in.count() << " cells before "
        << format_double(d.in_threshold) << ", q_ou " << d.q_ou.count() << " cells after "
        << format_double(d.ou_threshold) << '\n';
  }
  return v.valid() ? Exit::ok : Exit::validation;
}

int cmd_oracle(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const OracleResult r = brute_force_kernel(s, o.horizon);
  std::ostringstream os;
  write_oracle_pairs(os, r);
  write_file(o.out, os.str());
  out << "pairs " << r.pairs.size() << "\nhorizon " << r.horizon << '\n';
  return Exit::ok;
}

int cmd_diff(const Options& o, std::ostream& out) {
  const Scenario s = load(o);
  const KernelResult k = kernel_for(o, s);
  std::vector<CellPair> oracle;
  if (o.oracle.empty()) {
    oracle = brute_force_kernel(s, o.horizon).pairs;
  } else {
    std::ifstream is(o.oracle);
    if (!is) throw Error(ErrorKind::io, "cannot read " + o.oracle);
    oracle = read_oracle_pairs(is);
  }
  const DiffStats d = compare_pairs(kernel_pairs(k, s), oracle, *s.grid, k.dilation_radius);
  out << "agreements " << d.agreements << "\noracle_only " << d.oracle_only << "\nkernel_only " << d.kernel_only
      << "\nhard_failures " << d.hard_failures << '\n';
  for (const auto& [a, b] : d.missing) out << "missing " << a << ',' << b << '\n';
  for (const auto& [a, b] : d.far) out << "far " << a << ',' << b << '\n';
  return d.ok() ? Exit::ok : Exit::hard_diff;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transport kernels of traffic junctions on a grid", "viaduct"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Solver threads (default: all cores)");

  auto scenario = [&](CLI::App* c) {
    c->add_option("scenario", o.scenario, "Scenario file")->required();
  };
  auto states = [&](CLI::App* c) {
    c->add_option("states", o.states, "Departure then arrival: t d p.. x.. each")->required();
  };
  auto kernel = [&](CLI::App* c) { c->add_option("-k,--kernel", o.kernel, "Kernel directory from solve"); };

  auto* solve_cmd = app.add_subcommand("solve", "Compute the transport kernel");
  scenario(solve_cmd);
  solve_cmd->add_option("-o,--out", o.out, "Output directory")->required();

  auto* query_cmd = app.add_subcommand("query", "Test whether a departure and an arrival are linked");
  scenario(query_cmd);
  kernel(query_cmd);
  states(query_cmd);

  auto* reg_cmd = app.add_subcommand("regulate", "Write the transport regulators");
  scenario(reg_cmd);
  kernel(reg_cmd);
  reg_cmd->add_option("-o,--out", o.out, "Output directory")->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Synthesize and verify a transport evolution");
  scenario(sim_cmd);
  kernel(sim_cmd);
  sim_cmd->add_option("-f,--feedback", o.feedback, "Feedback directory from regulate");
  sim_cmd->add_option("-o,--out", o.out, "Output directory")->required();
  states(sim_cmd);

  auto* check_cmd = app.add_subcommand("check", "Validate the junction and report decomposability");
  scenario(check_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle", "Brute-force linkable pairs");
  scenario(oracle_cmd);
  oracle_cmd->add_option("--horizon", o.horizon, "Steps per leg");
  oracle_cmd->add_option("-o,--out", o.out, "Output file")->required();

  auto* diff_cmd = app.add_subcommand("diff", "Compare the kernel with the oracle");
  scenario(diff_cmd);
  kernel(diff_cmd);
  diff_cmd->add_option("--horizon", o.horizon, "Steps per leg");
  diff_cmd->add_option("--oracle", o.oracle, "Oracle pairs file (computed when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return Exit::ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return Exit::usage;
  }

  try {
    if (*solve_cmd) return cmd_solve(o, out);
    if (*query_cmd) return cmd_query(o, out);
    if (*reg_cmd) return cmd_regulate(o, out);
    if (*sim_cmd) return cmd_simulate(o, out);
    if (*check_cmd) return cmd_check(o, out);
    if (*oracle_cmd) return cmd_oracle(o, out);
    if (*diff_cmd) return cmd_diff(o, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return Exit::usage;
  } catch (const SynthesisFailure& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\npartial trace: " << e.partial().size()
        << " samples\n";
    return Exit::synthesis;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error (io): " << e.what() << '\n';
    return Exit::io;
  }
  return Exit::usage;
}

}  // namespace viaduct::cli
