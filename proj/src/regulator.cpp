#include "viaduct/regulator.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "viaduct/error.hpp"

namespace viaduct {

std::size_t FeedbackMap::find(std::size_t cell) const {
  auto it = std::lower_bound(cells.begin(), cells.end(), cell);
  return it != cells.end() && *it == cell ? std::size_t(it - cells.begin()) : npos;
}

std::vector<std::uint32_t> FeedbackMap::admissible(std::size_t i) const {
  std::vector<std::uint32_t> out;
  for (const auto& w : witnesses[i])
    if (out.empty() || out.back() != w.first) out.push_back(w.first);
  return out;
}

namespace {
void assign_ranks(FeedbackMap& fb, const LegTransitions& ts);
}  // namespace

FeedbackMap extract_regulator(const CellSet& basin, const LegTransitions& ts, const SolverParams& params) {
  if (!(basin.grid() == *ts.grid())) throw Error(ErrorKind::shape, "basin and dynamics grids differ");
  FeedbackMap fb;
  fb.side = ts.side();
  fb.grid = ts.grid();
  fb.leg = ts.leg();
  fb.step = ts.step();
  fb.dilation_radius = params.dilation_radius;
  fb.domain = basin;
  fb.cells = basin.members();
  fb.witnesses.resize(fb.cells.size());
  fb.at_junction.resize(fb.cells.size());
  std::vector<std::size_t> succ;
  const std::size_t ns = ts.surge_count();
  for (std::size_t i = 0; i < fb.cells.size(); ++i) {
    const std::size_t cell = fb.cells[i];
    if (ts.terminal(cell)) {
      fb.at_junction[i] = true;
      continue;
    }
    for (std::size_t k = 0; k < ts.control_count(); ++k) {
      succ.clear();
      ts.successors(cell, k, succ);
      if (!succ.empty() && basin.any_of(succ))
        fb.witnesses[i].emplace_back(std::uint32_t(k / ns), std::uint32_t(k % ns));
    }
  }
  assign_ranks(fb, ts);
  return fb;
}

namespace {

void assign_ranks(FeedbackMap& fb, const LegTransitions& ts) {
  fb.rank.assign(fb.cells.size(), FeedbackMap::kNoRank);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < fb.cells.size(); ++i) {
    if (fb.at_junction[i])
      fb.rank[i] = 0;
    else if (!fb.witnesses[i].empty())
      open.push_back(i);
  }
  const std::size_t ns = ts.surge_count();
  std::vector<std::size_t> succ;
  for (std::uint32_t gen = 1; !open.empty(); ++gen) {
    std::vector<std::size_t> ranked, rest;
    for (std::size_t i : open) {
      bool hit = false;
      for (const auto& [c, f] : fb.witnesses[i]) {
        succ.clear();
        ts.successors(fb.cells[i], c * ns + f, succ);
        for (std::size_t n : succ) {
          const std::size_t j = fb.find(n);
          if (j != FeedbackMap::npos && fb.rank[j] < gen) {
            hit = true;
            break;
          }
        }
        if (hit) break;
      }
      (hit ? ranked : rest).push_back(i);
    }
    if (ranked.empty()) break;
    for (std::size_t i : ranked) fb.rank[i] = gen;
    open = std::move(rest);
  }
}

}  // namespace

std::pair<FeedbackMap, FeedbackMap> extract_regulators(const Scenario& s, const KernelResult& kernel) {
  if (kernel.mode != Mode::product)
    throw Error(ErrorKind::mode, "regulators are extracted from product-mode kernels only");
  auto make = [&](const CellSet& basin, Side side) {
    LegTransitions ts(s.grid, s.leg(side), side, s.step(), s.zero_tolerance(), s.solver.dilation_radius);
    FeedbackMap fb = extract_regulator(basin, ts, s.solver);
    fb.zero_tolerance = s.zero_tolerance();
    return fb;
  };
  return {make(kernel.basin_in, Side::in), make(kernel.basin_ou, Side::ou)};
}

namespace {

std::size_t entry_of(const FeedbackMap& fb, const TrafficState& s) {
  const std::size_t cell = fb.grid->cell_of(s);
  const std::size_t i = fb.find(cell);
  if (i == FeedbackMap::npos)
    throw Error(ErrorKind::not_in_kernel, "state (t=" + format_double(s.t) + ", d=" + format_double(s.d) +
                                              ") is outside the viable set");
  return i;
}

}  // namespace

Regulation regulate(const FeedbackMap& fb, const TrafficState& s) {
  const std::size_t i = entry_of(fb, s);
  Regulation r;
  r.at_junction = fb.at_junction[i];
  r.indices = fb.admissible(i);
  const TrafficState node = fb.grid->state_of(fb.cells[i]);
  for (auto k : r.indices) r.celerities.push_back(fb.leg.celerity_at(node, k));
  return r;
}

std::vector<SurgeWitness> regulator_differential_view(const FeedbackMap& fb, const TrafficState& s) {
  const std::size_t i = entry_of(fb, s);
  const TrafficState node = fb.grid->state_of(fb.cells[i]);
  std::vector<Vec> samples;
  fb.leg.surge.samples(node, samples);
  std::vector<SurgeWitness> out;
  for (const auto& [c, f] : fb.witnesses[i])
    out.push_back({c, f, fb.leg.celerity_at(node, c), samples[f]});
  return out;
}

namespace {

std::optional<std::size_t> nearest_member(const FeedbackMap& fb, const Vec& pt, bool by_rank = false) {
  std::vector<std::size_t> cand;
  if (!fb.grid->dilated(pt, fb.dilation_radius, cand)) return std::nullopt;
  std::sort(cand.begin(), cand.end());
  std::optional<std::size_t> best;
  double best_d = 0.0;
  std::uint32_t best_rank = 0;
  Vec c(fb.grid->rank());
  for (std::size_t cell : cand) {
    if (!fb.domain.test(cell)) continue;
    fb.grid->center(cell, c);
    const double d = fb.grid->point_distance_cells(c, pt);
    const std::uint32_t rk = by_rank ? fb.rank[fb.find(cell)] : 0;
    if (!best || rk < best_rank || (rk == best_rank && d < best_d)) {
      best = cell;
      best_d = d;
      best_rank = rk;
    }
  }
  return best;
}

}  // namespace

std::optional<std::size_t> feedback_cell(const FeedbackMap& fb, const TrafficState& s) {
  return nearest_member(fb, fb.grid->point(s));
}

Rollout closed_loop_rollout(const FeedbackMap& fb, std::size_t start, std::mt19937_64& rng,
                            std::size_t max_steps) {
  Rollout r;
  std::size_t cell = start;
  std::vector<Vec> samples;
  for (std::size_t step = 0; step <= max_steps; ++step) {
    r.cells.push_back(cell);
    const std::size_t i = fb.find(cell);
    if (i == FeedbackMap::npos) {
      r.failure = "cell " + std::to_string(cell) + " is outside the basin";
      return r;
    }
    if (fb.at_junction[i]) {
      r.reached_zero = true;
      return r;
    }
    const auto& wit = fb.witnesses[i];
    if (wit.empty()) {
      r.failure = "no admissible celerity at cell " + std::to_string(cell);
      return r;
    }
    const auto adm = fb.admissible(i);
    const auto c = adm[std::uniform_int_distribution<std::size_t>(0, adm.size() - 1)(rng)];
    std::vector<std::uint32_t> surges;
    for (const auto& w : wit)
      if (w.first == c) surges.push_back(w.second);
    const auto f = surges[std::uniform_int_distribution<std::size_t>(0, surges.size() - 1)(rng)];
    const TrafficState s = fb.grid->state_of(cell);
    fb.leg.surge.samples(s, samples);
    const TrafficState next = leg_step(fb.side, s, fb.leg.celerity_at(s, c), samples[f], fb.step, fb.leg.phi);
    const auto to = nearest_member(fb, fb.grid->point(next), !fb.rank.empty());
    if (!to) {
      r.failure = "successor of cell " + std::to_string(cell) + " left the dilated basin";
      return r;
    }
    cell = *to;
  }
  r.failure = "step limit reached";
  return r;
}

void write_feedback(std::ostream& os, const FeedbackMap& fb) {
  os << "VIADUCT-FEEDBACK v1\n" << "side " << (fb.side == Side::ou ? "ou" : "in") << '\n';
  write_grid_block(os, *fb.grid);
  for (std::size_t i = 0; i < fb.cells.size(); ++i) {
    os << fb.cells[i] << ':';
    const auto adm = fb.admissible(i);
    for (std::size_t k = 0; k < adm.size(); ++k) os << (k ? "," : " ") << adm[k];
    if (!fb.witnesses[i].empty()) {
      os << " ;";
      for (std::size_t k = 0; k < fb.witnesses[i].size(); ++k)
        os << (k ? "," : " ") << fb.witnesses[i][k].first << '/' << fb.witnesses[i][k].second;
    }
    if (fb.at_junction[i]) os << " @";
    os << '\n';
  }
}

FeedbackMap read_feedback(std::istream& is, const Scenario& s) {
  std::string line;
  std::size_t line_no = 1;
  auto fail = [&](const std::string& msg) {
    return Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + msg);
  };
  if (!std::getline(is, line) || line != "VIADUCT-FEEDBACK v1") throw fail("expected header 'VIADUCT-FEEDBACK v1'");
  ++line_no;
  if (!std::getline(is, line) || (line != "side in" && line != "side ou")) throw fail("expected 'side in' or 'side ou'");
  const Side side = line == "side ou" ? Side::ou : Side::in;
  std::string pending;
  const GridSpec grid = read_grid_block(is, line_no, pending);
  if (!(grid == *s.grid)) throw Error(ErrorKind::scenario_mismatch, "feedback grid differs from the scenario grid");

  FeedbackMap fb;
  fb.side = side;
  fb.grid = s.grid;
  fb.leg = s.leg(side);
  fb.step = s.step();
  fb.zero_tolerance = s.zero_tolerance();
  fb.dilation_radius = s.solver.dilation_radius;
  fb.domain = CellSet::empty(s.grid);
  auto take = [&](const std::string& l) {
    const auto colon = l.find(':');
    if (colon == std::string::npos) throw fail("expected 'cell: ...'");
    std::size_t cell = 0;
    try {
      cell = std::stoull(l.substr(0, colon));
    } catch (const std::exception&) {
      throw fail("bad cell index");
    }
    if (cell >= grid.size() || (!fb.cells.empty() && cell <= fb.cells.back())) throw fail("cell index out of order");
    std::string rest = l.substr(colon + 1);
    bool junction = false;
    if (const auto at = rest.find('@'); at != std::string::npos) {
      junction = true;
      rest = rest.substr(0, at);
    }
    std::vector<FeedbackMap::Witness> wit;
    if (const auto semi = rest.find(';'); semi != std::string::npos) {
      std::istringstream ws(rest.substr(semi + 1));
      std::string tok;
      while (std::getline(ws, tok, ',')) {
        unsigned c = 0, f = 0;
        char slash = 0;
        std::istringstream ts(tok);
        if (!(ts >> c >> slash >> f) || slash != '/') throw fail("bad witness '" + tok + "'");
        wit.emplace_back(c, f);
      }
    }
    fb.cells.push_back(cell);
    fb.domain.set(cell);
    fb.witnesses.push_back(std::move(wit));
    fb.at_junction.push_back(junction);
  };
  if (!pending.empty()) take(pending);
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty()) take(line);
  }
  const LegTransitions ts(s.grid, fb.leg, side, fb.step, fb.zero_tolerance, fb.dilation_radius);
  assign_ranks(fb, ts);
  return fb;
}

void save_feedback(const std::string& path, const FeedbackMap& fb) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path);
  write_feedback(os, fb);
}

FeedbackMap load_feedback(const std::string& path, const Scenario& s) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot read " + path);
  return read_feedback(is, s);
}

}  // namespace viaduct
