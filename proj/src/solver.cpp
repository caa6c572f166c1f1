#include "viaduct/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "viaduct/error.hpp"

namespace viaduct {

LegTransitions::LegTransitions(GridPtr grid, LegDynamics leg, Side side, double step,
                               double zero_tolerance, int dilation_radius)
    : grid_(std::move(grid)),
      leg_(std::move(leg)),
      side_(side),
      step_(step),
      zero_tolerance_(zero_tolerance),
      radius_(dilation_radius) {
  if (!grid_->is_traffic()) throw Error(ErrorKind::shape, "leg transitions need a traffic grid");
  if (side_ == Side::pair) throw Error(ErrorKind::mode, "a leg is either incoming or outgoing");
  if (!leg_.celerity_coupling) leg_.refresh();
  celerities_ = leg_.celerity_count();
  surges_ = leg_.surge_count();
}

bool LegTransitions::terminal(std::size_t cell) const {
  return grid_->axis(1).node(grid_->duration_index(cell)) <= zero_tolerance_;
}

TrafficState LegTransitions::successor(const TrafficState& s, std::size_t celerity,
                                       std::size_t surge) const {
  thread_local std::vector<Vec> samples;
  leg_.surge.samples(s, samples);
  const Vec c = leg_.celerity_at(s, celerity);
  return leg_step(side_, s, c, samples[surge], step_, leg_.phi);
}

void LegTransitions::successors(std::size_t cell, std::size_t control,
                                std::vector<std::size_t>& out) const {
  const TrafficState s = grid_->state_of(cell);
  const TrafficState next = successor(s, control / surges_, control % surges_);
  const Vec pt = grid_->point(next);
  grid_->dilated(pt, radius_, out);
}

GridSpec reduced_grid(const GridSpec& traffic, const Fluidities& fl, double step, double zero_tolerance) {
  if (!traffic.is_traffic()) throw Error(ErrorKind::shape, "reduction needs a traffic grid");
  const Axis& t = traffic.axis(0);
  const Axis& d = traffic.axis(1);
  std::vector<Axis> axes;
  Axis omega{AxisRole::aperture, 0, 0.0, 0.0, 1};
  if (step > 0.0) {
    const std::size_t n = std::min(steps_to_zero(d.hi, fl.phi_in, step, zero_tolerance),
                                   steps_to_zero(d.hi, fl.phi_ou, step, zero_tolerance));
    if (n > 0) omega = Axis{AxisRole::aperture, 0, 0.0, double(n) * step, n + 1};
  }
  axes.push_back(omega);
  axes.push_back(Axis{AxisRole::time_in, 0, t.lo, t.hi, t.count});
  axes.push_back(Axis{AxisRole::time_sum, 0, 2 * t.lo, 2 * t.hi, 2 * t.count - 1});
  const std::size_t p_dim = traffic.p_dim(), m_dim = traffic.m_dim();
  auto copy = [&](std::size_t i, AxisRole role, std::size_t comp) {
    Axis a = traffic.axis(i);
    a.role = role;
    a.component = comp;
    axes.push_back(a);
  };
  for (std::size_t i = 0; i < p_dim; ++i) copy(2 + i, AxisRole::position_in, i);
  for (std::size_t i = 0; i < m_dim; ++i) copy(2 + p_dim + i, AxisRole::monad_in, i);
  for (std::size_t i = 0; i < p_dim; ++i) copy(2 + i, AxisRole::position_ou, i);
  for (std::size_t i = 0; i < m_dim; ++i) copy(2 + p_dim + i, AxisRole::monad_ou, i);
  return GridSpec(std::move(axes));
}

namespace {

std::size_t reduced_p_dim(const GridSpec& g) {
  std::size_t n = 0;
  for (const Axis& a : g.axes()) n += a.role == AxisRole::position_in;
  return n;
}

TransportState expand_point(std::span<const double> pt, std::size_t p_dim, std::size_t m_dim,
                            const Fluidities& fl) {
  TransportState s;
  std::size_t k = 3;
  s.incoming.t = pt[1];
  s.incoming.d = fl.phi_in * pt[0];
  s.incoming.p.assign(pt.begin() + std::ptrdiff_t(k), pt.begin() + std::ptrdiff_t(k + p_dim));
  k += p_dim;
  s.incoming.x.assign(pt.begin() + std::ptrdiff_t(k), pt.begin() + std::ptrdiff_t(k + m_dim));
  k += m_dim;
  s.outgoing.t = pt[2] - pt[1];
  s.outgoing.d = fl.phi_ou * pt[0];
  s.outgoing.p.assign(pt.begin() + std::ptrdiff_t(k), pt.begin() + std::ptrdiff_t(k + p_dim));
  k += p_dim;
  s.outgoing.x.assign(pt.begin() + std::ptrdiff_t(k), pt.begin() + std::ptrdiff_t(k + m_dim));
  return s;
}

Vec reduced_point(double omega, const TrafficState& in, double tau_sum, const TrafficState& ou) {
  Vec pt{omega, in.t, tau_sum};
  pt.insert(pt.end(), in.p.begin(), in.p.end());
  pt.insert(pt.end(), in.x.begin(), in.x.end());
  pt.insert(pt.end(), ou.p.begin(), ou.p.end());
  pt.insert(pt.end(), ou.x.begin(), ou.x.end());
  return pt;
}

}  // namespace

TransportState expand_reduced(const GridSpec& reduced, std::size_t cell, const Fluidities& fl) {
  const std::size_t p_dim = reduced_p_dim(reduced);
  const std::size_t m_dim = (reduced.rank() - 3 - 2 * p_dim) / 2;
  const Vec pt = reduced.center(cell);
  return expand_point(pt, p_dim, m_dim, fl);
}

CoupledTransitions::CoupledTransitions(GridPtr reduced, const Scenario& scenario)
    : grid_(std::move(reduced)),
      in_(scenario.leg(Side::in)),
      ou_(scenario.leg(Side::ou)),
      fl_(scenario.fluidities),
      step_(scenario.step()),
      radius_(scenario.solver.dilation_radius) {
  n_in_ = in_.celerity_count() * in_.surge_count();
  n_ou_ = ou_.celerity_count() * ou_.surge_count();
}

AuxPair CoupledTransitions::successor(const AuxPair& s, std::size_t control) const {
  thread_local std::vector<Vec> f_in, f_ou;
  const std::size_t k_in = control / n_ou_, k_ou = control % n_ou_;
  const std::size_t ns_in = in_.surge_count(), ns_ou = ou_.surge_count();
  in_.surge.samples(s.in, f_in);
  ou_.surge.samples(s.ou, f_ou);
  const Vec g_in = in_.celerity_at(s.in, k_in / ns_in);
  const Vec g_ou = ou_.celerity_at(s.ou, k_ou / ns_ou);
  return aux_step(s, g_in, g_ou, f_in[k_in % ns_in], f_ou[k_ou % ns_ou], step_, fl_);
}

void CoupledTransitions::successors(std::size_t cell, std::size_t control,
                                    std::vector<std::size_t>& out) const {
  const std::size_t omega_idx = grid_->axis_index(cell, 0);
  if (omega_idx == 0) return;
  const TransportState s = expand_reduced(*grid_, cell, fl_);
  const AuxPair next = successor(AuxPair{s.incoming, s.outgoing}, control);
  const Vec here = grid_->center(cell);
  const Vec pt = reduced_point(grid_->axis(0).node(omega_idx - 1), next.in, here[2], next.ou);
  grid_->dilated(pt, radius_, out, 0b101u);
}

namespace {

void check_budget(std::size_t cells, const SolverParams& params, const char* what) {
  const std::size_t budget = params.effective_budget();
  if (cells > budget)
    throw Error(ErrorKind::budget, std::string(what) + " has " + std::to_string(cells) +
                                       " cells, over the budget of " + std::to_string(budget));
}

void capture_range(const TransitionSystem& ts, const CellSet& current, const CellSet& monad,
                   std::span<CellSet::Word> next, std::size_t w_begin, std::size_t w_end) {
  const auto cur = current.words();
  const auto m = monad.words();
  const std::size_t controls = ts.control_count();
  std::vector<std::size_t> succ;
  for (std::size_t w = w_begin; w < w_end; ++w) {
    CellSet::Word open = m[w] & ~cur[w];
    while (open) {
      const std::size_t cell = w * 64 + std::size_t(std::countr_zero(open));
      open &= open - 1;
      if (ts.terminal(cell)) continue;
      for (std::size_t k = 0; k < controls; ++k) {
        succ.clear();
        ts.successors(cell, k, succ);
        if (!succ.empty() && current.any_of(succ)) {
          next[w] |= CellSet::Word{1} << (cell & 63);
          break;
        }
      }
    }
  }
}

}  // namespace

BasinResult capture_basin(const TransitionSystem& ts, const CellSet& monad, const CellSet& target,
                          const SolverParams& params) {
  params.validate();
  if (!(monad.grid() == *ts.grid()) || !(target.grid() == *ts.grid()))
    throw Error(ErrorKind::shape, "capture_basin: grid mismatch");
  BasinResult res;
  CellSet current = target & monad;
  const std::size_t words = current.words().size();
  const unsigned threads =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(params.effective_threads(), words)));
  for (std::size_t it = 1; it <= params.max_iterations; ++it) {
    CellSet next = current;
    auto out = next.words();
    if (threads <= 1) {
      capture_range(ts, current, monad, out, 0, words);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (words + threads - 1) / threads;
      for (unsigned t = 0; t < threads; ++t) {
        const std::size_t b = std::min(words, t * chunk), e = std::min(words, b + chunk);
        pool.emplace_back([&, b, e] { capture_range(ts, current, monad, out, b, e); });
      }
      for (auto& th : pool) th.join();
    }
    res.iterations = it;
    if (next == current) {
      res.fixed_point_reached = true;
      break;
    }
    current = std::move(next);
  }
  res.cells = std::move(current);
  return res;
}

namespace {

void require_product(const Scenario& s) {
  if (s.mode != Mode::product) throw Error(ErrorKind::mode, "scenario is not in product mode");
  if (!s.junction.is_product())
    throw Error(ErrorKind::mode, "product mode needs a product junction; use coupled mode");
}

CellSet endpoint_cells(const Scenario& s, bool pre) {
  CellSet out = CellSet::empty(s.grid);
  const auto& ends = pre ? s.junction.pre_factor() : s.junction.post_factor();
  for (const auto& e : ends) out.set(s.grid->cell_of(e.state()));
  return out;
}

BasinResult leg_basin(const Scenario& s, Side side) {
  require_product(s);
  check_budget(s.grid->size(), s.solver, "grid");
  LegTransitions ts(s.grid, s.leg(side), side, s.step(), s.zero_tolerance(), s.solver.dilation_radius);
  return capture_basin(ts, s.monad, endpoint_cells(s, side == Side::in), s.solver);
}

}  // namespace

BasinResult incoming_basin(const Scenario& s) { return leg_basin(s, Side::in); }
BasinResult outgoing_basin(const Scenario& s) { return leg_basin(s, Side::ou); }

ReducedSystem reduced_system(const Scenario& s) {
  if (s.mode != Mode::coupled) throw Error(ErrorKind::mode, "scenario is not in coupled mode");
  auto grid = std::make_shared<const GridSpec>(reduced_grid(*s.grid, s.fluidities, s.step(), s.zero_tolerance()));
  check_budget(grid->size(), s.solver, "reduced grid");

  ReducedSystem r{grid, CellSet::empty(grid), CellSet::empty(grid)};
  std::set<std::size_t> fibers;
  for (const auto& pr : s.junction.pairs()) {
    const Vec pt = reduced_point(0.0, pr.pre.state(), pr.pre.sigma + pr.post.sigma, pr.post.state());
    if (auto cell = grid->locate(pt)) {
      r.target.set(*cell);
      fibers.insert(grid->axis_index(*cell, 2));
    }
  }

  // tau_sum is invariant, so only fibers holding a target can be captured.
  const std::size_t p_dim = s.grid->p_dim(), m_dim = s.grid->m_dim();
  const double d_hi = s.grid->axis(1).hi;
  Vec pt(grid->rank());
  for (std::size_t fiber : fibers) {
    std::size_t outer = 1;
    for (std::size_t a = 0; a < 2; ++a) outer *= grid->axis(a).count;
    const std::size_t inner = grid->stride(2);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < inner; ++i) {
        const std::size_t cell = o * grid->axis(2).count * inner + fiber * inner + i;
        grid->center(cell, pt);
        TransportState ts = expand_point(pt, p_dim, m_dim, s.fluidities);
        ts.incoming.d = std::min(ts.incoming.d, d_hi);
        ts.outgoing.d = std::min(ts.outgoing.d, d_hi);
        const auto c_in = s.grid->locate(s.grid->point(ts.incoming));
        const auto c_ou = s.grid->locate(s.grid->point(ts.outgoing));
        if (c_in && c_ou && s.monad.test(*c_in) && s.monad.test(*c_ou)) r.monad.set(cell);
      }
    }
  }
  return r;
}

BasinResult coupled_kernel(const Scenario& s, CellSet* reduced_monad) {
  ReducedSystem rs = reduced_system(s);
  CoupledTransitions trans(rs.grid, s);
  BasinResult res = capture_basin(trans, rs.monad, rs.target, s.solver);
  if (reduced_monad) *reduced_monad = std::move(rs.monad);
  return res;
}

KernelResult solve(const Scenario& s) {
  KernelResult r;
  r.mode = s.mode;
  r.step = s.step();
  r.zero_tolerance = s.zero_tolerance();
  r.aperture_tolerance = s.aperture_tolerance();
  r.dilation_radius = s.solver.dilation_radius;
  r.fluidities = s.fluidities;
  r.traffic = s.grid;
  if (s.mode == Mode::product) {
    BasinResult in = incoming_basin(s);
    BasinResult ou = outgoing_basin(s);
    r.basin_in = std::move(in.cells);
    r.basin_ou = std::move(ou.cells);
    r.iterations = std::max(in.iterations, ou.iterations);
    r.fixed_point_reached = in.fixed_point_reached && ou.fixed_point_reached;
  } else {
    BasinResult k = coupled_kernel(s);
    r.basin_pair = std::move(k.cells);
    r.iterations = k.iterations;
    r.fixed_point_reached = k.fixed_point_reached;
  }
  return r;
}

std::optional<std::size_t> reduce_pair(const GridSpec& reduced, const TrafficState& dep,
                                       const TrafficState& arr, const KernelResult& result) {
  const Fluidities& fl = result.fluidities;
  if (!apertures_match(dep.d, arr.d, fl, result.step, result.zero_tolerance, result.aperture_tolerance))
    return std::nullopt;
  const std::size_t n = steps_to_zero(dep.d, fl.phi_in, result.step, result.zero_tolerance);
  return reduced.locate(reduced_point(double(n) * result.step, dep, dep.t + arr.t, arr));
}

bool kernel_membership(const KernelResult& result, const TrafficState& dep, const TrafficState& arr,
                       const JunctionRelation& junction, const Fluidities& fluidities) {
  if (!result.traffic) throw Error(ErrorKind::empty_input, "kernel has no grid");
  const GridSpec& g = *result.traffic;
  const std::size_t c_dep = g.cell_of(dep);
  const std::size_t c_arr = g.cell_of(arr);
  if (dep.t > arr.t || junction.empty()) return false;
  KernelResult r = result;
  r.fluidities = fluidities;
  if (result.mode == Mode::coupled) {
    // Membership is decided on node coordinates so that off-node queries
    // resolve like the cells they fall in.
    const auto cell = reduce_pair(result.basin_pair.grid(), g.state_of(c_dep), g.state_of(c_arr), r);
    return cell && result.basin_pair.test(*cell);
  }
  if (!result.basin_in.test(c_dep) || !result.basin_ou.test(c_arr)) return false;
  const TrafficState sd = g.state_of(c_dep), sa = g.state_of(c_arr);
  return apertures_match(sd.d, sa.d, fluidities, r.step, r.zero_tolerance, r.aperture_tolerance);
}

namespace {

namespace fs = std::filesystem;

void write_grid_file(const fs::path& path, const GridSpec& g) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path.string());
  os << "VIADUCT-GRID v1\n";
  write_grid_block(os, g);
}

GridPtr read_grid_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot read " + path.string());
  std::string header;
  std::getline(is, header);
  if (header != "VIADUCT-GRID v1") throw Error(ErrorKind::parse, path.string() + ":1: bad header");
  std::size_t line = 1;
  std::string pending;
  return std::make_shared<const GridSpec>(read_grid_block(is, line, pending));
}

}  // namespace

void write_kernel(const std::string& dir, const KernelResult& r) {
  fs::create_directories(dir);
  const fs::path d(dir);
  std::ofstream meta(d / "kernel.meta", std::ios::binary);
  if (!meta) throw Error(ErrorKind::io, "cannot write " + (d / "kernel.meta").string());
  meta << "mode = " << to_string(r.mode) << '\n'
       << "iterations = " << r.iterations << '\n'
       << "fixed_point_reached = " << (r.fixed_point_reached ? "true" : "false") << '\n';
  if (r.mode == Mode::product) {
    meta << "cells_in = " << r.basin_in.count() << '\n' << "cells_ou = " << r.basin_ou.count() << '\n';
  } else {
    meta << "cells_pair = " << r.basin_pair.count() << '\n';
  }
  meta << "step = " << format_double(r.step) << '\n'
       << "zero_tolerance = " << format_double(r.zero_tolerance) << '\n'
       << "aperture_tolerance = " << format_double(r.aperture_tolerance) << '\n'
       << "dilation_radius = " << r.dilation_radius << '\n'
       << "phi_in = " << format_double(r.fluidities.phi_in) << '\n'
       << "phi_ou = " << format_double(r.fluidities.phi_ou) << '\n';
  if (r.mode == Mode::product) {
    save_cellset((d / "kernel_in.cells").string(), r.basin_in);
    save_cellset((d / "kernel_ou.cells").string(), r.basin_ou);
  } else {
    save_cellset((d / "kernel_pair.cells").string(), r.basin_pair);
    write_grid_file(d / "kernel_traffic.grid", *r.traffic);
  }
}

KernelResult read_kernel(const std::string& dir) {
  const fs::path d(dir);
  std::ifstream meta(d / "kernel.meta");
  if (!meta) throw Error(ErrorKind::io, "cannot read " + (d / "kernel.meta").string());
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t n = 0;
  while (std::getline(meta, line)) {
    ++n;
    if (line.empty()) continue;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos)
      throw Error(ErrorKind::parse, "kernel.meta:" + std::to_string(n) + ": expected 'key = value'");
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  auto get = [&](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw Error(ErrorKind::parse, "kernel.meta: missing " + k);
    return it->second;
  };
  KernelResult r;
  r.mode = get("mode") == "coupled" ? Mode::coupled : Mode::product;
  r.iterations = std::stoull(get("iterations"));
  r.fixed_point_reached = get("fixed_point_reached") == "true";
  r.step = std::stod(get("step"));
  r.zero_tolerance = std::stod(get("zero_tolerance"));
  r.aperture_tolerance = std::stod(get("aperture_tolerance"));
  r.dilation_radius = std::stoi(get("dilation_radius"));
  r.fluidities = {std::stod(get("phi_in")), std::stod(get("phi_ou"))};
  if (r.mode == Mode::product) {
    r.basin_in = load_cellset((d / "kernel_in.cells").string());
    r.basin_ou = load_cellset((d / "kernel_ou.cells").string());
    r.traffic = r.basin_in.grid_ptr();
  } else {
    r.basin_pair = load_cellset((d / "kernel_pair.cells").string());
    r.traffic = read_grid_file(d / "kernel_traffic.grid");
  }
  return r;
}

}  // namespace viaduct
