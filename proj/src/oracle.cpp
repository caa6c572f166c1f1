#include "viaduct/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "viaduct/error.hpp"

namespace viaduct {

bool OracleResult::contains(std::size_t dep, std::size_t arr) const {
  return std::binary_search(pairs.begin(), pairs.end(), CellPair{dep, arr});
}

namespace {

struct LegWalker {
  const Scenario& s;
  const GridSpec& g;
  LegDynamics leg;
  Side side;
  std::size_t nc, ns;

  LegWalker(const Scenario& sc, Side sd)
      : s(sc), g(*sc.grid), leg(sc.leg(sd)), side(sd), nc(leg.celerity_count()), ns(leg.surge_count()) {}

  std::size_t controls() const { return nc * ns; }
  bool terminal(std::size_t cell) const { return g.axis(1).node(g.duration_index(cell)) <= s.zero_tolerance(); }

  // Dilated successor cells inside the monad relation, as the solver sees them.
  void next(std::size_t cell, std::size_t k, std::vector<std::size_t>& out) const {
    thread_local std::vector<Vec> samples;
    thread_local std::vector<std::size_t> cand;
    out.clear();
    cand.clear();
    const TrafficState st = g.state_of(cell);
    leg.surge.samples(st, samples);
    const TrafficState n = leg_step(side, st, leg.celerity_at(st, k / ns), samples[k % ns], s.step(), leg.phi);
    g.dilated(g.point(n), s.solver.dilation_radius, cand);
    for (std::size_t c : cand)
      if (s.monad.test(c)) out.push_back(c);
    std::sort(out.begin(), out.end());
  }
};

using Hits = std::vector<std::pair<std::size_t, std::size_t>>;  // (steps, endpoint cell)

class Reach {
 public:
  Reach(const LegWalker& w, const CellSet& goals, std::size_t horizon)
      : w_(w), goals_(goals), horizon_(horizon), memo_(w.g.size() * (horizon + 1)), done_(memo_.size(), false) {}

  const Hits& operator()(std::size_t cell, std::size_t rem) {
    const std::size_t key = cell * (horizon_ + 1) + rem;
    if (done_[key]) return memo_[key];
    Hits out;
    if (w_.terminal(cell)) {
      if (goals_.test(cell)) out.emplace_back(0, cell);
    } else if (rem > 0) {
      std::vector<std::size_t> succ;
      for (std::size_t k = 0; k < w_.controls(); ++k) {
        w_.next(cell, k, succ);
        for (std::size_t n : succ)
          for (const auto& [steps, end] : (*this)(n, rem - 1)) out.emplace_back(steps + 1, end);
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    memo_[key] = std::move(out);
    done_[key] = true;
    return memo_[key];
  }

 private:
  const LegWalker& w_;
  const CellSet& goals_;
  std::size_t horizon_;
  std::vector<Hits> memo_;
  std::vector<bool> done_;
};

// Depth-first search over joint control sequences on the reduced grid, with
// the coupled integrator and dilation. Memoized on (cell, steps left).
class CoupledReach {
 public:
  CoupledReach(const ReducedSystem& rs, const CoupledTransitions& ts, std::size_t horizon)
      : rs_(rs), ts_(ts), horizon_(horizon) {}

  bool operator()(std::size_t cell, std::size_t rem) {
    if (ts_.terminal(cell)) return rs_.target.test(cell);
    if (rem == 0) return false;
    const std::size_t key = cell * (horizon_ + 1) + rem;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool hit = false;
    std::vector<std::size_t> succ;
    for (std::size_t k = 0; k < ts_.control_count() && !hit; ++k) {
      succ.clear();
      ts_.successors(cell, k, succ);
      for (std::size_t n : succ)
        if (rs_.monad.test(n) && (*this)(n, rem - 1)) {
          hit = true;
          break;
        }
    }
    memo_[key] = hit;
    return hit;
  }

 private:
  const ReducedSystem& rs_;
  const CoupledTransitions& ts_;
  std::size_t horizon_;
  std::unordered_map<std::size_t, bool> memo_;
};

void coupled_pairs(const Scenario& s, std::size_t horizon, OracleResult& r) {
  const GridSpec& g = *s.grid;
  const ReducedSystem rs = reduced_system(s);
  const CoupledTransitions ts(rs.grid, s);
  CoupledReach reach(rs, ts, horizon);
  KernelResult tol;
  tol.step = s.step();
  tol.zero_tolerance = s.zero_tolerance();
  tol.aperture_tolerance = s.aperture_tolerance();
  tol.fluidities = s.fluidities;

  // time index pairs whose sum lands on a fiber holding a target
  std::set<std::size_t> fibers;
  rs.target.for_each([&](std::size_t c) { fibers.insert(rs.grid->axis_index(c, 2)); });
  const Axis& t_axis = g.axis(0);
  std::vector<std::vector<std::size_t>> arr_times(t_axis.count);
  for (std::size_t i = 0; i < t_axis.count; ++i)
    for (std::size_t j = i; j < t_axis.count; ++j) {
      const auto f = rs.grid->nearest(2, t_axis.node(i) + t_axis.node(j));
      if (f && fibers.count(*f)) arr_times[i].push_back(j);
    }
  std::vector<std::vector<std::size_t>> by_time(t_axis.count);
  s.monad.for_each([&](std::size_t c) { by_time[g.axis_index(c, 0)].push_back(c); });

  std::set<CellPair> out;
  s.monad.for_each([&](std::size_t dep) {
    const TrafficState sd = g.state_of(dep);
    for (std::size_t j : arr_times[g.axis_index(dep, 0)])
      for (std::size_t arr : by_time[j]) {
        const auto cell = reduce_pair(*rs.grid, sd, g.state_of(arr), tol);
        if (cell && rs.monad.test(*cell) && reach(*cell, horizon)) out.emplace(dep, arr);
      }
  });
  r.pairs.assign(out.begin(), out.end());
}

}  // namespace

OracleResult brute_force_kernel(const Scenario& s, std::size_t horizon, const OracleBudget& budget) {
  const GridSpec& g = *s.grid;
  const LegWalker in(s, Side::in), ou(s, Side::ou);
  const double seq = std::pow(double(std::max(in.controls(), ou.controls())), double(horizon));
  if (g.size() > budget.max_cells || seq > budget.max_sequences) {
    std::ostringstream msg;
    msg << "oracle needs " << g.size() << " cells (budget " << budget.max_cells << ") and " << seq
        << " control sequences (budget " << budget.max_sequences << ")";
    throw Error(ErrorKind::budget, msg.str());
  }
  OracleResult r;
  r.horizon = horizon;
  r.celerity_samples = in.nc;
  r.surge_samples = in.ns;
  if (s.junction.empty()) return r;
  if (s.mode == Mode::coupled) {
    coupled_pairs(s, horizon, r);
    return r;
  }

  CellSet pre = CellSet::empty(s.grid), post = CellSet::empty(s.grid);
  std::set<CellPair> jcells;
  for (const auto& pr : s.junction.pairs()) {
    const std::size_t a = g.cell_of(pr.pre.state()), b = g.cell_of(pr.post.state());
    pre.set(a);
    post.set(b);
    jcells.emplace(a, b);
  }
  std::multimap<std::size_t, std::size_t> post_of;
  for (const auto& [a, b] : jcells) post_of.emplace(a, b);

  Reach reach_in(in, pre, horizon), reach_ou(ou, post, horizon);
  std::map<CellPair, std::vector<std::size_t>> arrivals;  // (steps, post cell) -> arrival cells
  s.monad.for_each([&](std::size_t arr) {
    for (const auto& h : reach_ou(arr, horizon)) arrivals[h].push_back(arr);
  });
  std::set<CellPair> out;
  s.monad.for_each([&](std::size_t dep) {
    const TrafficState sd = g.state_of(dep);
    for (const auto& [steps, pc] : reach_in(dep, horizon)) {
      auto range = post_of.equal_range(pc);
      for (auto it = range.first; it != range.second; ++it) {
        auto a = arrivals.find({steps, it->second});
        if (a == arrivals.end()) continue;
        for (std::size_t arr : a->second) {
          const TrafficState sa = g.state_of(arr);
          if (sd.t > sa.t) continue;
          if (!apertures_match(sd.d, sa.d, s.fluidities, s.step(), s.zero_tolerance(), s.aperture_tolerance()))
            continue;
          out.emplace(dep, arr);
        }
      }
    }
  });
  r.pairs.assign(out.begin(), out.end());
  return r;
}

std::optional<std::vector<WitnessStep>> oracle_witness(const Scenario& s, Side side, std::size_t start,
                                                       std::size_t goal, std::size_t steps) {
  const LegWalker w(s, side);
  std::vector<WitnessStep> path;
  // depth-first, controls then successor cells in index order
  auto dfs = [&](auto&& self, std::size_t cell, std::size_t rem) -> bool {
    if (rem == 0) return cell == goal;
    if (w.terminal(cell)) return false;
    std::vector<std::size_t> succ;
    for (std::size_t k = 0; k < w.controls(); ++k) {
      w.next(cell, k, succ);
      for (std::size_t n : succ) {
        path.push_back({k, n});
        if (self(self, n, rem - 1)) return true;
        path.pop_back();
      }
    }
    return false;
  };
  if (dfs(dfs, start, steps)) return path;
  return std::nullopt;
}

std::optional<std::size_t> replay(const Scenario& s, Side side, std::size_t start,
                                  const std::vector<WitnessStep>& steps) {
  const GridSpec& g = *s.grid;
  const LegDynamics leg = s.leg(side);
  const std::size_t ns = leg.surge_count();
  std::size_t cell = start;
  std::vector<Vec> samples;
  std::vector<std::size_t> cand;
  for (const auto& step : steps) {
    const TrafficState st = g.state_of(cell);
    leg.surge.samples(st, samples);
    const TrafficState n =
        leg_step(side, st, leg.celerity_at(st, step.control / ns), samples[step.control % ns], s.step(), leg.phi);
    cand.clear();
    if (!g.dilated(g.point(n), s.solver.dilation_radius, cand)) return std::nullopt;
    if (std::find(cand.begin(), cand.end(), step.cell) == cand.end() || !s.monad.test(step.cell))
      return std::nullopt;
    cell = step.cell;
  }
  return cell;
}

std::vector<CellPair> kernel_pairs(const KernelResult& kernel, const Scenario& s) {
  if (!kernel.traffic || !(*kernel.traffic == *s.grid))
    throw Error(ErrorKind::shape, "kernel and scenario grids differ");
  const GridSpec& g = *s.grid;
  std::vector<CellPair> out;
  if (kernel.mode == Mode::product) {
    const auto ins = kernel.basin_in.members(), ous = kernel.basin_ou.members();
    for (std::size_t dep : ins) {
      const TrafficState sd = g.state_of(dep);
      for (std::size_t arr : ous)
        if (kernel_membership(kernel, sd, g.state_of(arr), s.junction, kernel.fluidities)) out.emplace_back(dep, arr);
    }
    return out;
  }
  const GridSpec& red = kernel.basin_pair.grid();
  const Axis& d_axis = g.axis(1);
  std::set<CellPair> pairs;
  kernel.basin_pair.for_each([&](std::size_t cell) {
    const TransportState ts = expand_reduced(red, cell, kernel.fluidities);
    for (std::size_t i = 0; i < d_axis.count; ++i) {
      TrafficState dep = ts.incoming;
      dep.d = d_axis.node(i);
      const auto c_dep = g.locate(g.point(dep));
      if (!c_dep) continue;
      for (std::size_t j = 0; j < d_axis.count; ++j) {
        TrafficState arr = ts.outgoing;
        arr.d = d_axis.node(j);
        const auto c_arr = g.locate(g.point(arr));
        if (!c_arr) continue;
        const TrafficState nd = g.state_of(*c_dep), na = g.state_of(*c_arr);
        if (nd.t > na.t) continue;
        const auto back = reduce_pair(red, nd, na, kernel);
        if (back && *back == cell) pairs.emplace(*c_dep, *c_arr);
      }
    }
  });
  out.assign(pairs.begin(), pairs.end());
  return out;
}

DiffStats compare_pairs(const std::vector<CellPair>& kernel, const std::vector<CellPair>& oracle,
                        const GridSpec& grid, int dilation_radius) {
  DiffStats st;
  std::vector<CellPair> k = kernel, o = oracle;
  std::sort(k.begin(), k.end());
  std::sort(o.begin(), o.end());
  std::vector<CellPair> both, k_only;
  std::set_intersection(k.begin(), k.end(), o.begin(), o.end(), std::back_inserter(both));
  std::set_difference(o.begin(), o.end(), k.begin(), k.end(), std::back_inserter(st.missing));
  std::set_difference(k.begin(), k.end(), o.begin(), o.end(), std::back_inserter(k_only));
  st.agreements = both.size();
  st.oracle_only = st.missing.size();
  st.kernel_only = k_only.size();
  const std::size_t margin = std::size_t(dilation_radius) + 1;
  for (const auto& [d, a] : k_only) {
    bool near = false;
    for (const auto& [od, oa] : o) {
      if (grid.cell_distance(d, od) <= margin && grid.cell_distance(a, oa) <= margin) {
        near = true;
        break;
      }
    }
    if (!near) st.far.emplace_back(d, a);
  }
  st.hard_failures = st.missing.size() + st.far.size();
  return st;
}

DiffStats compare(const KernelResult& kernel, const OracleResult& oracle, const Scenario& s) {
  return compare_pairs(kernel_pairs(kernel, s), oracle.pairs, *s.grid, kernel.dilation_radius);
}

CellSet forward_outgoing_reach(const Scenario& s) {
  const GridSpec& g = *s.grid;
  const LegDynamics leg = s.leg(Side::ou);
  const std::size_t ns = leg.surge_count(), nc = leg.celerity_count();
  const double h = s.step();
  CellSet seen = CellSet::empty(s.grid);
  std::deque<std::size_t> queue;
  for (const auto& pr : s.junction.pairs()) {
    const std::size_t c = g.cell_of(pr.post.state());
    if (s.monad.test(c) && !seen.test(c)) {
      seen.set(c);
      queue.push_back(c);
    }
  }
  std::vector<Vec> samples;
  while (!queue.empty()) {
    const std::size_t cell = queue.front();
    queue.pop_front();
    const TrafficState st = g.state_of(cell);
    leg.surge.samples(st, samples);
    for (std::size_t ci = 0; ci < nc; ++ci) {
      const Vec c = leg.celerity_at(st, ci);
      for (std::size_t si = 0; si < ns; ++si) {
        TrafficState n = st;
        n.t += h;
        n.d += leg.phi * h;
        for (std::size_t i = 0; i < n.p.size(); ++i) n.p[i] += h * c[i];
        for (std::size_t i = 0; i < n.x.size(); ++i) n.x[i] += h * samples[si][i];
        const auto loc = g.locate(g.point(n));
        if (!loc || !s.monad.test(*loc) || seen.test(*loc)) continue;
        seen.set(*loc);
        queue.push_back(*loc);
      }
    }
  }
  return seen;
}

void write_oracle_pairs(std::ostream& os, const OracleResult& r) {
  for (const auto& [d, a] : r.pairs) os << d << ',' << a << '\n';
}

std::vector<CellPair> read_oracle_pairs(std::istream& is) {
  std::vector<CellPair> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::size_t d = 0, a = 0;
    char comma = 0;
    if (!(ls >> d >> comma >> a) || comma != ',')
      throw Error(ErrorKind::parse, "line " + std::to_string(n) + ": expected 'dep,arr'");
    out.emplace_back(d, a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace viaduct
