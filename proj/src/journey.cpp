#include "viaduct/journey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace viaduct {

namespace {

struct LegRun {
  SampledLeg leg;
  bool reached = false;
};

// Basin cell for feedback at a real state. While the duration has not
// vanished, junction cells are skipped: they carry no celerities.
std::optional<std::size_t> lookup(const FeedbackMap& fb, const TrafficState& s) {
  std::vector<std::size_t> cand;
  const Vec pt = fb.grid->point(s);
  if (!fb.grid->dilated(pt, std::max(fb.dilation_radius, 1), cand)) return std::nullopt;
  std::sort(cand.begin(), cand.end());
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  Vec c(fb.grid->rank());
  for (std::size_t cell : cand) {
    const std::size_t i = fb.find(cell);
    if (i == FeedbackMap::npos || fb.at_junction[i]) continue;
    fb.grid->center(cell, c);
    const double d = fb.grid->point_distance_cells(c, pt);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

struct LegSearch {
  const FeedbackMap& fb;
  const std::vector<Vec>& goals;
  double accept;
  std::size_t max_steps;
  std::size_t budget = 200000;
  LegRun run{};
  SampledLeg deepest{};
  std::string failure{};

  bool done(const TrafficState& s) const {
    return s.d <= fb.zero_tolerance && spatial_detector(goals, s.p) <= accept + 1e-9;
  }

  // Depth-first over admissible celerities, nearest goal first.
  bool search(const TrafficState& s, std::size_t depth) {
    if (run.leg.size() > deepest.size()) deepest = run.leg;
    if (s.d <= fb.zero_tolerance) {
      if (done(s)) return true;
      failure = "the duration vanished away from every junction position";
      return false;
    }
    if (depth >= max_steps || budget == 0) {
      failure = "search budget exhausted";
      return false;
    }
    --budget;
    const auto i = lookup(fb, s);
    if (!i) {
      failure = "the mobile left the viable set at t=" + format_double(s.t);
      return false;
    }
    const auto adm = fb.admissible(*i);
    if (adm.empty()) {
      failure = "no admissible celerity at t=" + format_double(s.t);
      return false;
    }
    std::vector<Vec> samples;
    fb.leg.surge.samples(s, samples);
    struct Option {
      double dist;
      std::size_t order;
      TrafficState next;
      Vec c;
    };
    std::vector<Option> opts;
    for (auto c : adm) {
      std::uint32_t f = 0;
      for (const auto& w : fb.witnesses[*i])
        if (w.first == c) {
          f = w.second;
          break;
        }
      const Vec cel = fb.leg.celerity_at(s, c);
      TrafficState next = leg_step(fb.side, s, cel, samples[f], fb.step, fb.leg.phi);
      opts.push_back({spatial_detector(goals, next.p), opts.size(), std::move(next), cel});
    }
    std::stable_sort(opts.begin(), opts.end(), [](const Option& a, const Option& b) {
      return a.dist < b.dist - 1e-12;
    });
    for (auto& o : opts) {
      run.leg.celerity.push_back(o.c);
      run.leg.time.push_back(double(depth + 1) * fb.step);
      run.leg.states.push_back(o.next);
      if (search(o.next, depth + 1)) return true;
      run.leg.celerity.pop_back();
      run.leg.time.pop_back();
      run.leg.states.pop_back();
    }
    return false;
  }
};

LegRun run_leg(const FeedbackMap& fb, const TrafficState& start, const std::vector<Vec>& goals,
               double accept, std::size_t max_steps) {
  LegSearch ls{fb, goals, accept, max_steps};
  ls.run.leg.time.push_back(0.0);
  ls.run.leg.states.push_back(start);
  ls.run.reached = ls.search(start, 0);
  if (!ls.run.reached) throw SynthesisFailure(ls.failure, ls.deepest);
  return ls.run;
}

double position_tolerance(const GridSpec& g) {
  double tol = 0.0;
  for (std::size_t i = 0; i < g.p_dim(); ++i) tol = std::max(tol, g.axis(2 + i).width());
  return tol;
}

double endpoint_distance(const GridSpec& g, const JunctionEndpoint& e, const TrafficState& s) {
  const Vec a = g.point(e.state());
  Vec b = g.point(s);
  b[1] = 0.0;
  return g.point_distance_cells(a, b);
}

}  // namespace

TransportEvolution synthesize(const TrafficState& dep, const TrafficState& arr, const KernelResult& kernel,
                              const FeedbackMap& fb_in, const FeedbackMap& fb_ou,
                              const JunctionRelation& junction) {
  if (kernel.mode != Mode::product) throw Error(ErrorKind::mode, "synthesis needs a product-mode kernel");
  if (!kernel_membership(kernel, dep, arr, junction, kernel.fluidities))
    throw Error(ErrorKind::not_in_kernel, "departure and arrival are not linked by the kernel");
  const GridSpec& g = *kernel.traffic;
  const std::size_t limit = 4 * (g.axis(0).count + g.axis(1).count) + 8;

  std::vector<Vec> pre_goals;
  for (const auto& pr : junction.pairs()) pre_goals.push_back(pr.pre.pi);
  const double accept = position_tolerance(g);
  const LegRun in = run_leg(fb_in, dep, pre_goals, accept, limit);
  SampledLeg in_leg = in.leg;
  for (double& t : in_leg.time) t += dep.t;

  std::vector<std::size_t> candidates;
  std::vector<Vec> post_goals;
  for (std::size_t k = 0; k < junction.pairs().size(); ++k) {
    if (endpoint_distance(g, junction.pairs()[k].pre, in_leg.states.back()) <= 2.0 + 1e-9) {
      candidates.push_back(k);
      post_goals.push_back(junction.pairs()[k].post.pi);
    }
  }
  if (candidates.empty()) throw SynthesisFailure("no junction pair near the reached prejunction state", in_leg);

  LegRun ou;
  try {
    ou = run_leg(fb_ou, arr, post_goals, accept, limit);
  } catch (const SynthesisFailure& e) {
    throw SynthesisFailure(std::string("outgoing leg: ") + e.what(), in_leg);
  }

  std::size_t best = candidates.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k : candidates) {
    const auto& pr = junction.pairs()[k];
    const double d = std::max(endpoint_distance(g, pr.pre, in_leg.states.back()),
                              endpoint_distance(g, pr.post, ou.leg.states.back()));
    if (d < best_d - 1e-12) {
      best_d = d;
      best = k;
    }
  }
  if (best_d > 2.0 + 1e-9) throw SynthesisFailure("no junction pair near both reached states", in_leg);

  TransportEvolution evo;
  evo.omega = dep.d / kernel.fluidities.phi_in;
  evo.step = kernel.step;
  evo.junction = junction.pairs()[best];
  evo.incoming = std::move(in_leg);
  evo.outgoing = reverse_outgoing(ou.leg, arr.t);
  return evo;
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const VerificationCheck* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double axis_tolerance(const GridSpec& g, std::size_t axis) {
  const double w = g.axis(axis).width();
  return w > 0.0 ? w : 1e-9;
}

double distance_to_monad(const GridSpec& g, const CellSet& monad, const TrafficState& s) {
  const auto cell = g.locate(g.point(s));
  if (!cell) return std::numeric_limits<double>::infinity();
  if (monad.test(*cell)) return 0.0;
  std::size_t best = std::numeric_limits<std::size_t>::max();
  monad.for_each([&](std::size_t m) { best = std::min(best, g.cell_distance(*cell, m)); });
  return best == std::numeric_limits<std::size_t>::max() ? std::numeric_limits<double>::infinity() : double(best);
}

}  // namespace

VerificationReport verify_evolution(const TransportEvolution& evo, const Scenario& s, const KernelResult* kernel) {
  VerificationReport rep;
  const GridSpec& g = *s.grid;
  const std::size_t p_dim = g.p_dim();
  auto add = [&](std::string name, double residual, double tol) {
    rep.checks.push_back({std::move(name), residual <= tol + 1e-9, residual, tol});
  };
  if (evo.incoming.states.empty() || evo.outgoing.states.empty()) {
    add("well_formed", 1.0, 0.0);
    return rep;
  }
  const TrafficState& dep = evo.incoming.states.front();
  const TrafficState& pre = evo.incoming.states.back();
  const TrafficState& post = evo.outgoing.states.front();
  const TrafficState& arr = evo.outgoing.states.back();
  const double tol_d = axis_tolerance(g, 1);
  const Fluidities& fl = s.fluidities;

  add("duration_in", std::abs(dep.d - fl.phi_in * evo.omega), tol_d);
  add("duration_ou", std::abs(arr.d - fl.phi_ou * evo.omega), tol_d);
  add("zero_in", pre.d, s.zero_tolerance());
  add("zero_ou", post.d, s.zero_tolerance());

  double tol_p = 0.0;
  for (std::size_t i = 0; i < p_dim; ++i) tol_p = std::max(tol_p, axis_tolerance(g, 2 + i));
  Vec sum_in = dep.p, sum_ou = arr.p;
  for (const Vec& c : evo.incoming.celerity)
    for (std::size_t i = 0; i < p_dim; ++i) sum_in[i] += evo.step * c[i];
  for (const Vec& c : evo.outgoing.celerity)
    for (std::size_t i = 0; i < p_dim; ++i) sum_ou[i] -= evo.step * c[i];
  add("position_in", max_abs_diff(evo.junction.pre.pi, sum_in), tol_p);
  add("position_ou", max_abs_diff(evo.junction.post.pi, sum_ou), tol_p);

  double tol_x = 1e-9;
  for (std::size_t i = 0; i < g.m_dim(); ++i) tol_x = std::max(tol_x, axis_tolerance(g, 2 + p_dim + i));
  add("monad_in", max_abs_diff(evo.junction.pre.xi, pre.x), tol_x);
  add("monad_ou", max_abs_diff(evo.junction.post.xi, post.x), tol_x);
  add("date_in", std::abs(evo.junction.pre.sigma - pre.t), axis_tolerance(g, 0));
  add("date_ou", std::abs(evo.junction.post.sigma - post.t), axis_tolerance(g, 0));

  double viab = 0.0;
  for (const auto* leg : {&evo.incoming, &evo.outgoing})
    for (const auto& st : leg->states) viab = std::max(viab, distance_to_monad(g, s.monad, st));
  rep.viability_residual = viab;
  add("viability", viab, 1.0);

  if (kernel && kernel->mode == Mode::product && safety_check(s.monad)) {
    const Decomposition dec = decompose(ProductTransport{kernel->basin_in, kernel->basin_ou}, s.junction);
    double misses = 0.0;
    for (const auto& st : evo.incoming.states) {
      if (st.t >= dec.in_threshold) continue;
      const auto cell = g.locate(g.point(st));
      if (!cell || !dec.q_in.test(*cell)) misses += 1.0;
    }
    for (const auto& st : evo.outgoing.states) {
      if (st.t <= dec.ou_threshold) continue;
      const auto cell = g.locate(g.point(st));
      if (!cell || !dec.q_ou.test(*cell)) misses += 1.0;
    }
    add("decomposable", misses, 0.0);
  }
  return rep;
}

MonadTrajectory concatenate(const TransportEvolution& evo, const VerificationReport& report) {
  if (!report.passed()) throw Error(ErrorKind::unverified, "refusing to concatenate an unverified evolution");
  MonadTrajectory m;
  for (const auto& st : evo.incoming.states) m.incoming.push_back({st.t, st.x});
  for (const auto& st : evo.outgoing.states) m.outgoing.push_back({st.t, st.x});
  m.jump_begin = evo.junction.pre.sigma;
  m.jump_end = evo.junction.post.sigma;
  m.jump_label = std::abs(m.jump_end - m.jump_begin) <= 1e-12 ? "impulsive" : "intermodal";
  return m;
}

namespace {

void row(std::ostream& os, const char* leg, const TrafficState& s, const Vec& c, std::size_t p_dim) {
  os << leg << ',' << format_double(s.t) << ',' << format_double(s.d);
  for (double v : s.p) os << ',' << format_double(v);
  for (double v : s.x) os << ',' << format_double(v);
  for (std::size_t i = 0; i < p_dim; ++i) os << ',' << format_double(i < c.size() ? c[i] : 0.0);
  os << '\n';
}

void leg_rows(std::ostream& os, const char* name, const SampledLeg& leg, std::size_t p_dim) {
  for (std::size_t k = 0; k < leg.states.size(); ++k) {
    const Vec none;
    const Vec& c = k < leg.celerity.size() ? leg.celerity[k] : leg.celerity.empty() ? none : leg.celerity.back();
    row(os, name, leg.states[k], c, p_dim);
  }
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const TransportEvolution& evo) {
  const std::size_t p_dim = evo.junction.pre.pi.size(), m_dim = evo.junction.pre.xi.size();
  os << "leg,t,d";
  for (std::size_t i = 0; i < p_dim; ++i) os << ",p" << i;
  for (std::size_t i = 0; i < m_dim; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < p_dim; ++i) os << ",c" << i;
  os << '\n';
  leg_rows(os, "in", evo.incoming, p_dim);
  row(os, "jump", evo.junction.pre.state(), {}, p_dim);
  row(os, "jump", evo.junction.post.state(), {}, p_dim);
  leg_rows(os, "ou", evo.outgoing, p_dim);
}

void write_report(std::ostream& os, const VerificationReport& report) {
  for (const auto& c : report.checks)
    os << c.name << ' ' << (c.pass ? "pass" : "fail") << " residual=" << format_double(c.residual)
       << " tolerance=" << format_double(c.tolerance) << '\n';
  os << "viability_residual=" << format_double(report.viability_residual) << '\n'
     << "verified=" << (report.passed() ? "true" : "false") << '\n';
}

}  // namespace viaduct
