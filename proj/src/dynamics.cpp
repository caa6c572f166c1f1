#include "viaduct/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "viaduct/error.hpp"

namespace viaduct {

namespace {

// Endpoint-inclusive lattice of n points on [lo, hi].
double lattice_point(double lo, double hi, std::size_t n, std::size_t k) {
  if (n == 1) return lo;
  if (k + 1 == n) return hi;
  return lo + (hi - lo) * double(k) / double(n - 1);
}

void product_lattice(const Vec& lo, const Vec& hi, std::size_t n, std::vector<Vec>& out) {
  const std::size_t dim = lo.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < dim; ++i) total *= n;
  std::vector<std::size_t> pos(dim, 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rest = s;
    for (std::size_t i = dim; i-- > 0;) {
      pos[i] = rest % n;
      rest /= n;
    }
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = lattice_point(lo[i], hi[i], n, pos[i]);
    out.push_back(std::move(v));
  }
}

}  // namespace

SurgeField SurgeField::constant_field(Vec value) {
  SurgeField f;
  f.kind = SurgeKind::constant;
  f.value = std::move(value);
  return f;
}

SurgeField SurgeField::interval_field(Vec lo, Vec hi, std::size_t samples_per_axis) {
  SurgeField f;
  f.kind = SurgeKind::interval;
  f.lo = std::move(lo);
  f.hi = std::move(hi);
  f.samples_per_axis = samples_per_axis;
  return f;
}

std::size_t SurgeField::m_dim() const {
  switch (kind) {
    case SurgeKind::constant: return value.size();
    case SurgeKind::interval: return lo.size();
    case SurgeKind::affine: return offset.size();
  }
  return 0;
}

std::size_t SurgeField::sample_count() const {
  if (kind != SurgeKind::interval) return 1;
  std::size_t n = 1;
  for (std::size_t i = 0; i < lo.size(); ++i) n *= samples_per_axis;
  return n;
}

void SurgeField::samples(const TrafficState& s, std::vector<Vec>& out) const {
  out.clear();
  switch (kind) {
    case SurgeKind::constant:
      out.push_back(value);
      return;
    case SurgeKind::interval:
      product_lattice(lo, hi, samples_per_axis, out);
      return;
    case SurgeKind::affine: {
      Vec f(offset.size());
      for (std::size_t j = 0; j < f.size(); ++j) {
        double v = offset[j] + coef_t[j] * s.t + coef_d[j] * s.d;
        for (std::size_t i = 0; i < s.p.size(); ++i) v += coef_p[j][i] * s.p[i];
        for (std::size_t i = 0; i < s.x.size(); ++i) v += coef_x[j][i] * s.x[i];
        f[j] = v;
      }
      out.push_back(std::move(f));
      return;
    }
  }
}

void SurgeField::validate(std::size_t p_dim, std::size_t m_dim_expected) const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::validation, "surge: " + msg); };
  if (m_dim() != m_dim_expected) fail("dimension does not match the monad dimension");
  switch (kind) {
    case SurgeKind::constant:
      break;
    case SurgeKind::interval:
      if (hi.size() != lo.size()) fail("interval bounds differ in length");
      if (samples_per_axis < 1) fail("samples must be >= 1");
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) fail("interval lower bound exceeds upper bound");
        if (samples_per_axis == 1 && lo[i] != hi[i])
          fail("a non-degenerate interval needs at least 2 samples");
      }
      break;
    case SurgeKind::affine:
      if (coef_t.size() != m_dim_expected || coef_d.size() != m_dim_expected ||
          coef_p.size() != m_dim_expected || coef_x.size() != m_dim_expected)
        fail("affine coefficients need one row per monad component");
      for (const Vec& row : coef_p)
        if (row.size() != p_dim) fail("affine position coefficients need p_dim columns");
      for (const Vec& row : coef_x)
        if (row.size() != m_dim_expected) fail("affine monad coefficients need m_dim columns");
      break;
  }
}

std::vector<Vec> surge_samples(const SurgeField& field, const TrafficState& s, const GridSpec& grid) {
  grid.cell_of(s);
  std::vector<Vec> out;
  field.samples(s, out);
  return out;
}

void CelerityBounds::validate(std::size_t p_dim) const {
  if (lo.size() != p_dim || hi.size() != p_dim)
    throw Error(ErrorKind::validation, "celerity bounds need one interval per position axis");
  if (samples < 2) throw Error(ErrorKind::validation, "celerity samples must be >= 2");
  for (std::size_t i = 0; i < p_dim; ++i)
    if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw Error(ErrorKind::validation, "celerity interval needs c_min <= c_max");
}

std::vector<Vec> CelerityBounds::lattice() const {
  std::vector<Vec> out;
  product_lattice(lo, hi, samples, out);
  return out;
}

TrafficState euler_step_incoming(const TrafficState& s, std::span<const double> c,
                                 std::span<const double> f, double h, double phi_in) {
  TrafficState n;
  n.t = s.t + h;
  n.d = std::max(0.0, s.d - phi_in * h);
  n.p.resize(s.p.size());
  n.x.resize(s.x.size());
  for (std::size_t i = 0; i < s.p.size(); ++i) n.p[i] = s.p[i] + h * c[i];
  for (std::size_t i = 0; i < s.x.size(); ++i) n.x[i] = s.x[i] + h * f[i];
  return n;
}

TrafficState aux_step_outgoing(const TrafficState& s, std::span<const double> gamma,
                               std::span<const double> f, double h, double phi_ou) {
  TrafficState n;
  n.t = s.t - h;
  n.d = std::max(0.0, s.d - phi_ou * h);
  n.p.resize(s.p.size());
  n.x.resize(s.x.size());
  for (std::size_t i = 0; i < s.p.size(); ++i) n.p[i] = s.p[i] - h * gamma[i];
  for (std::size_t i = 0; i < s.x.size(); ++i) n.x[i] = s.x[i] - h * f[i];
  return n;
}

AuxPair aux_step(const AuxPair& pair, std::span<const double> gamma_in,
                 std::span<const double> gamma_ou, std::span<const double> f_in,
                 std::span<const double> f_ou, double h, const Fluidities& fl) {
  if (!(h > 0.0)) throw Error(ErrorKind::validation, "auxiliary step needs h > 0");
  return AuxPair{euler_step_incoming(pair.in, gamma_in, f_in, h, fl.phi_in),
                 aux_step_outgoing(pair.ou, gamma_ou, f_ou, h, fl.phi_ou)};
}

SampledLeg reverse_outgoing(const SampledLeg& aux, double t_ou) {
  if (aux.states.empty()) throw Error(ErrorKind::empty_input, "cannot reverse an empty trajectory");
  if (aux.time.size() != aux.states.size() ||
      aux.celerity.size() + 1 != aux.states.size())
    throw Error(ErrorKind::shape, "leg needs one time per sample and one celerity per step");
  SampledLeg out;
  out.time.reserve(aux.time.size());
  for (auto it = aux.time.rbegin(); it != aux.time.rend(); ++it) out.time.push_back(t_ou - *it);
  out.states.assign(aux.states.rbegin(), aux.states.rend());
  out.celerity.assign(aux.celerity.rbegin(), aux.celerity.rend());
  return out;
}

void LegDynamics::refresh() { lattice_ = celerity.lattice(); }

std::size_t LegDynamics::celerity_count() const {
  return celerity_coupling ? 1 : lattice_.size();
}

Vec LegDynamics::celerity_at(const TrafficState& s, std::size_t i) const {
  if (celerity_coupling) return s.x;
  return lattice_.at(i);
}

std::vector<Vec> LegDynamics::celerities(const TrafficState& s) const {
  if (celerity_coupling) return {s.x};
  return lattice_;
}

TrafficState leg_step(Side side, const TrafficState& s, std::span<const double> c,
                      std::span<const double> f, double h, double phi) {
  return side == Side::ou ? aux_step_outgoing(s, c, f, h, phi)
                          : euler_step_incoming(s, c, f, h, phi);
}

}  // namespace viaduct
