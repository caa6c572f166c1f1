#include "viaduct/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "viaduct/error.hpp"

namespace viaduct {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_fluidity: return "invalid-fluidity";
    case ErrorKind::no_junction: return "no-junction";
    case ErrorKind::bounds: return "bounds";
    case ErrorKind::shape: return "shape";
    case ErrorKind::unsupported_representation: return "unsupported-representation";
    case ErrorKind::mode: return "mode";
    case ErrorKind::budget: return "budget";
    case ErrorKind::empty_input: return "empty-input";
    case ErrorKind::not_in_kernel: return "not-in-kernel";
    case ErrorKind::synthesis_failure: return "synthesis-failure";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::io: return "io";
    case ErrorKind::scenario_mismatch: return "scenario-mismatch";
    case ErrorKind::unverified: return "unverified";
  }
  return "unknown";
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void Fluidities::validate() const {
  if (!positive_finite(phi_in))
    throw Error(ErrorKind::invalid_fluidity,
                "incoming fluidity must be positive and finite, got " +
                    std::to_string(phi_in));
  if (!positive_finite(phi_ou))
    throw Error(ErrorKind::invalid_fluidity,
                "outgoing fluidity must be positive and finite, got " +
                    std::to_string(phi_ou));
}

void DurationLaw::validate() const {
  if (a < -1 || a > 1)
    throw Error(ErrorKind::validation, "duration law sign must be -1, 0 or +1");
  if (!positive_finite(phi))
    throw Error(ErrorKind::invalid_fluidity, "duration law fluidity must be > 0");
  if (!std::isfinite(D) || D < 0.0)
    throw Error(ErrorKind::validation, "duration law D must be >= 0");
}

double DurationLaw::aperture() const { return viaduct::aperture(D, phi); }

double duration_value(const DurationLaw& law, double t) {
  return std::max(0.0, law.a * (law.phi * t - law.D));
}

double aperture(double D, double phi) {
  if (!positive_finite(phi))
    throw Error(ErrorKind::invalid_fluidity,
                "aperture needs a positive fluidity, got " + std::to_string(phi));
  if (D < 0.0)
    throw Error(ErrorKind::validation, "aperture needs a non-negative duration");
  return D / phi;
}

double spatial_detector(std::span<const Vec> junction_positions,
                        std::span<const double> p) {
  if (junction_positions.empty())
    throw Error(ErrorKind::no_junction, "spatial detector needs at least one junction");
  double best = std::numeric_limits<double>::infinity();
  for (const Vec& j : junction_positions) {
    if (j.size() != p.size())
      throw Error(ErrorKind::shape, "junction position dimension mismatch");
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) sq += (p[i] - j[i]) * (p[i] - j[i]);
    best = std::min(best, std::sqrt(sq));
  }
  return best;
}

void TrafficState::validate(std::size_t p_dim, std::size_t m_dim) const {
  if (p.size() != p_dim || x.size() != m_dim)
    throw Error(ErrorKind::shape, "traffic state has " + std::to_string(p.size()) +
                                      " positions and " + std::to_string(x.size()) +
                                      " monads, expected " + std::to_string(p_dim) +
                                      " and " + std::to_string(m_dim));
  bool finite = std::isfinite(t) && std::isfinite(d);
  for (double v : p) finite = finite && std::isfinite(v);
  for (double v : x) finite = finite && std::isfinite(v);
  if (!finite) throw Error(ErrorKind::validation, "traffic state has non-finite components");
  if (d < 0.0) throw Error(ErrorKind::validation, "traffic state duration is negative");
}

void TransportState::validate(std::size_t p_dim, std::size_t m_dim) const {
  incoming.validate(p_dim, m_dim);
  outgoing.validate(p_dim, m_dim);
  if (incoming.t > outgoing.t)
    throw Error(ErrorKind::validation, "departure time exceeds arrival time");
}

std::size_t steps_to_zero(double d, double phi, double step, double zero_tolerance) {
  if (d <= zero_tolerance) return 0;
  const double k = (d - zero_tolerance) / (phi * step);
  return static_cast<std::size_t>(std::ceil(k - 1e-9));
}

bool apertures_match(double d_in, double d_ou, const Fluidities& fl, double step,
                     double zero_tolerance, double tolerance) {
  if (steps_to_zero(d_in, fl.phi_in, step, zero_tolerance) !=
      steps_to_zero(d_ou, fl.phi_ou, step, zero_tolerance))
    return false;
  return std::abs(d_in / fl.phi_in - d_ou / fl.phi_ou) <= tolerance + 1e-12;
}

}  // namespace viaduct
