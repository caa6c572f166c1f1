#pragma once

#include <span>
#include <vector>

namespace viaduct {

using Vec = std::vector<double>;

/// Constant incoming and outgoing fluidities (duration units per time unit).
struct Fluidities {
  double phi_in = 1.0;
  double phi_ou = 1.0;

  /// Throws ErrorKind::invalid_fluidity unless both are positive and finite.
  void validate() const;
};

/// Travel duration with constant fluidity: d(t) = max(0, a (phi t - D)).
///
/// a = -1 is an incoming duration (decreases to zero at the aperture
/// D / phi), a = +1 an outgoing one (zero until the aperture, then grows),
/// a = 0 the stationary case.
struct DurationLaw {
  int a = -1;
  double phi = 1.0;
  double D = 0.0;

  void validate() const;
  double aperture() const;
};

double duration_value(const DurationLaw& law, double t);

/// D / phi. Throws ErrorKind::invalid_fluidity for phi <= 0.
double aperture(double D, double phi);

/// Euclidean distance from p to the nearest junction position.
double spatial_detector(std::span<const Vec> junction_positions,
                        std::span<const double> p);

/// One traffic state (time, duration, position, monad).
struct TrafficState {
  double t = 0.0;
  double d = 0.0;
  Vec p;
  Vec x;

  bool operator==(const TrafficState&) const = default;

  void validate(std::size_t p_dim, std::size_t m_dim) const;
};

struct TransportState {
  TrafficState incoming;
  TrafficState outgoing;

  void validate(std::size_t p_dim, std::size_t m_dim) const;
};

/// Apertures agree when the two durations vanish after the same number of
/// clamped Euler steps and the continuous apertures differ by at most
/// `tolerance` time units.
bool apertures_match(double d_in, double d_ou, const Fluidities& fl,
                     double step, double zero_tolerance, double tolerance);

/// Number of clamped Euler steps of length `step` until the duration drops
/// to within `zero_tolerance` of zero.
std::size_t steps_to_zero(double d, double phi, double step,
                          double zero_tolerance);

}  // namespace viaduct
