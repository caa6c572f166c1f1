#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "viaduct/core.hpp"
#include "viaduct/grid.hpp"

namespace viaduct {

enum class SurgeKind { constant, interval, affine };

/// Set-valued surge map F(t, d, p, x), realized by a finite sample.
struct SurgeField {
  SurgeKind kind = SurgeKind::constant;
  Vec value;                      // constant
  Vec lo, hi;                     // interval, per monad component
  std::size_t samples_per_axis = 1;
  // affine: f = offset + coef_t t + coef_d d + coef_p p + coef_x x
  Vec offset, coef_t, coef_d;
  std::vector<Vec> coef_p;        // m_dim rows of p_dim
  std::vector<Vec> coef_x;        // m_dim rows of m_dim

  static SurgeField constant_field(Vec value);
  static SurgeField interval_field(Vec lo, Vec hi, std::size_t samples_per_axis);

  std::size_t m_dim() const;
  /// Samples per state; the same for every state.
  std::size_t sample_count() const;
  void samples(const TrafficState& s, std::vector<Vec>& out) const;
  void validate(std::size_t p_dim, std::size_t m_dim) const;

  bool operator==(const SurgeField&) const = default;
};

/// Sample of F at an in-grid state; ErrorKind::bounds otherwise.
std::vector<Vec> surge_samples(const SurgeField& field, const TrafficState& s, const GridSpec& grid);

/// Per-position-axis celerity interval with an endpoint-inclusive lattice.
struct CelerityBounds {
  Vec lo, hi;
  std::size_t samples = 2;

  void validate(std::size_t p_dim) const;
  /// Cartesian lattice, first position component slowest.
  std::vector<Vec> lattice() const;

  bool operator==(const CelerityBounds&) const = default;
};

/// (t + h, max(0, d - phi h), p + h c, x + h f).
TrafficState euler_step_incoming(const TrafficState& s, std::span<const double> c,
                                 std::span<const double> f, double h, double phi_in);

/// Outgoing half of the auxiliary system, integrated forward in auxiliary
/// time: (t - h, max(0, d - phi h), p - h c, x - h f).
TrafficState aux_step_outgoing(const TrafficState& s, std::span<const double> gamma,
                               std::span<const double> f, double h, double phi_ou);

struct AuxPair {
  TrafficState in;
  TrafficState ou;
};

AuxPair aux_step(const AuxPair& pair, std::span<const double> gamma_in,
                 std::span<const double> gamma_ou, std::span<const double> f_in,
                 std::span<const double> f_ou, double h, const Fluidities& fl);

/// Uniformly sampled leg. `time` is the sampling parameter (auxiliary time
/// for auxiliary legs, real time otherwise); `celerity[k]` drives the step
/// from sample k to sample k + 1.
struct SampledLeg {
  std::vector<double> time;
  std::vector<TrafficState> states;
  std::vector<Vec> celerity;

  std::size_t size() const { return states.size(); }
  bool operator==(const SampledLeg&) const = default;
};

/// Maps an auxiliary outgoing leg to real time t = t_ou - s, in increasing
/// real time. An involution.
SampledLeg reverse_outgoing(const SampledLeg& aux, double t_ou);

enum class Side { in, ou, pair };

/// Controls and fluidity of one side of the auxiliary system.
struct LegDynamics {
  double phi = 1.0;
  CelerityBounds celerity;
  SurgeField surge;
  /// The monad is the celerity: the only admissible celerity is x itself.
  bool celerity_coupling = false;

  std::size_t celerity_count() const;
  Vec celerity_at(const TrafficState& s, std::size_t i) const;
  std::vector<Vec> celerities(const TrafficState& s) const;
  std::size_t surge_count() const { return surge.sample_count(); }

  /// Cached lattice; call after changing `celerity`.
  void refresh();

 private:
  std::vector<Vec> lattice_;
};

/// One step of side `side` (in: forward real time, ou: auxiliary time).
TrafficState leg_step(Side side, const TrafficState& s, std::span<const double> c,
                      std::span<const double> f, double h, double phi);

}  // namespace viaduct
