#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "viaduct/dynamics.hpp"
#include "viaduct/error.hpp"
#include "viaduct/regulator.hpp"
#include "viaduct/relations.hpp"
#include "viaduct/scenario.hpp"
#include "viaduct/solver.hpp"

namespace viaduct {

/// Incoming leg on [T_in, T_in + omega] and outgoing leg on
/// [T_ou - omega, T_ou], both in increasing real time.
struct TransportEvolution {
  double omega = 0.0;
  double step = 0.0;
  JunctionPair junction;
  SampledLeg incoming;
  SampledLeg outgoing;
};

/// Thrown on a dead end; carries what was simulated so far.
class SynthesisFailure : public Error {
 public:
  SynthesisFailure(const std::string& what, SampledLeg partial)
      : Error(ErrorKind::synthesis_failure, what), partial_(std::move(partial)) {}
  const SampledLeg& partial() const { return partial_; }

 private:
  SampledLeg partial_;
};

TransportEvolution synthesize(const TrafficState& dep, const TrafficState& arr, const KernelResult& kernel,
                              const FeedbackMap& fb_in, const FeedbackMap& fb_ou,
                              const JunctionRelation& junction);

struct VerificationCheck {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  /// Largest distance, in cells, from a sample to the monad relation.
  double viability_residual = 0.0;

  bool passed() const;
  const VerificationCheck* find(const std::string& name) const;
};

/// With a product-mode kernel and a safe monad relation, the decomposable
/// case is checked as well.
VerificationReport verify_evolution(const TransportEvolution& evo, const Scenario& s,
                                    const KernelResult* kernel = nullptr);

struct MonadSample {
  double t = 0.0;
  Vec x;
};

struct MonadTrajectory {
  std::vector<MonadSample> incoming;
  std::vector<MonadSample> outgoing;
  double jump_begin = 0.0;  // prejunction date
  double jump_end = 0.0;    // postjunction date
  std::string jump_label;   // impulsive or intermodal
};

/// Throws ErrorKind::unverified unless `report` passed.
MonadTrajectory concatenate(const TransportEvolution& evo, const VerificationReport& report);

/// `leg,t,d,p0..,x0..,c0..`; the jump is two rows, prejunction then
/// postjunction, with zero celerity.
void write_trajectory_csv(std::ostream& os, const TransportEvolution& evo);
void write_report(std::ostream& os, const VerificationReport& report);

}  // namespace viaduct
