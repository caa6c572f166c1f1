#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "viaduct/cellset.hpp"
#include "viaduct/dynamics.hpp"
#include "viaduct/params.hpp"
#include "viaduct/relations.hpp"
#include "viaduct/scenario.hpp"

namespace viaduct {

/// Controlled one-step transitions over a grid. Implementations must be safe
/// to call concurrently.
class TransitionSystem {
 public:
  virtual ~TransitionSystem() = default;

  virtual const GridPtr& grid() const = 0;
  virtual std::size_t control_count() const = 0;
  /// Appends the dilated successor cells of `cell` under `control`. Nothing
  /// is appended when the successor leaves the grid.
  virtual void successors(std::size_t cell, std::size_t control,
                          std::vector<std::size_t>& out) const = 0;
  /// Cells with no successors at all.
  virtual bool terminal(std::size_t /*cell*/) const { return false; }
};

/// Explicit successor table, mostly for tests: successors(cell, k).
class FunctionTransitions : public TransitionSystem {
 public:
  using Fn = std::function<std::vector<std::size_t>(std::size_t cell, std::size_t control)>;

  FunctionTransitions(GridPtr grid, std::size_t controls, Fn fn)
      : grid_(std::move(grid)), controls_(controls), fn_(std::move(fn)) {}

  const GridPtr& grid() const override { return grid_; }
  std::size_t control_count() const override { return controls_; }
  void successors(std::size_t cell, std::size_t control, std::vector<std::size_t>& out) const override {
    for (std::size_t c : fn_(cell, control)) out.push_back(c);
  }

 private:
  GridPtr grid_;
  std::size_t controls_;
  Fn fn_;
};

/// One leg of the auxiliary system on a traffic grid. Control k is
/// (celerity k / surge_count, surge k % surge_count).
class LegTransitions : public TransitionSystem {
 public:
  LegTransitions(GridPtr grid, LegDynamics leg, Side side, double step, double zero_tolerance,
                 int dilation_radius);

  const GridPtr& grid() const override { return grid_; }
  std::size_t control_count() const override { return celerities_ * surges_; }
  void successors(std::size_t cell, std::size_t control, std::vector<std::size_t>& out) const override;
  bool terminal(std::size_t cell) const override;

  std::size_t celerity_count() const { return celerities_; }
  std::size_t surge_count() const { return surges_; }
  const LegDynamics& leg() const { return leg_; }
  Side side() const { return side_; }
  double step() const { return step_; }

  /// Real (unsnapped) successor of a state.
  TrafficState successor(const TrafficState& s, std::size_t celerity, std::size_t surge) const;

 private:
  GridPtr grid_;
  LegDynamics leg_;
  Side side_;
  double step_;
  double zero_tolerance_;
  int radius_;
  std::size_t celerities_;
  std::size_t surges_;
};

/// Reduced paired axes (omega, tau_in, tau_sum, p_in.., x_in.., p_ou.., x_ou..)
/// built from a traffic grid. The omega axis runs to the fewest Euler steps
/// that empty the longest duration on either side.
GridSpec reduced_grid(const GridSpec& traffic, const Fluidities& fl, double step, double zero_tolerance);

/// A reduced cell expanded into its incoming and outgoing traffic states.
TransportState expand_reduced(const GridSpec& reduced, std::size_t cell, const Fluidities& fl);

/// Both halves of the auxiliary system on the reduced grid. Control k is the
/// joint index ((ci_in * ns_in + si_in) * n_ou + (ci_ou * ns_ou + si_ou)).
class CoupledTransitions : public TransitionSystem {
 public:
  CoupledTransitions(GridPtr reduced, const Scenario& scenario);

  const GridPtr& grid() const override { return grid_; }
  std::size_t control_count() const override { return n_in_ * n_ou_; }
  void successors(std::size_t cell, std::size_t control, std::vector<std::size_t>& out) const override;
  bool terminal(std::size_t cell) const override { return grid_->axis_index(cell, 0) == 0; }

  std::size_t in_controls() const { return n_in_; }
  std::size_t ou_controls() const { return n_ou_; }
  const LegDynamics& leg(Side side) const { return side == Side::ou ? ou_ : in_; }
  AuxPair successor(const AuxPair& s, std::size_t control) const;

 private:
  GridPtr grid_;
  LegDynamics in_, ou_;
  Fluidities fl_;
  double step_;
  int radius_;
  std::size_t n_in_, n_ou_;
};

struct BasinResult {
  CellSet cells;
  std::size_t iterations = 0;
  bool fixed_point_reached = false;
};

/// Least fixed point of C_{k+1} = C_k u {c in M : some control has a
/// successor in C_k}, starting from target n M. Generations are computed in
/// full (Jacobi) so the result does not depend on the thread count.
BasinResult capture_basin(const TransitionSystem& ts, const CellSet& monad, const CellSet& target,
                          const SolverParams& params);

struct KernelResult {
  Mode mode = Mode::product;
  CellSet basin_in;
  CellSet basin_ou;
  CellSet basin_pair;
  std::size_t iterations = 0;
  bool fixed_point_reached = false;
  // What membership queries need besides the sets.
  double step = 0.0;
  double zero_tolerance = 0.0;
  double aperture_tolerance = 0.0;
  int dilation_radius = 0;
  Fluidities fluidities;
  GridPtr traffic;
};

BasinResult incoming_basin(const Scenario& s);
BasinResult outgoing_basin(const Scenario& s);
/// Reduced grid with its monad relation and junction targets. A reduced cell
/// is in the monad relation when both expanded states are, durations phi * omega
/// clamped to the top of the duration axis.
struct ReducedSystem {
  GridPtr grid;
  CellSet monad;
  CellSet target;
};
ReducedSystem reduced_system(const Scenario& s);

/// Capture basin on the reduced grid plus the reduced monad relation.
BasinResult coupled_kernel(const Scenario& s, CellSet* reduced_monad = nullptr);

KernelResult solve(const Scenario& s);

/// Reduced cell of a (departure, arrival) pair, or nullopt when the pair is
/// definitionally outside (aperture mismatch, off the reduced grid).
std::optional<std::size_t> reduce_pair(const GridSpec& reduced, const TrafficState& dep,
                                       const TrafficState& arr, const KernelResult& result);

bool kernel_membership(const KernelResult& result, const TrafficState& dep, const TrafficState& arr,
                       const JunctionRelation& junction, const Fluidities& fluidities);

/// `kernel.meta` plus `kernel_in.cells`/`kernel_ou.cells` (product) or
/// `kernel_pair.cells` (coupled) in `dir`.
void write_kernel(const std::string& dir, const KernelResult& result);
KernelResult read_kernel(const std::string& dir);

}  // namespace viaduct
