#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "viaduct/cellset.hpp"
#include "viaduct/scenario.hpp"
#include "viaduct/solver.hpp"

namespace viaduct {

using CellPair = std::pair<std::size_t, std::size_t>;

struct OracleBudget {
  std::size_t max_cells = 100000;
  double max_sequences = 1e7;
};

/// Linkable (departure cell, arrival cell) pairs of the traffic grid.
struct OracleResult {
  std::vector<CellPair> pairs;  // sorted, unique
  std::size_t horizon = 0;
  std::size_t celerity_samples = 0;
  std::size_t surge_samples = 0;

  bool contains(std::size_t dep, std::size_t arr) const;
};

/// Exhaustive search over control sequences of at most `horizon` steps per
/// leg, with the solver's integrator and dilated successor cells. Memoized
/// on (cell, steps left); identical to plain enumeration. Coupled scenarios
/// search joint sequences on the reduced grid, whose aperture and time sum
/// axes are not dilated, and keep traffic pairs whose reduced cell is reached.
OracleResult brute_force_kernel(const Scenario& s, std::size_t horizon, const OracleBudget& budget = {});

struct WitnessStep {
  std::size_t control = 0;  // celerity control / surge_count, surge control % surge_count
  std::size_t cell = 0;     // chosen member of the dilated successor set
};

/// Step sequence of exactly `steps` steps from `start` to `goal` on one leg,
/// if any.
std::optional<std::vector<WitnessStep>> oracle_witness(const Scenario& s, Side side, std::size_t start,
                                                       std::size_t goal, std::size_t steps);
/// Cell reached by replaying a witness through the dynamics; nullopt when a
/// step is not a dilated successor inside the monad relation.
std::optional<std::size_t> replay(const Scenario& s, Side side, std::size_t start,
                                  const std::vector<WitnessStep>& steps);

struct DiffStats {
  std::size_t agreements = 0;
  std::size_t oracle_only = 0;
  std::size_t kernel_only = 0;
  std::size_t hard_failures = 0;
  std::vector<CellPair> missing;  // oracle pairs absent from the kernel
  std::vector<CellPair> far;      // kernel-only pairs beyond the margin

  bool ok() const { return hard_failures == 0; }
};

/// Kernel member pairs of the traffic grid, enumerated through
/// kernel_membership on node states.
std::vector<CellPair> kernel_pairs(const KernelResult& kernel, const Scenario& s);

/// Oracle pairs missing from the kernel, and kernel-only pairs farther than
/// dilation_radius + 1 cells (Chebyshev over both cells) from every oracle
/// pair, are hard failures.
DiffStats compare(const KernelResult& kernel, const OracleResult& oracle, const Scenario& s);
DiffStats compare_pairs(const std::vector<CellPair>& kernel, const std::vector<CellPair>& oracle,
                        const GridSpec& grid, int dilation_radius);

/// States reachable forward in real time from the postjunction states under
/// (t + h, d + phi_ou h, p + h c, x + h f) without leaving the monad
/// relation; nearest-node snapping.
CellSet forward_outgoing_reach(const Scenario& s);

/// One `dep,arr` line per pair.
void write_oracle_pairs(std::ostream& os, const OracleResult& r);
std::vector<CellPair> read_oracle_pairs(std::istream& is);

}  // namespace viaduct
