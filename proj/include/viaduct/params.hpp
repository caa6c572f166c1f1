#pragma once

#include <cstddef>

namespace viaduct {

struct SolverParams {
  /// Successor dilation, counted in half cell widths around the Euler image:
  /// 0 keeps only the nearest node, 1 adds tie partners, 2 a one-cell ball.
  int dilation_radius = 1;
  std::size_t max_iterations = 100000;
  /// Durations at most this far from zero count as zero; negative selects
  /// half a duration cell.
  double duration_zero_tolerance = -1.0;
  /// Largest admissible |D_in/phi_in - D_ou/phi_ou|; negative selects one
  /// duration cell.
  double aperture_tolerance = -1.0;
  /// Largest grid the solver accepts; 0 selects the default (or the
  /// VIADUCT_CELL_BUDGET environment variable).
  std::size_t cell_budget = 0;
  /// Worker threads; 0 uses every hardware thread.
  unsigned threads = 0;

  void validate() const;
  std::size_t effective_budget() const;
  unsigned effective_threads() const;
};

inline constexpr std::size_t kDefaultCellBudget = 50'000'000;

}  // namespace viaduct
