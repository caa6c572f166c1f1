#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "viaduct/cellset.hpp"
#include "viaduct/dynamics.hpp"
#include "viaduct/scenario.hpp"
#include "viaduct/solver.hpp"

namespace viaduct {

/// Admissible celerity feedback of one leg, defined on the basin cells.
/// witnesses[i] lists the (celerity, surge) sample pairs whose dilated
/// successor from cells[i] stays in the basin.
struct FeedbackMap {
  using Witness = std::pair<std::uint32_t, std::uint32_t>;

  Side side = Side::in;
  GridPtr grid;
  LegDynamics leg;
  double step = 0.0;
  double zero_tolerance = 0.0;
  int dilation_radius = 0;
  CellSet domain;
  std::vector<std::size_t> cells;  // sorted
  std::vector<std::vector<Witness>> witnesses;
  std::vector<bool> at_junction;
  /// Capture generation of each cell: 0 at the junction, k when some
  /// witness reaches a cell of smaller rank. Unranked cells hold kNoRank.
  std::vector<std::uint32_t> rank;

  /// Index into `cells`, or npos.
  std::size_t find(std::size_t cell) const;
  /// Sorted distinct celerity indices of entry i.
  std::vector<std::uint32_t> admissible(std::size_t i) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr std::uint32_t kNoRank = static_cast<std::uint32_t>(-1);
};

/// Grid realization of the tangential condition: celerity c is admissible
/// at a basin cell iff some surge sample sends it, dilated, into the basin.
FeedbackMap extract_regulator(const CellSet& basin, const LegTransitions& ts, const SolverParams& params);

/// Both legs of a product-mode kernel.
std::pair<FeedbackMap, FeedbackMap> extract_regulators(const Scenario& s, const KernelResult& kernel);

struct Regulation {
  std::vector<std::uint32_t> indices;
  std::vector<Vec> celerities;
  bool at_junction = false;
};

/// Throws ErrorKind::not_in_kernel outside the basin and ErrorKind::bounds
/// outside the grid.
Regulation regulate(const FeedbackMap& fb, const TrafficState& s);

struct SurgeWitness {
  std::uint32_t celerity_index = 0;
  std::uint32_t surge_index = 0;
  Vec celerity;
  Vec surge;
};

std::vector<SurgeWitness> regulator_differential_view(const FeedbackMap& fb, const TrafficState& s);

/// Basin cell used for feedback at a real state: the dilated set member in
/// the basin nearest to the state (ties to the smaller index).
std::optional<std::size_t> feedback_cell(const FeedbackMap& fb, const TrafficState& s);

struct Rollout {
  std::vector<std::size_t> cells;
  bool reached_zero = false;
  std::string failure;
};

/// Cell-to-cell closed loop from `start`: a random admissible celerity and
/// one of its surge witnesses per step, continuing from the lowest-rank
/// basin cell of the dilated successor set (ties to the nearest).
Rollout closed_loop_rollout(const FeedbackMap& fb, std::size_t start, std::mt19937_64& rng,
                            std::size_t max_steps = 10000);

/// `VIADUCT-FEEDBACK v1`, `side in|ou`, the grid block, then one line per
/// basin cell: `cell: c,c,... ; c/s,c/s,...` (admissible celerity indices,
/// then witnesses). Cells at the junction carry a trailing ` @`.
void write_feedback(std::ostream& os, const FeedbackMap& fb);
/// Dynamics and tolerances come from the scenario, which must match the
/// file's grid.
FeedbackMap read_feedback(std::istream& is, const Scenario& s);
void save_feedback(const std::string& path, const FeedbackMap& fb);
FeedbackMap load_feedback(const std::string& path, const Scenario& s);

}  // namespace viaduct
