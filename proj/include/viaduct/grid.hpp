#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viaduct/core.hpp"

namespace viaduct {

enum class AxisRole {
  time,
  duration,
  position,
  monad,
  // reduced paired axes of the coupled kernel
  aperture,
  time_in,
  time_sum,
  position_in,
  monad_in,
  position_ou,
  monad_ou,
};

/// Uniform lattice of `count` nodes spanning [lo, hi] (both included). A
/// degenerate axis has lo == hi and a single node.
struct Axis {
  AxisRole role = AxisRole::time;
  std::size_t component = 0;
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;

  bool degenerate() const { return count == 1; }
  double width() const { return degenerate() ? 0.0 : (hi - lo) / double(count - 1); }
  double node(std::size_t i) const { return lo + double(i) * width(); }
  std::string name() const;

  bool operator==(const Axis&) const = default;
};

std::optional<Axis> axis_from_name(const std::string& name);

/// Multi-axis node lattice. Cells are numbered row-major with the first axis
/// (time, or aperture for reduced grids) slowest.
class GridSpec {
 public:
  static constexpr std::size_t kMaxRank = 16;
  static constexpr int kMaxDilation = 8;

  GridSpec() = default;
  explicit GridSpec(std::vector<Axis> axes);

  /// Axes (t, d, p..., x...) of a traffic grid.
  static GridSpec traffic(Axis t, Axis d, std::vector<Axis> p, std::vector<Axis> x);

  std::size_t rank() const { return axes_.size(); }
  std::size_t size() const { return size_; }
  const Axis& axis(std::size_t i) const { return axes_[i]; }
  std::span<const Axis> axes() const { return axes_; }
  std::size_t stride(std::size_t i) const { return strides_[i]; }

  /// Only for traffic grids.
  std::size_t p_dim() const { return p_dim_; }
  std::size_t m_dim() const { return m_dim_; }
  bool is_traffic() const { return traffic_; }

  std::size_t flatten(std::span<const std::size_t> idx) const;
  void unflatten(std::size_t cell, std::span<std::size_t> idx) const;
  std::size_t axis_index(std::size_t cell, std::size_t axis) const {
    return (cell / strides_[axis]) % axes_[axis].count;
  }

  /// Node coordinates of a cell.
  void center(std::size_t cell, std::span<double> out) const;
  Vec center(std::size_t cell) const;

  /// Nearest node index on one axis (ties round up), or nullopt when the
  /// value lies more than half a cell outside the axis range.
  std::optional<std::size_t> nearest(std::size_t axis, double value) const;
  std::optional<std::size_t> locate(std::span<const double> point) const;

  /// Nearest node plus all nodes within radius/2 cell widths of `point` on
  /// every axis, as flattened cells appended to `out`. Axes set in
  /// `exact_mask` are not dilated. Returns false (and appends nothing) when
  /// the point is outside the grid.
  bool dilated(std::span<const double> point, int radius, std::vector<std::size_t>& out,
               std::uint32_t exact_mask = 0) const;

  /// Chebyshev distance in cell units between two cells.
  std::size_t cell_distance(std::size_t a, std::size_t b) const;

  /// Largest per-axis |a_i - b_i| / width_i for two points.
  double point_distance_cells(std::span<const double> a, std::span<const double> b) const;

  // Traffic-grid helpers.
  Vec point(const TrafficState& s) const;
  TrafficState state(std::span<const double> point) const;
  TrafficState state_of(std::size_t cell) const;
  /// Throws ErrorKind::bounds if the state is outside the grid.
  std::size_t cell_of(const TrafficState& s) const;
  std::size_t duration_index(std::size_t cell) const { return axis_index(cell, 1); }

  bool operator==(const GridSpec& other) const { return axes_ == other.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  std::size_t p_dim_ = 0;
  std::size_t m_dim_ = 0;
  bool traffic_ = false;
};

}  // namespace viaduct
