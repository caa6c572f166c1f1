#include "viaduct/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "viaduct/error.hpp"

namespace viaduct {

namespace {

constexpr double kSnapEps = 1e-9;

const char* role_prefix(AxisRole role) {
  switch (role) {
    case AxisRole::time: return "t";
    case AxisRole::duration: return "d";
    case AxisRole::position: return "p";
    case AxisRole::monad: return "x";
    case AxisRole::aperture: return "omega";
    case AxisRole::time_in: return "tau_in";
    case AxisRole::time_sum: return "tau_sum";
    case AxisRole::position_in: return "p_in";
    case AxisRole::monad_in: return "x_in";
    case AxisRole::position_ou: return "p_ou";
    case AxisRole::monad_ou: return "x_ou";
  }
  return "?";
}

bool is_vector_role(AxisRole role) {
  return role == AxisRole::position || role == AxisRole::monad ||
         role == AxisRole::position_in || role == AxisRole::monad_in ||
         role == AxisRole::position_ou || role == AxisRole::monad_ou;
}

}  // namespace

std::string Axis::name() const {
  std::string n = role_prefix(role);
  if (is_vector_role(role)) n += std::to_string(component);
  return n;
}

std::optional<Axis> axis_from_name(const std::string& name) {
  static constexpr std::array<AxisRole, 11> roles = {
      AxisRole::aperture,    AxisRole::time_in,     AxisRole::time_sum,
      AxisRole::position_in, AxisRole::monad_in,    AxisRole::position_ou,
      AxisRole::monad_ou,    AxisRole::time,        AxisRole::duration,
      AxisRole::position,    AxisRole::monad};
  for (AxisRole role : roles) {
    const std::string prefix = role_prefix(role);
    if (!is_vector_role(role)) {
      if (name == prefix) return Axis{role, 0, 0.0, 1.0, 2};
      continue;
    }
    if (name.size() <= prefix.size() || name.compare(0, prefix.size(), prefix) != 0)
      continue;
    const std::string digits = name.substr(prefix.size());
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    return Axis{role, std::stoul(digits), 0.0, 1.0, 2};
  }
  return std::nullopt;
}

GridSpec::GridSpec(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > kMaxRank)
    throw Error(ErrorKind::shape, "grid rank must be in [1, 16]");
  for (const Axis& a : axes_) {
    if (!std::isfinite(a.lo) || !std::isfinite(a.hi))
      throw Error(ErrorKind::validation, "axis " + a.name() + " has non-finite bounds");
    if (a.count == 1) {
      if (a.lo != a.hi)
        throw Error(ErrorKind::validation,
                    "axis " + a.name() + " with one node needs lo == hi");
    } else if (a.count < 2 || !(a.lo < a.hi)) {
      throw Error(ErrorKind::validation,
                  "axis " + a.name() + " needs lo < hi and at least 2 nodes");
    }
  }
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  for (std::size_t i = axes_.size(); i-- > 0;) {
    strides_[i] = size_;
    if (size_ > std::numeric_limits<std::size_t>::max() / axes_[i].count)
      throw Error(ErrorKind::budget, "grid cell count overflows");
    size_ *= axes_[i].count;
  }

  traffic_ = axes_.size() >= 2 && axes_[0].role == AxisRole::time &&
             axes_[1].role == AxisRole::duration;
  if (traffic_) {
    std::size_t i = 2;
    while (i < axes_.size() && axes_[i].role == AxisRole::position &&
           axes_[i].component == p_dim_) {
      ++p_dim_;
      ++i;
    }
    while (i < axes_.size() && axes_[i].role == AxisRole::monad &&
           axes_[i].component == m_dim_) {
      ++m_dim_;
      ++i;
    }
    traffic_ = i == axes_.size();
    if (traffic_ && axes_[1].lo != 0.0)
      throw Error(ErrorKind::validation, "duration axis must start at 0");
  }
  if (!traffic_) p_dim_ = m_dim_ = 0;
}

GridSpec GridSpec::traffic(Axis t, Axis d, std::vector<Axis> p, std::vector<Axis> x) {
  std::vector<Axis> axes;
  t.role = AxisRole::time;
  t.component = 0;
  d.role = AxisRole::duration;
  d.component = 0;
  axes.push_back(t);
  axes.push_back(d);
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i].role = AxisRole::position;
    p[i].component = i;
    axes.push_back(p[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i].role = AxisRole::monad;
    x[i].component = i;
    axes.push_back(x[i]);
  }
  return GridSpec(std::move(axes));
}

std::size_t GridSpec::flatten(std::span<const std::size_t> idx) const {
  if (idx.size() != axes_.size()) throw Error(ErrorKind::shape, "index rank mismatch");
  std::size_t cell = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= axes_[i].count) throw Error(ErrorKind::bounds, "index out of range");
    cell += idx[i] * strides_[i];
  }
  return cell;
}

void GridSpec::unflatten(std::size_t cell, std::span<std::size_t> idx) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    idx[i] = cell / strides_[i];
    cell -= idx[i] * strides_[i];
  }
}

void GridSpec::center(std::size_t cell, std::span<double> out) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const std::size_t k = cell / strides_[i];
    cell -= k * strides_[i];
    out[i] = axes_[i].node(k);
  }
}

Vec GridSpec::center(std::size_t cell) const {
  Vec out(axes_.size());
  center(cell, out);
  return out;
}

std::optional<std::size_t> GridSpec::nearest(std::size_t axis, double value) const {
  const Axis& a = axes_[axis];
  if (!std::isfinite(value)) return std::nullopt;
  if (a.degenerate()) {
    if (std::abs(value - a.lo) <= kSnapEps * std::max(1.0, std::abs(a.lo))) return 0;
    return std::nullopt;
  }
  const double u = (value - a.lo) / a.width();
  const double n = std::floor(u + 0.5 + kSnapEps);
  if (n < 0.0 || n >= double(a.count)) return std::nullopt;
  return static_cast<std::size_t>(n);
}

std::optional<std::size_t> GridSpec::locate(std::span<const double> point) const {
  if (point.size() != axes_.size()) throw Error(ErrorKind::shape, "point rank mismatch");
  std::size_t cell = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    auto n = nearest(i, point[i]);
    if (!n) return std::nullopt;
    cell += *n * strides_[i];
  }
  return cell;
}

bool GridSpec::dilated(std::span<const double> point, int radius, std::vector<std::size_t>& out,
                       std::uint32_t exact_mask) const {
  constexpr std::size_t kMaxCand = kMaxDilation + 2;
  std::array<std::array<std::size_t, kMaxCand>, kMaxRank> cand;
  std::array<std::size_t, kMaxRank> ncand{};
  const double half = 0.5 * double(radius);
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    auto n = nearest(i, point[i]);
    if (!n) return false;
    const Axis& a = axes_[i];
    if (radius == 0 || a.degenerate() || (exact_mask >> i) & 1u) {
      cand[i][0] = *n;
      ncand[i] = 1;
      continue;
    }
    const double u = (point[i] - a.lo) / a.width();
    const double first = std::max(0.0, std::ceil(u - half - kSnapEps));
    const double last = std::min(double(a.count - 1), std::floor(u + half + kSnapEps));
    std::size_t k = 0;
    for (double v = first; v <= last && k < kMaxCand; v += 1.0)
      cand[i][k++] = static_cast<std::size_t>(v);
    if (k == 0 || cand[i][0] > *n || cand[i][k - 1] < *n) {
      // nearest node always belongs to the dilated set
      cand[i][0] = *n;
      k = 1;
    }
    ncand[i] = k;
  }
  // odometer over the per-axis candidate lists
  std::array<std::size_t, kMaxRank> pos{};
  const std::size_t rank = axes_.size();
  while (true) {
    std::size_t cell = 0;
    for (std::size_t i = 0; i < rank; ++i) cell += cand[i][pos[i]] * strides_[i];
    out.push_back(cell);
    std::size_t i = rank;
    while (i-- > 0) {
      if (++pos[i] < ncand[i]) break;
      pos[i] = 0;
    }
    if (i == std::size_t(-1)) break;
  }
  return true;
}

std::size_t GridSpec::cell_distance(std::size_t a, std::size_t b) const {
  std::size_t dist = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const std::size_t ia = axis_index(a, i), ib = axis_index(b, i);
    dist = std::max(dist, ia > ib ? ia - ib : ib - ia);
  }
  return dist;
}

double GridSpec::point_distance_cells(std::span<const double> a, std::span<const double> b) const {
  double dist = 0.0;
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    const double w = axes_[i].width();
    if (w == 0.0) continue;
    dist = std::max(dist, std::abs(a[i] - b[i]) / w);
  }
  return dist;
}

Vec GridSpec::point(const TrafficState& s) const {
  if (!traffic_) throw Error(ErrorKind::shape, "not a traffic grid");
  if (s.p.size() != p_dim_ || s.x.size() != m_dim_)
    throw Error(ErrorKind::shape, "state dimensions do not match the grid");
  Vec pt;
  pt.reserve(axes_.size());
  pt.push_back(s.t);
  pt.push_back(s.d);
  pt.insert(pt.end(), s.p.begin(), s.p.end());
  pt.insert(pt.end(), s.x.begin(), s.x.end());
  return pt;
}

TrafficState GridSpec::state(std::span<const double> point) const {
  TrafficState s;
  s.t = point[0];
  s.d = point[1];
  s.p.assign(point.begin() + 2, point.begin() + 2 + std::ptrdiff_t(p_dim_));
  s.x.assign(point.begin() + 2 + std::ptrdiff_t(p_dim_), point.end());
  return s;
}

TrafficState GridSpec::state_of(std::size_t cell) const { return state(center(cell)); }

std::size_t GridSpec::cell_of(const TrafficState& s) const {
  const Vec pt = point(s);
  auto cell = locate(pt);
  if (!cell)
    throw Error(ErrorKind::bounds, "state (t=" + std::to_string(s.t) + ", d=" +
                                       std::to_string(s.d) + ") lies outside the grid");
  return *cell;
}

}  // namespace viaduct
