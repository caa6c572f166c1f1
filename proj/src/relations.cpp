#include "viaduct/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "viaduct/error.hpp"
#include "viaduct/simd/bitops.hpp"

namespace viaduct {

namespace {

constexpr double kDateEps = 1e-9;

JunctionEndpoint snap_endpoint(const JunctionEndpoint& e, const GridSpec& grid,
                               std::vector<std::string>* warnings, const std::string& label) {
  const Vec pt = grid.point(e.state());
  auto cell = grid.locate(pt);
  if (!cell) throw Error(ErrorKind::bounds, label + " lies outside the grid");
  const Vec node = grid.center(*cell);
  if (warnings && grid.point_distance_cells(pt, node) > 0.5 + 1e-9)
    warnings->push_back(label + " moved more than half a cell when snapped to the grid");
  TrafficState s = grid.state(node);
  return JunctionEndpoint{s.t, s.p, s.x};
}

// Copies `len` bits starting at bit `offset` into `out` (resized).
void extract_bits(std::span<const std::uint64_t> words, std::size_t offset, std::size_t len,
                  std::vector<std::uint64_t>& out) {
  out.assign((len + 63) / 64, 0);
  const std::size_t shift = offset & 63;
  const std::size_t base = offset >> 6;
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t w = words[base + i] >> shift;
    if (shift != 0 && base + i + 1 < words.size()) w |= words[base + i + 1] << (64 - shift);
    out[i] = w;
  }
  const std::size_t rem = len & 63;
  if (rem != 0) out.back() &= (std::uint64_t{1} << rem) - 1;
}

}  // namespace

JunctionRelation JunctionRelation::from_pairs(std::vector<JunctionPair> pairs) {
  JunctionRelation j;
  j.pairs_ = std::move(pairs);
  return j;
}

JunctionRelation JunctionRelation::product(std::vector<JunctionEndpoint> pre,
                                           std::vector<JunctionEndpoint> post) {
  JunctionRelation j;
  for (const auto& a : pre)
    for (const auto& b : post) j.pairs_.push_back(JunctionPair{a, b});
  j.pre_ = std::move(pre);
  j.post_ = std::move(post);
  j.product_ = true;
  return j;
}

JunctionRelation JunctionRelation::singleton(double sigma, Vec pi_in, Vec pi_ou, Vec xi) {
  return product({JunctionEndpoint{sigma, std::move(pi_in), xi}},
                 {JunctionEndpoint{sigma, std::move(pi_ou), xi}});
}

double JunctionRelation::inf_sigma_in() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs_) v = std::min(v, p.pre.sigma);
  return v;
}

double JunctionRelation::sup_sigma_in() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs_) v = std::max(v, p.pre.sigma);
  return v;
}

double JunctionRelation::inf_sigma_ou() const {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& p : pairs_) v = std::min(v, p.post.sigma);
  return v;
}

double JunctionRelation::sup_sigma_ou() const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& p : pairs_) v = std::max(v, p.post.sigma);
  return v;
}

bool JunctionRelation::impulsive(double tol) const {
  return std::all_of(pairs_.begin(), pairs_.end(), [&](const JunctionPair& p) {
    return std::abs(p.pre.sigma - p.post.sigma) <= tol;
  });
}

JunctionRelation JunctionRelation::snapped(const GridSpec& grid,
                                           std::vector<std::string>* warnings) const {
  if (product_) {
    std::vector<JunctionEndpoint> pre, post;
    for (std::size_t i = 0; i < pre_.size(); ++i)
      pre.push_back(snap_endpoint(pre_[i], grid, warnings, "prejunction state " + std::to_string(i)));
    for (std::size_t i = 0; i < post_.size(); ++i)
      post.push_back(snap_endpoint(post_[i], grid, warnings, "postjunction state " + std::to_string(i)));
    return product(std::move(pre), std::move(post));
  }
  std::vector<JunctionPair> pairs;
  for (std::size_t i = 0; i < pairs_.size(); ++i)
    pairs.push_back(JunctionPair{
        snap_endpoint(pairs_[i].pre, grid, warnings, "junction pair " + std::to_string(i) + " pre"),
        snap_endpoint(pairs_[i].post, grid, warnings, "junction pair " + std::to_string(i) + " post")});
  return from_pairs(std::move(pairs));
}

bool contains(const CellSet& rel, const TrafficState& state) {
  return rel.test(rel.grid().cell_of(state));
}

bool product_subset_check(std::span<const std::vector<std::size_t>> factors, const CellSet& rel) {
  const GridSpec& grid = rel.grid();
  if (factors.size() != grid.rank())
    throw Error(ErrorKind::shape, "product check needs one factor per grid axis");
  for (std::size_t i = 0; i < factors.size(); ++i)
    for (std::size_t k : factors[i])
      if (k >= grid.axis(i).count) throw Error(ErrorKind::bounds, "factor index out of range");
  if (std::any_of(factors.begin(), factors.end(), [](const auto& f) { return f.empty(); }))
    return true;
  std::vector<std::size_t> pos(factors.size(), 0);
  while (true) {
    std::size_t cell = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) cell += factors[i][pos[i]] * grid.stride(i);
    if (!rel.test(cell)) return false;
    std::size_t i = factors.size();
    while (i-- > 0) {
      if (++pos[i] < factors[i].size()) break;
      pos[i] = 0;
    }
    if (i == std::size_t(-1)) return true;
  }
}

bool JunctionValidation::has(JunctionViolation::Kind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const JunctionViolation& v) { return v.kind == kind; });
}

JunctionValidation validate_junction(const JunctionRelation& junction, const MonadRelation& monad) {
  JunctionValidation report;
  report.impulsive = junction.impulsive(kDateEps);
  const auto& pairs = junction.pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].pre.sigma > pairs[i].post.sigma + kDateEps)
      report.violations.push_back(
          {JunctionViolation::Kind::ordering, i,
           "prejunction date " + format_double(pairs[i].pre.sigma) +
               " exceeds postjunction date " + format_double(pairs[i].post.sigma)});
  }
  if (!pairs.empty() && junction.sup_sigma_in() > junction.inf_sigma_ou() + kDateEps)
    report.violations.push_back({JunctionViolation::Kind::sup_inf, 0,
                                 "sup of prejunction dates " + format_double(junction.sup_sigma_in()) +
                                     " exceeds inf of postjunction dates " +
                                     format_double(junction.inf_sigma_ou())});
  const GridSpec& grid = monad.grid();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (const JunctionEndpoint* e : {&pairs[i].pre, &pairs[i].post}) {
      const auto cell = grid.locate(grid.point(e->state()));
      if (!cell || !monad.test(*cell) || grid.duration_index(*cell) != 0) {
        report.violations.push_back({JunctionViolation::Kind::outside_monad, i,
                                     std::string(e == &pairs[i].pre ? "prejunction" : "postjunction") +
                                         " state of pair " + std::to_string(i) +
                                         " is outside the monad relation's zero-duration slice"});
      }
    }
  }
  return report;
}

bool safety_check(const MonadRelation& monad) {
  const GridSpec& grid = monad.grid();
  const std::size_t slice = grid.stride(0);
  const std::size_t slices = grid.axis(0).count;
  const auto& k = simd::active();
  std::vector<std::uint64_t> seen((slice + 63) / 64, 0), cur;
  for (std::size_t s = 0; s < slices; ++s) {
    extract_bits(monad.words(), s * slice, slice, cur);
    if (k.intersects(seen.data(), cur.data(), cur.size())) return false;
    k.or_into(seen.data(), cur.data(), cur.size());
  }
  return true;
}

Decomposition decompose(const TransportRelation& q, const JunctionRelation& junction) {
  const auto* product = std::get_if<ProductTransport>(&q);
  if (!product)
    throw Error(ErrorKind::unsupported_representation,
                "decomposition needs the product representation");
  if (junction.empty()) throw Error(ErrorKind::no_junction, "decomposition needs a junction");
  Decomposition out{CellSet::empty(product->incoming.grid_ptr()),
                    CellSet::empty(product->outgoing.grid_ptr()), junction.inf_sigma_in(),
                    junction.sup_sigma_ou()};
  const Axis& tin = product->incoming.grid().axis(0);
  const Axis& tou = product->outgoing.grid().axis(0);
  const double eps_in = 1e-9 * std::max(1.0, tin.width());
  const double eps_ou = 1e-9 * std::max(1.0, tou.width());
  product->incoming.for_each([&](std::size_t c) {
    if (tin.node(product->incoming.grid().axis_index(c, 0)) < out.in_threshold - eps_in)
      out.q_in.set(c);
  });
  product->outgoing.for_each([&](std::size_t c) {
    if (tou.node(product->outgoing.grid().axis_index(c, 0)) > out.ou_threshold + eps_ou)
      out.q_ou.set(c);
  });
  return out;
}

}  // namespace viaduct
