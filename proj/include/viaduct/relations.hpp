#pragma once

#include <string>
#include <variant>
#include <vector>

#include "viaduct/cellset.hpp"
#include "viaduct/core.hpp"

namespace viaduct {

/// Graph of the monad map over (t, d, p, x).
using MonadRelation = CellSet;

/// A prejunction or postjunction state; its duration is implicitly 0.
struct JunctionEndpoint {
  double sigma = 0.0;
  Vec pi;
  Vec xi;

  TrafficState state() const { return TrafficState{sigma, 0.0, pi, xi}; }
  bool operator==(const JunctionEndpoint&) const = default;
};

struct JunctionPair {
  JunctionEndpoint pre;
  JunctionEndpoint post;

  bool operator==(const JunctionPair&) const = default;
};

class JunctionRelation {
 public:
  JunctionRelation() = default;

  static JunctionRelation from_pairs(std::vector<JunctionPair> pairs);
  /// J_in x J_ou.
  static JunctionRelation product(std::vector<JunctionEndpoint> pre,
                                  std::vector<JunctionEndpoint> post);
  /// Impulsive singleton at date sigma with a common monad xi.
  static JunctionRelation singleton(double sigma, Vec pi_in, Vec pi_ou, Vec xi);

  const std::vector<JunctionPair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  bool is_product() const { return product_; }
  const std::vector<JunctionEndpoint>& pre_factor() const { return pre_; }
  const std::vector<JunctionEndpoint>& post_factor() const { return post_; }

  double inf_sigma_in() const;
  double sup_sigma_in() const;
  double inf_sigma_ou() const;
  double sup_sigma_ou() const;
  bool impulsive(double tol = 1e-12) const;

  /// Copy with every endpoint moved to its nearest grid node. Endpoints that
  /// move more than half a cell on some axis produce a warning; endpoints
  /// outside the grid raise ErrorKind::bounds.
  JunctionRelation snapped(const GridSpec& grid, std::vector<std::string>* warnings) const;

 private:
  std::vector<JunctionPair> pairs_;
  std::vector<JunctionEndpoint> pre_;
  std::vector<JunctionEndpoint> post_;
  bool product_ = false;
};

/// True iff the cell holding `state` is a member. Throws ErrorKind::bounds
/// when the state is outside the grid.
bool contains(const CellSet& rel, const TrafficState& state);

/// True iff every cell of the Cartesian product of the per-axis index sets
/// is a member.
bool product_subset_check(std::span<const std::vector<std::size_t>> factors,
                          const CellSet& rel);

struct JunctionViolation {
  enum class Kind { ordering, sup_inf, outside_monad };
  Kind kind;
  std::size_t pair;
  std::string detail;
};

struct JunctionValidation {
  std::vector<JunctionViolation> violations;
  bool impulsive = false;

  bool valid() const { return violations.empty(); }
  bool has(JunctionViolation::Kind kind) const;
};

JunctionValidation validate_junction(const JunctionRelation& junction, const MonadRelation& monad);

/// Temporal profiles of distinct time slices are pairwise disjoint.
bool safety_check(const MonadRelation& monad);

struct ProductTransport {
  CellSet incoming;
  CellSet outgoing;
};

struct CoupledTransport {
  CellSet pairs;
};

using TransportRelation = std::variant<ProductTransport, CoupledTransport>;

struct Decomposition {
  CellSet q_in;
  CellSet q_ou;
  double in_threshold = 0.0;   // inf of prejunction dates
  double ou_threshold = 0.0;   // sup of postjunction dates
};

/// Splits a product transport relation outside the junction: incoming cells
/// strictly before every prejunction date, outgoing cells strictly after
/// every postjunction date.
Decomposition decompose(const TransportRelation& q, const JunctionRelation& junction);

}  // namespace viaduct
