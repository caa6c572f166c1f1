#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "viaduct/cellset.hpp"
#include "viaduct/dynamics.hpp"
#include "viaduct/params.hpp"
#include "viaduct/relations.hpp"

namespace viaduct {

enum class Mode { product, coupled };

std::string_view to_string(Mode mode);

/// Declarative monad relation; every present constraint is intersected.
struct MonadSpec {
  struct Box {
    std::string axis;  // grid axis name: t, d, p0, x0, ...
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Box&) const = default;
  };
  enum class Capacity { none, affine, table };

  std::vector<Box> boxes;
  /// 0 <= x_j <= b(t, d, p) for every monad component.
  Capacity capacity = Capacity::none;
  double cap_offset = 0.0, cap_t = 0.0, cap_d = 0.0;
  Vec cap_p;
  /// Piecewise-linear b over the first position component; (p, b) knots.
  std::vector<std::pair<double, double>> cap_table;
  std::optional<std::vector<std::size_t>> include_cells;
  std::vector<std::size_t> exclude_cells;

  bool operator==(const MonadSpec&) const = default;
};

struct Scenario {
  std::string name;
  GridPtr grid;
  Fluidities fluidities;
  CelerityBounds celerity;
  SurgeField surge_in;
  SurgeField surge_ou;
  bool celerity_coupling = false;
  MonadSpec monad_spec;
  JunctionRelation junction;
  Mode mode = Mode::product;
  SolverParams solver;
  std::uint64_t seed = 0;

  // Filled by finalize().
  MonadRelation monad;
  std::vector<std::string> warnings;

  /// Time step: one time-axis cell.
  double step() const { return grid->axis(0).width(); }
  double zero_tolerance() const;
  double aperture_tolerance() const;
  LegDynamics leg(Side side) const;

  /// Validates every field, snaps the junction and builds the monad
  /// relation. All problems are reported together (ErrorKind::validation,
  /// or ErrorKind::invalid_fluidity when that is the only problem).
  void finalize();
};

MonadRelation build_monad_relation(const MonadSpec& spec, const GridPtr& grid);

/// `section.key = value` text; '#' starts a comment. Parse errors carry
/// line and column.
Scenario parse_scenario(std::istream& is, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);
std::string write_scenario(const Scenario& s);

}  // namespace viaduct
