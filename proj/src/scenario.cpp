#include "viaduct/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "viaduct/error.hpp"

namespace viaduct {

std::string_view to_string(Mode mode) { return mode == Mode::product ? "product" : "coupled"; }

void SolverParams::validate() const {
  if (dilation_radius < 0 || dilation_radius > GridSpec::kMaxDilation)
    throw Error(ErrorKind::validation, "solver.dilation_radius must be in [0, 8]");
  if (max_iterations < 1) throw Error(ErrorKind::validation, "solver.max_iterations must be >= 1");
}

std::size_t SolverParams::effective_budget() const {
  if (cell_budget != 0) return cell_budget;
  if (const char* env = std::getenv("VIADUCT_CELL_BUDGET")) {
    std::size_t v = 0;
    const std::string_view s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc{} && v > 0) return v;
  }
  return kDefaultCellBudget;
}

unsigned SolverParams::effective_threads() const {
  if (threads != 0) return threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

double Scenario::zero_tolerance() const {
  if (solver.duration_zero_tolerance >= 0.0) return solver.duration_zero_tolerance;
  return 0.5 * grid->axis(1).width();
}

double Scenario::aperture_tolerance() const {
  if (solver.aperture_tolerance >= 0.0) return solver.aperture_tolerance;
  return grid->axis(1).width();
}

LegDynamics Scenario::leg(Side side) const {
  LegDynamics leg;
  leg.phi = side == Side::ou ? fluidities.phi_ou : fluidities.phi_in;
  leg.celerity = celerity;
  leg.surge = side == Side::ou ? surge_ou : surge_in;
  leg.celerity_coupling = celerity_coupling;
  if (!celerity_coupling) leg.refresh();
  return leg;
}

namespace {

double capacity_at(const MonadSpec& spec, const TrafficState& s) {
  if (spec.capacity == MonadSpec::Capacity::affine) {
    double b = spec.cap_offset + spec.cap_t * s.t + spec.cap_d * s.d;
    for (std::size_t i = 0; i < spec.cap_p.size() && i < s.p.size(); ++i) b += spec.cap_p[i] * s.p[i];
    return b;
  }
  const auto& tab = spec.cap_table;
  const double p = s.p.empty() ? 0.0 : s.p[0];
  if (p <= tab.front().first) return tab.front().second;
  if (p >= tab.back().first) return tab.back().second;
  auto hi = std::upper_bound(tab.begin(), tab.end(), p,
                             [](double v, const auto& knot) { return v < knot.first; });
  auto lo = hi - 1;
  const double w = (p - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

}  // namespace

MonadRelation build_monad_relation(const MonadSpec& spec, const GridPtr& grid) {
  MonadRelation m = CellSet::full(grid);
  const GridSpec& g = *grid;
  if (spec.include_cells) {
    CellSet inc = CellSet::empty(grid);
    for (std::size_t c : *spec.include_cells) {
      if (c >= g.size()) throw Error(ErrorKind::validation, "monad.include cell out of range");
      inc.set(c);
    }
    m &= inc;
  }
  for (std::size_t c : spec.exclude_cells) {
    if (c >= g.size()) throw Error(ErrorKind::validation, "monad.exclude cell out of range");
    m.reset(c);
  }
  std::vector<std::pair<std::size_t, MonadSpec::Box>> boxes;
  for (const auto& b : spec.boxes) {
    std::size_t axis = g.rank();
    for (std::size_t i = 0; i < g.rank(); ++i)
      if (g.axis(i).name() == b.axis) axis = i;
    if (axis == g.rank()) throw Error(ErrorKind::validation, "monad.box." + b.axis + ": no such axis");
    boxes.emplace_back(axis, b);
  }
  if (boxes.empty() && spec.capacity == MonadSpec::Capacity::none) return m;
  Vec pt(g.rank());
  const MonadRelation base = m;
  base.for_each([&](std::size_t c) {
    g.center(c, pt);
    bool keep = true;
    for (const auto& [axis, b] : boxes) {
      const double w = g.axis(axis).width();
      const double eps = 1e-9 * std::max(1.0, w);
      if (pt[axis] < b.lo - eps || pt[axis] > b.hi + eps) keep = false;
    }
    if (keep && spec.capacity != MonadSpec::Capacity::none && g.is_traffic()) {
      const TrafficState s = g.state(pt);
      const double cap = capacity_at(spec, s);
      for (double x : s.x)
        if (x < -1e-9 || x > cap + 1e-9) keep = false;
    }
    if (!keep) m.reset(c);
  });
  return m;
}

void Scenario::finalize() {
  std::vector<std::string> errors;
  bool fluidity_only = true;
  auto record = [&](const std::string& field, const std::exception& e, bool fluidity = false) {
    errors.push_back(field + ": " + e.what());
    if (!fluidity) fluidity_only = false;
  };
  if (!grid) throw Error(ErrorKind::validation, "grid: missing");
  if (!grid->is_traffic()) {
    errors.push_back("grid: axes must be t, d, p0.., x0..");
    fluidity_only = false;
  }
  try {
    fluidities.validate();
  } catch (const std::exception& e) {
    record("fluidity", e, true);
  }
  const std::size_t p_dim = grid->p_dim(), m_dim = grid->m_dim();
  if (celerity_coupling) {
    if (p_dim != m_dim) {
      errors.push_back("monad.celerity_coupling: needs as many monad as position components");
      fluidity_only = false;
    }
  } else {
    try {
      celerity.validate(p_dim);
    } catch (const std::exception& e) {
      record("celerity", e);
    }
  }
  try {
    surge_in.validate(p_dim, m_dim);
  } catch (const std::exception& e) {
    record("surge", e);
  }
  try {
    surge_ou.validate(p_dim, m_dim);
  } catch (const std::exception& e) {
    record("surge_ou", e);
  }
  try {
    solver.validate();
  } catch (const std::exception& e) {
    record("solver", e);
  }
  try {
    monad = build_monad_relation(monad_spec, grid);
  } catch (const std::exception& e) {
    record("monad", e);
    monad = CellSet::full(grid);
  }
  try {
    for (const auto& pr : junction.pairs()) {
      if (pr.pre.pi.size() != p_dim || pr.post.pi.size() != p_dim || pr.pre.xi.size() != m_dim ||
          pr.post.xi.size() != m_dim)
        throw Error(ErrorKind::shape, "junction states need p_dim positions and m_dim monads");
    }
    junction = junction.snapped(*grid, &warnings);
    const JunctionValidation report = validate_junction(junction, monad);
    for (const auto& v : report.violations) {
      if (v.kind == JunctionViolation::Kind::outside_monad) {
        warnings.push_back("junction: " + v.detail);
      } else {
        errors.push_back("junction: " + v.detail);
        fluidity_only = false;
      }
    }
  } catch (const std::exception& e) {
    record("junction", e);
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw Error(fluidity_only ? ErrorKind::invalid_fluidity : ErrorKind::validation, msg);
  }
}

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  std::size_t column = 0;
  bool used = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_)
      if (k.compare(0, prefix.size(), prefix) == 0) out.push_back(k);
    return out;
  }

  std::string str(const std::string& key, const std::string& fallback = "") {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return it->second.value;
  }

  Vec vec(const std::string& key, std::optional<Vec> fallback = std::nullopt) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
      if (fallback) return *fallback;
      throw Error(ErrorKind::validation, key + ": missing");
    }
    it->second.used = true;
    Vec out;
    const std::string& v = it->second.value;
    std::size_t start = 0;
    while (start <= v.size()) {
      std::size_t comma = v.find(',', start);
      if (comma == std::string::npos) comma = v.size();
      const std::string tok = trim(v.substr(start, comma - start));
      double d = 0.0;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      if (tok.empty() || res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw Error(ErrorKind::parse, where(it->second, start) + ": expected a number, got '" + tok + "'");
      out.push_back(d);
      start = comma + 1;
    }
    return out;
  }

  double num(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (fallback) return *fallback;
      throw Error(ErrorKind::validation, key + ": missing");
    }
    Vec v = vec(key);
    if (v.size() != 1) throw Error(ErrorKind::validation, key + ": expected a single number");
    return v[0];
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    const double v = num(key, fallback ? std::optional<double>(double(*fallback)) : std::nullopt);
    if (v < 0 || v != std::floor(v)) throw Error(ErrorKind::validation, key + ": expected a non-negative integer");
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const std::string v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw Error(ErrorKind::parse, where(entries_.at(key), 0) + ": expected true or false");
  }

  std::vector<std::string> unused() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_)
      if (!e.used) out.push_back(source_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
    return out;
  }

 private:
  std::string where(const Entry& e, std::size_t offset) const {
    return source_ + ":" + std::to_string(e.line) + ":" + std::to_string(e.column + offset);
  }

  std::map<std::string, Entry> entries_;
  std::string source_;
};

Axis read_axis(Reader& r, const std::string& key) {
  const Vec v = r.vec(key);
  if (v.size() != 3) throw Error(ErrorKind::validation, key + ": expected 'lo, hi, count'");
  if (v[2] < 1 || v[2] != std::floor(v[2])) throw Error(ErrorKind::validation, key + ": count must be a positive integer");
  return Axis{AxisRole::time, 0, v[0], v[1], static_cast<std::size_t>(v[2])};
}

SurgeField read_surge(Reader& r, const std::string& prefix, std::size_t p_dim, std::size_t m_dim) {
  const std::string kind = r.str(prefix + ".kind", "constant");
  SurgeField f;
  if (kind == "constant") {
    f = SurgeField::constant_field(r.vec(prefix + ".value", Vec(m_dim, 0.0)));
  } else if (kind == "interval") {
    f = SurgeField::interval_field(r.vec(prefix + ".min"), r.vec(prefix + ".max"),
                                   r.count(prefix + ".samples", 2));
  } else if (kind == "affine") {
    f.kind = SurgeKind::affine;
    f.offset = r.vec(prefix + ".offset", Vec(m_dim, 0.0));
    f.coef_t = r.vec(prefix + ".coef_t", Vec(m_dim, 0.0));
    f.coef_d = r.vec(prefix + ".coef_d", Vec(m_dim, 0.0));
    const Vec cp = r.vec(prefix + ".coef_p", Vec(m_dim * p_dim, 0.0));
    const Vec cx = r.vec(prefix + ".coef_x", Vec(m_dim * m_dim, 0.0));
    if (cp.size() != m_dim * p_dim || cx.size() != m_dim * m_dim)
      throw Error(ErrorKind::validation, prefix + ": affine coefficient matrices have the wrong size");
    for (std::size_t j = 0; j < m_dim; ++j) {
      f.coef_p.emplace_back(cp.begin() + std::ptrdiff_t(j * p_dim), cp.begin() + std::ptrdiff_t((j + 1) * p_dim));
      f.coef_x.emplace_back(cx.begin() + std::ptrdiff_t(j * m_dim), cx.begin() + std::ptrdiff_t((j + 1) * m_dim));
    }
  } else {
    throw Error(ErrorKind::validation, prefix + ".kind: unknown kind '" + kind + "'");
  }
  return f;
}

JunctionEndpoint read_endpoint(const Vec& v, std::size_t offset, std::size_t p_dim, std::size_t m_dim) {
  JunctionEndpoint e;
  e.sigma = v[offset];
  e.pi.assign(v.begin() + std::ptrdiff_t(offset + 1), v.begin() + std::ptrdiff_t(offset + 1 + p_dim));
  e.xi.assign(v.begin() + std::ptrdiff_t(offset + 1 + p_dim),
              v.begin() + std::ptrdiff_t(offset + 1 + p_dim + m_dim));
  return e;
}

std::vector<Vec> indexed_list(Reader& r, const std::string& prefix, std::size_t width) {
  std::map<std::size_t, Vec> items;
  for (const auto& key : r.keys_with_prefix(prefix + ".")) {
    const std::string idx = key.substr(prefix.size() + 1);
    if (idx.empty() || !std::all_of(idx.begin(), idx.end(), [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    Vec v = r.vec(key);
    if (v.size() != width)
      throw Error(ErrorKind::validation, key + ": expected " + std::to_string(width) + " numbers");
    items[std::stoul(idx)] = std::move(v);
  }
  std::vector<Vec> out;
  for (auto& [k, v] : items) out.push_back(std::move(v));
  return out;
}

std::vector<std::size_t> cell_list(const Vec& v, const std::string& key) {
  std::vector<std::size_t> out;
  for (double d : v) {
    if (d < 0 || d != std::floor(d)) throw Error(ErrorKind::validation, key + ": cell indices must be non-negative integers");
    out.push_back(static_cast<std::size_t>(d));
  }
  return out;
}

}  // namespace

Scenario parse_scenario(std::istream& is, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = hash == std::string::npos ? line : line.substr(0, hash);
    if (trim(body).empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::parse, source + ":" + std::to_string(line_no) + ":1: expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty())
      throw Error(ErrorKind::parse, source + ":" + std::to_string(line_no) + ":1: empty key");
    const std::size_t value_col = body.find_first_not_of(" \t", eq + 1);
    Entry e{trim(body.substr(eq + 1)), line_no, value_col == std::string::npos ? eq + 2 : value_col + 1, false};
    if (!entries.emplace(key, e).second)
      throw Error(ErrorKind::parse, source + ":" + std::to_string(line_no) + ":1: duplicate key '" + key + "'");
  }

  Reader r(std::move(entries), source);
  Scenario s;
  std::vector<std::string> errors;
  auto attempt = [&](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::parse) throw;
      errors.push_back(e.what());
    }
  };

  s.name = r.str("scenario.name", "scenario");
  attempt([&] {
    const std::string mode = r.str("scenario.mode", "product");
    if (mode == "product") s.mode = Mode::product;
    else if (mode == "coupled") s.mode = Mode::coupled;
    else throw Error(ErrorKind::validation, "scenario.mode: expected product or coupled");
  });
  attempt([&] { s.seed = r.count("scenario.seed", 0); });

  std::size_t p_dim = 0, m_dim = 0;
  while (r.has("grid.p" + std::to_string(p_dim))) ++p_dim;
  while (r.has("grid.x" + std::to_string(m_dim))) ++m_dim;
  attempt([&] {
    std::vector<Axis> p, x;
    for (std::size_t i = 0; i < p_dim; ++i) p.push_back(read_axis(r, "grid.p" + std::to_string(i)));
    for (std::size_t i = 0; i < m_dim; ++i) x.push_back(read_axis(r, "grid.x" + std::to_string(i)));
    s.grid = std::make_shared<const GridSpec>(
        GridSpec::traffic(read_axis(r, "grid.t"), read_axis(r, "grid.d"), std::move(p), std::move(x)));
  });

  attempt([&] {
    s.fluidities.phi_in = r.num("fluidity.in");
    s.fluidities.phi_ou = r.num("fluidity.ou", s.fluidities.phi_in);
  });
  attempt([&] { s.celerity_coupling = r.flag("monad.celerity_coupling", false); });
  attempt([&] {
    if (s.celerity_coupling && !r.has("celerity.min")) return;
    s.celerity.lo = r.vec("celerity.min");
    s.celerity.hi = r.vec("celerity.max");
    s.celerity.samples = r.count("celerity.samples", 2);
  });
  attempt([&] { s.surge_in = read_surge(r, "surge", p_dim, m_dim); });
  attempt([&] {
    s.surge_ou = r.has("surge_ou.kind") ? read_surge(r, "surge_ou", p_dim, m_dim) : s.surge_in;
  });

  attempt([&] {
    for (const auto& key : r.keys_with_prefix("monad.box.")) {
      const Vec v = r.vec(key);
      if (v.size() != 2) throw Error(ErrorKind::validation, key + ": expected 'lo, hi'");
      s.monad_spec.boxes.push_back({key.substr(10), v[0], v[1]});
    }
    const std::string cap = r.str("monad.capacity", "none");
    if (cap == "affine") {
      s.monad_spec.capacity = MonadSpec::Capacity::affine;
      s.monad_spec.cap_offset = r.num("monad.capacity.offset", 0.0);
      s.monad_spec.cap_t = r.num("monad.capacity.coef_t", 0.0);
      s.monad_spec.cap_d = r.num("monad.capacity.coef_d", 0.0);
      s.monad_spec.cap_p = r.vec("monad.capacity.coef_p", Vec(p_dim, 0.0));
    } else if (cap == "table") {
      s.monad_spec.capacity = MonadSpec::Capacity::table;
      const Vec v = r.vec("monad.capacity.table");
      if (v.size() < 2 || v.size() % 2 != 0)
        throw Error(ErrorKind::validation, "monad.capacity.table: expected 'p, b, p, b, ...'");
      for (std::size_t i = 0; i < v.size(); i += 2) s.monad_spec.cap_table.emplace_back(v[i], v[i + 1]);
      if (!std::is_sorted(s.monad_spec.cap_table.begin(), s.monad_spec.cap_table.end()))
        throw Error(ErrorKind::validation, "monad.capacity.table: knots must be sorted by position");
    } else if (cap != "none") {
      throw Error(ErrorKind::validation, "monad.capacity: expected none, affine or table");
    }
    if (r.has("monad.include"))
      s.monad_spec.include_cells = cell_list(r.vec("monad.include"), "monad.include");
    if (r.has("monad.exclude"))
      s.monad_spec.exclude_cells = cell_list(r.vec("monad.exclude"), "monad.exclude");
  });

  attempt([&] {
    const std::string kind = r.str("junction.kind", "singleton");
    const std::size_t w = 1 + p_dim + m_dim;
    if (kind == "singleton") {
      s.junction = JunctionRelation::singleton(r.num("junction.sigma"), r.vec("junction.pi_in"),
                                               r.vec("junction.pi_ou"), r.vec("junction.xi", Vec(m_dim, 0.0)));
    } else if (kind == "product") {
      std::vector<JunctionEndpoint> pre, post;
      for (const Vec& v : indexed_list(r, "junction.pre", w)) pre.push_back(read_endpoint(v, 0, p_dim, m_dim));
      for (const Vec& v : indexed_list(r, "junction.post", w)) post.push_back(read_endpoint(v, 0, p_dim, m_dim));
      s.junction = JunctionRelation::product(std::move(pre), std::move(post));
    } else if (kind == "pairs") {
      std::vector<JunctionPair> pairs;
      for (const Vec& v : indexed_list(r, "junction.pair", 2 * w))
        pairs.push_back({read_endpoint(v, 0, p_dim, m_dim), read_endpoint(v, w, p_dim, m_dim)});
      s.junction = JunctionRelation::from_pairs(std::move(pairs));
    } else {
      throw Error(ErrorKind::validation, "junction.kind: expected singleton, product or pairs");
    }
  });

  attempt([&] {
    s.solver.dilation_radius = static_cast<int>(r.count("solver.dilation_radius", 1));
    s.solver.max_iterations = r.count("solver.max_iterations", 100000);
    s.solver.duration_zero_tolerance = r.num("solver.duration_zero_tolerance", -1.0);
    s.solver.aperture_tolerance = r.num("solver.aperture_tolerance", -1.0);
    s.solver.cell_budget = r.count("solver.cell_budget", 0);
    s.solver.threads = static_cast<unsigned>(r.count("solver.threads", 0));
  });

  for (auto& u : r.unused()) errors.push_back(u);
  if (!errors.empty() || !s.grid) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw Error(ErrorKind::validation, msg.empty() ? "grid: missing" : msg);
  }
  s.finalize();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::io, "cannot read scenario " + path);
  return parse_scenario(is, path);
}

namespace {

std::string join(const Vec& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out;
}

Vec endpoint_vec(const JunctionEndpoint& e) {
  Vec v{e.sigma};
  v.insert(v.end(), e.pi.begin(), e.pi.end());
  v.insert(v.end(), e.xi.begin(), e.xi.end());
  return v;
}

void write_surge(std::ostringstream& os, const std::string& prefix, const SurgeField& f) {
  switch (f.kind) {
    case SurgeKind::constant:
      os << prefix << ".kind = constant\n" << prefix << ".value = " << join(f.value) << '\n';
      break;
    case SurgeKind::interval:
      os << prefix << ".kind = interval\n"
         << prefix << ".min = " << join(f.lo) << '\n'
         << prefix << ".max = " << join(f.hi) << '\n'
         << prefix << ".samples = " << f.samples_per_axis << '\n';
      break;
    case SurgeKind::affine: {
      Vec cp, cx;
      for (const Vec& row : f.coef_p) cp.insert(cp.end(), row.begin(), row.end());
      for (const Vec& row : f.coef_x) cx.insert(cx.end(), row.begin(), row.end());
      os << prefix << ".kind = affine\n"
         << prefix << ".offset = " << join(f.offset) << '\n'
         << prefix << ".coef_t = " << join(f.coef_t) << '\n'
         << prefix << ".coef_d = " << join(f.coef_d) << '\n';
      if (!cp.empty()) os << prefix << ".coef_p = " << join(cp) << '\n';
      if (!cx.empty()) os << prefix << ".coef_x = " << join(cx) << '\n';
      break;
    }
  }
}

}  // namespace

std::string write_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "scenario.name = " << s.name << '\n'
     << "scenario.mode = " << to_string(s.mode) << '\n'
     << "scenario.seed = " << s.seed << '\n';
  for (const Axis& a : s.grid->axes())
    os << "grid." << a.name() << " = " << format_double(a.lo) << ", " << format_double(a.hi)
       << ", " << a.count << '\n';
  os << "fluidity.in = " << format_double(s.fluidities.phi_in) << '\n'
     << "fluidity.ou = " << format_double(s.fluidities.phi_ou) << '\n';
  if (!s.celerity.lo.empty()) {
    os << "celerity.min = " << join(s.celerity.lo) << '\n'
       << "celerity.max = " << join(s.celerity.hi) << '\n'
       << "celerity.samples = " << s.celerity.samples << '\n';
  }
  write_surge(os, "surge", s.surge_in);
  if (!(s.surge_ou == s.surge_in)) write_surge(os, "surge_ou", s.surge_ou);
  const MonadSpec& m = s.monad_spec;
  if (s.celerity_coupling) os << "monad.celerity_coupling = true\n";
  for (const auto& b : m.boxes)
    os << "monad.box." << b.axis << " = " << format_double(b.lo) << ", " << format_double(b.hi) << '\n';
  if (m.capacity == MonadSpec::Capacity::affine) {
    os << "monad.capacity = affine\n"
       << "monad.capacity.offset = " << format_double(m.cap_offset) << '\n'
       << "monad.capacity.coef_t = " << format_double(m.cap_t) << '\n'
       << "monad.capacity.coef_d = " << format_double(m.cap_d) << '\n';
    if (!m.cap_p.empty()) os << "monad.capacity.coef_p = " << join(m.cap_p) << '\n';
  } else if (m.capacity == MonadSpec::Capacity::table) {
    Vec flat;
    for (const auto& [p, b] : m.cap_table) {
      flat.push_back(p);
      flat.push_back(b);
    }
    os << "monad.capacity = table\nmonad.capacity.table = " << join(flat) << '\n';
  }
  auto cells = [](const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + std::to_string(v[i]);
    return out;
  };
  if (m.include_cells) os << "monad.include = " << cells(*m.include_cells) << '\n';
  if (!m.exclude_cells.empty()) os << "monad.exclude = " << cells(m.exclude_cells) << '\n';
  if (s.junction.is_product()) {
    os << "junction.kind = product\n";
    for (std::size_t i = 0; i < s.junction.pre_factor().size(); ++i)
      os << "junction.pre." << i << " = " << join(endpoint_vec(s.junction.pre_factor()[i])) << '\n';
    for (std::size_t i = 0; i < s.junction.post_factor().size(); ++i)
      os << "junction.post." << i << " = " << join(endpoint_vec(s.junction.post_factor()[i])) << '\n';
  } else {
    os << "junction.kind = pairs\n";
    for (std::size_t i = 0; i < s.junction.pairs().size(); ++i) {
      Vec v = endpoint_vec(s.junction.pairs()[i].pre);
      const Vec w = endpoint_vec(s.junction.pairs()[i].post);
      v.insert(v.end(), w.begin(), w.end());
      os << "junction.pair." << i << " = " << join(v) << '\n';
    }
  }
  os << "solver.dilation_radius = " << s.solver.dilation_radius << '\n'
     << "solver.max_iterations = " << s.solver.max_iterations << '\n';
  if (s.solver.duration_zero_tolerance >= 0)
    os << "solver.duration_zero_tolerance = " << format_double(s.solver.duration_zero_tolerance) << '\n';
  if (s.solver.aperture_tolerance >= 0)
    os << "solver.aperture_tolerance = " << format_double(s.solver.aperture_tolerance) << '\n';
  if (s.solver.cell_budget != 0) os << "solver.cell_budget = " << s.solver.cell_budget << '\n';
  if (s.solver.threads != 0) os << "solver.threads = " << s.solver.threads << '\n';
  return os.str();
}

}  // namespace viaduct
