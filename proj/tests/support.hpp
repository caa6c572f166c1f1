#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "viaduct/error.hpp"
#include "viaduct/scenario.hpp"

namespace viaduct::test {

/// Scenario file assembled from keys; later set() calls override.
class ScenarioText {
 public:
  ScenarioText& set(const std::string& key, const std::string& value) {
    kv_[key] = value;
    return *this;
  }
  ScenarioText& erase(const std::string& key) {
    kv_.erase(key);
    return *this;
  }
  std::string text() const {
    std::string out;
    for (const auto& [k, v] : kv_) out += k + " = " + v + "\n";
    return out;
  }
  Scenario parse() const {
    std::istringstream is(text());
    return parse_scenario(is, "test");
  }

 private:
  std::map<std::string, std::string> kv_;
};

inline ScenarioText analytic_a() {
  ScenarioText s;
  s.set("scenario.name", "analytic-a")
      .set("scenario.mode", "product")
      .set("grid.t", "-4, 4, 17")
      .set("grid.d", "0, 4, 17")
      .set("grid.p0", "-6, 10, 33")
      .set("grid.x0", "0, 0, 1")
      .set("fluidity.in", "1")
      .set("fluidity.ou", "1")
      .set("celerity.min", "1")
      .set("celerity.max", "2")
      .set("celerity.samples", "3")
      .set("surge.kind", "constant")
      .set("surge.value", "0")
      .set("junction.kind", "singleton")
      .set("junction.sigma", "0")
      .set("junction.pi_in", "0")
      .set("junction.pi_ou", "5")
      .set("junction.xi", "0")
      .set("solver.dilation_radius", "0");
  return s;
}

/// Scenario A shape on 9 nodes per axis; the example pair sits on nodes.
inline ScenarioText small_a() {
  return analytic_a()
      .set("grid.t", "-4, 4, 9")
      .set("grid.d", "0, 4, 9")
      .set("grid.p0", "-4, 12, 9")
      .set("junction.pi_ou", "4");
}

inline TrafficState st(double t, double d, double p, double x = 0.0) { return TrafficState{t, d, {p}, {x}}; }

/// Kind of the Error thrown by f, or nullopt when nothing is thrown.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace viaduct::test
