// Scenario files (JSON, schema "kepler-arcs/config-1").
//
//   {
//     "schema": "kepler-arcs/config-1",
//     "scenarios": [ {"radius": 0.4, "half_angle": 2.0944},
//                    {"p": [0.3, -0.1], "q": [0.3, 0.1], "energy": -2.0} ],
//     "grid": {"radius": {"min": 0.05, "max": 0.95, "count": 10},
//              "half_angle": {"min": 0.05, "max": 3.09, "count": 10}},
//     "mesh": 400,
//     "max_mesh": 3200,
//     "tolerances": {"eigen_relative": 1e-8, "location": 1e-6},
//     "bifurcation": {"members": 20, "first": 0.1, "ratio": 0.5, "shooting": true,
//                     "random_families": 0,
//                     "families": [ {"r0": 0.4, "phi0": 1.0472, "branch": 1},
//                                   {"eccentricity": 0.0, "phi_prime": 0.0,
//                                    "anchor_angle": -1.0, "circle_branch": -1} ]},
//     "seed": 1,
//     "output": "out"
//   }
//
// Every key except "schema" is optional. Angles are radians.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/geometry.hpp"

namespace kepler_arcs {

inline constexpr const char* config_schema = "kepler-arcs/config-1";

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioSpec {
  std::optional<double> radius;
  std::optional<double> half_angle;
  std::optional<PlanePoint> p;
  std::optional<PlanePoint> q;
  double energy = -1.0;

  Scenario resolve() const {
    if (p && q) return normalize(*p, *q, energy);
    return make_scenario(*radius, *half_angle, energy);
  }
};

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 1;

  std::vector<double> values() const {
    std::vector<double> v;
    for (int i = 0; i < count; ++i) v.push_back(count == 1 ? min : min + (max - min) * i / (count - 1));
    return v;
  }
};

struct SweepGrid {
  GridAxis radius;
  GridAxis half_angle;
  double energy = -1.0;
};

/// A bifurcation base: either (r0, phi0, branch) in the working frame, or an
/// ellipse (eccentricity, phi') with the anchor at a polar angle.
struct FamilySpec {
  bool frame_form = true;
  double r0 = 0.0, phi0 = 0.0;
  int branch = +1;
  double eccentricity = 0.0, phi_prime = 0.0, anchor_angle = 0.0;
  int circle_branch = +1;

  /// Base ellipse and anchor point in the plane.
  std::pair<KeplerEllipse, PlanePoint> resolve() const {
    if (frame_form) {
      const double c = std::cos(phi0);
      const double delta = r0 * r0 * c * c + 1.0 - 2.0 * r0;
      if (delta < 0.0) throw ConfigError("family: r0, phi0 admit no ellipse (negative discriminant)");
      const double e = r0 * c + branch * std::sqrt(delta);
      if (!(e >= 0.0 && e < 1.0)) throw ConfigError("family: branch gives eccentricity outside [0, 1)");
      return {KeplerEllipse(e, pi), PlanePoint::from_polar(r0, -phi0)};
    }
    const KeplerEllipse ell(eccentricity, phi_prime);
    return {ell, point_at_angle(ell, anchor_angle)};
  }
};

struct BifurcationConfig {
  int members = 20;
  double first = 0.1;
  double ratio = 0.5;
  bool shooting = true;
  int random_families = 0;
  std::vector<FamilySpec> families;
};

struct Tolerances {
  double eigen_relative = 1e-8;
  double location = 1e-6;
};

struct Config {
  std::vector<ScenarioSpec> scenarios;
  std::optional<SweepGrid> grid;
  int mesh = 400;
  int max_mesh = 3200;
  Tolerances tolerances;
  BifurcationConfig bifurcation;
  std::uint64_t seed = 1;
  std::optional<std::string> output;

  /// Explicit scenarios first, then the grid in row-major (radius, half_angle) order.
  std::vector<Scenario> all_scenarios() const {
    std::vector<Scenario> out;
    for (const auto& s : scenarios) out.push_back(s.resolve());
    if (grid) {
      for (double r : grid->radius.values()) {
        for (double a : grid->half_angle.values()) out.push_back(make_scenario(r, a, grid->energy));
      }
    }
    return out;
  }
};

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

inline double get_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  const double v = j.at(key).get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": '" + key + "' must be finite");
  return v;
}

inline double opt_number(const nlohmann::json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? get_number(j, key, where) : fallback;
}

inline int opt_int(const nlohmann::json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

inline PlanePoint get_point(const nlohmann::json& j, const std::string& key, const std::string& where) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ConfigError(where + ": '" + key + "' must be [x, y]");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

inline GridAxis parse_axis(const nlohmann::json& j, const std::string& where) {
  check_keys(j, {"min", "max", "count"}, where);
  GridAxis a;
  a.min = get_number(j, "min", where);
  a.max = get_number(j, "max", where);
  a.count = opt_int(j, "count", 1, where);
  if (a.count < 1) throw ConfigError(where + ": count must be positive");
  if (a.max < a.min) throw ConfigError(where + ": max below min");
  return a;
}

}  // namespace detail

inline Config parse_config(const nlohmann::json& j) {
  using namespace detail;
  check_keys(j, {"schema", "scenarios", "grid", "mesh", "max_mesh", "tolerances", "bifurcation", "seed", "output"},
             "config");
  if (!j.contains("schema") || j.at("schema") != config_schema) {
    throw ConfigError(std::string("config: 'schema' must be \"") + config_schema + "\"");
  }
  Config c;
  try {
    if (j.contains("scenarios")) {
      if (!j.at("scenarios").is_array()) throw ConfigError("config: 'scenarios' must be an array");
      int k = 0;
      for (const auto& s : j.at("scenarios")) {
        const std::string where = "scenarios[" + std::to_string(k++) + "]";
        check_keys(s, {"radius", "half_angle", "p", "q", "energy"}, where);
        ScenarioSpec spec;
        spec.energy = opt_number(s, "energy", -1.0, where);
        if (s.contains("p") || s.contains("q")) {
          if (!(s.contains("p") && s.contains("q"))) throw ConfigError(where + ": need both 'p' and 'q'");
          if (s.contains("radius") || s.contains("half_angle")) {
            throw ConfigError(where + ": give either endpoints or (radius, half_angle)");
          }
          spec.p = get_point(s, "p", where);
          spec.q = get_point(s, "q", where);
        } else {
          spec.radius = get_number(s, "radius", where);
          spec.half_angle = get_number(s, "half_angle", where);
        }
        spec.resolve();  // validates ranges
        c.scenarios.push_back(spec);
      }
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      check_keys(g, {"radius", "half_angle", "energy"}, "grid");
      SweepGrid grid;
      if (!g.contains("radius") || !g.contains("half_angle")) throw ConfigError("grid: needs 'radius' and 'half_angle'");
      grid.radius = parse_axis(g.at("radius"), "grid.radius");
      grid.half_angle = parse_axis(g.at("half_angle"), "grid.half_angle");
      grid.energy = opt_number(g, "energy", -1.0, "grid");
      c.grid = grid;
      c.all_scenarios();  // validates ranges
    }
    c.mesh = opt_int(j, "mesh", c.mesh, "config");
    c.max_mesh = opt_int(j, "max_mesh", c.max_mesh, "config");
    if (c.mesh < 2) throw ConfigError("config: 'mesh' must be at least 2");
    if (c.max_mesh < c.mesh) throw ConfigError("config: 'max_mesh' below 'mesh'");
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      check_keys(t, {"eigen_relative", "location"}, "tolerances");
      c.tolerances.eigen_relative = opt_number(t, "eigen_relative", c.tolerances.eigen_relative, "tolerances");
      c.tolerances.location = opt_number(t, "location", c.tolerances.location, "tolerances");
      if (!(c.tolerances.eigen_relative > 0.0 && c.tolerances.location > 0.0)) {
        throw ConfigError("tolerances: all tolerances must be positive");
      }
    }
    if (j.contains("bifurcation")) {
      const auto& b = j.at("bifurcation");
      check_keys(b, {"members", "first", "ratio", "shooting", "random_families", "families"}, "bifurcation");
      auto& bc = c.bifurcation;
      bc.members = opt_int(b, "members", bc.members, "bifurcation");
      bc.first = opt_number(b, "first", bc.first, "bifurcation");
      bc.ratio = opt_number(b, "ratio", bc.ratio, "bifurcation");
      bc.random_families = opt_int(b, "random_families", bc.random_families, "bifurcation");
      if (b.contains("shooting")) {
        if (!b.at("shooting").is_boolean()) throw ConfigError("bifurcation: 'shooting' must be true or false");
        bc.shooting = b.at("shooting").get<bool>();
      }
      if (bc.members < 3) throw ConfigError("bifurcation: 'members' must be at least 3");
      if (!(bc.first > 0.0)) throw ConfigError("bifurcation: 'first' must be positive");
      if (!(bc.ratio > 0.0 && bc.ratio < 1.0)) throw ConfigError("bifurcation: 'ratio' must lie in (0, 1)");
      if (bc.random_families < 0) throw ConfigError("bifurcation: 'random_families' must be non-negative");
      if (b.contains("families")) {
        if (!b.at("families").is_array()) throw ConfigError("bifurcation: 'families' must be an array");
        int k = 0;
        for (const auto& f : b.at("families")) {
          const std::string where = "bifurcation.families[" + std::to_string(k++) + "]";
          check_keys(f, {"r0", "phi0", "branch", "eccentricity", "phi_prime", "anchor_angle", "circle_branch"}, where);
          FamilySpec fs;
          if (f.contains("r0") || f.contains("phi0")) {
            fs.frame_form = true;
            fs.r0 = get_number(f, "r0", where);
            fs.phi0 = get_number(f, "phi0", where);
            fs.branch = opt_int(f, "branch", +1, where);
            if (fs.branch != 1 && fs.branch != -1) throw ConfigError(where + ": 'branch' must be 1 or -1");
            if (!(fs.r0 > 0.0 && fs.r0 < 1.0)) throw ConfigError(where + ": r0 must lie in (0, 1)");
            if (!(fs.phi0 > 0.0 && fs.phi0 < pi)) throw ConfigError(where + ": phi0 must lie in (0, pi)");
          } else {
            fs.frame_form = false;
            fs.eccentricity = get_number(f, "eccentricity", where);
            fs.phi_prime = opt_number(f, "phi_prime", 0.0, where);
            fs.anchor_angle = get_number(f, "anchor_angle", where);
          }
          fs.circle_branch = opt_int(f, "circle_branch", +1, where);
          if (fs.circle_branch != 1 && fs.circle_branch != -1) throw ConfigError(where + ": 'circle_branch' must be 1 or -1");
          fs.resolve();
          bc.families.push_back(fs);
        }
      }
    }
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("output")) {
      if (!j.at("output").is_string()) throw ConfigError("config: 'output' must be a string");
      c.output = j.at("output").get<std::string>();
    }
  } catch (const ScenarioError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const GeometryError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

inline Config parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// Random admissible family base in the working frame: the eccentricity lies
/// in [0.02, 0.98], the discriminant stays away from tangency and every member
/// of the schedule exists.
inline FamilySpec random_family(std::mt19937_64& rng, double first = 0.1) {
  std::uniform_real_distribution<double> ur(0.05, 0.95), ua(0.05, pi - 0.05), coin(0.0, 1.0);
  for (;;) {
    FamilySpec f;
    f.frame_form = true;
    f.r0 = ur(rng);
    f.phi0 = ua(rng);
    f.branch = coin(rng) < 0.5 ? +1 : -1;
    const double c = std::cos(f.phi0);
    const double delta = f.r0 * f.r0 * c * c + 1.0 - 2.0 * f.r0;
    if (delta < 1e-2) continue;
    const double e = f.r0 * c + f.branch * std::sqrt(delta);
    if (!(e >= 0.02 && e <= 0.98)) continue;
    bool ok = true;
    for (double phi = first; phi > 1e-9 && ok; phi *= 0.5) {
      const double cn = std::cos(phi - f.phi0);
      const double dn = f.r0 * f.r0 * cn * cn + 1.0 - 2.0 * f.r0;
      const double en = f.r0 * cn + f.branch * std::sqrt(std::max(dn, 0.0));
      ok = dn > 0.0 && en >= 0.0 && en < 1.0;
    }
    if (ok) return f;
  }
}

}  // namespace kepler_arcs
