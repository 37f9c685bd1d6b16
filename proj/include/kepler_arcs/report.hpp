// Run reports (JSON, schema "kepler-arcs/report-1") and CSV tables.
#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kepler_arcs/variational.hpp"

namespace kepler_arcs {

inline constexpr const char* report_schema = "kepler-arcs/report-1";

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArcRecord {
  std::string label;
  double eccentricity = 0.0;
  double phi_prime = 0.0;
  double start_angle = 0.0;
  double span = 0.0;
  int orientation = 1;
  double transfer_time = 0.0;           // normalized units (h = -1)
  double transfer_time_original = 0.0;  // units of the input energy
  bool degenerate_boundary = false;
  bool conjugate_degenerate = false;
  std::optional<MinimalityReport> minimality;

  bool operator==(const ArcRecord&) const = default;
};

struct ScenarioRecord {
  double radius = 0.0;
  double half_angle = 0.0;
  double energy = -1.0;
  double rotation = 0.0;
  std::string regime;
  std::optional<double> existence_bound;
  std::vector<ArcRecord> arcs;
  std::vector<std::string> notes;

  bool operator==(const ScenarioRecord&) const = default;
};

struct MemberRecord {
  int n = 0;
  double phi_n = 0.0;
  double e_n = 0.0;
  double psi = 0.0;
  double radius = 0.0;
  double x = 0.0, y = 0.0;
  double distance = 0.0;  // |p_n - p_f|

  bool operator==(const MemberRecord&) const = default;
};

struct LimitRecord {
  double psi_star = 0.0, r_star = 0.0;
  double m = 0.0, m_star = 0.0, m_chord = 0.0;
  double antipode_gap = 0.0;
  double collinearity = 0.0;
  double order = 0.0;
  double psi_error = 0.0, r_error = 0.0;
  bool monotone = true;

  bool operator==(const LimitRecord&) const = default;
};

struct ShootingSummary {
  double s_star = 0.0;
  double s_star_jacobi = -1.0;
  double parameter_gap = 0.0;   // |s_n - s*| for the last member
  double velocity_gap = 0.0;    // |gamma_n'(0) - gamma_*'(0)| for the last member
  double max_direction_gap = 0.0;
  double max_hit_residual = 0.0;
  int shot_members = 0;
  bool unique = true;

  bool operator==(const ShootingSummary&) const = default;
};

struct BifurcationRecord {
  double eccentricity = 0.0;
  double phi_prime = 0.0;
  double anchor_x = 0.0, anchor_y = 0.0;
  double r0 = 0.0, phi0 = 0.0;
  int branch = 1;
  bool circle = false;
  std::vector<MemberRecord> members;
  std::optional<LimitRecord> limit;
  std::optional<ShootingSummary> shooting;
  std::vector<std::string> warnings;
  bool ok = true;

  bool operator==(const BifurcationRecord&) const = default;
};

struct RunSummary {
  int scenarios = 0;
  int arcs = 0;
  int minimizers = 0;
  int non_minimizers = 0;
  int undecided = 0;
  int disagreements = 0;
  int families = 0;
  int family_failures = 0;
  bool ok = true;

  bool operator==(const RunSummary&) const = default;
};

struct RunReport {
  std::string schema = report_schema;
  std::string command;
  std::uint64_t seed = 0;
  int mesh = 0;
  std::vector<ScenarioRecord> scenarios;
  std::vector<BifurcationRecord> bifurcations;
  RunSummary summary;

  bool operator==(const RunReport&) const = default;
};

// JSON conversions. Field names match the struct members.

inline void to_json(nlohmann::json& j, const PlanePoint& p) { j = nlohmann::json::array({p.x, p.y}); }
inline void from_json(const nlohmann::json& j, PlanePoint& p) {
  if (!j.is_array() || j.size() != 2) throw ReportError("point must be [x, y]");
  p.x = j[0].get<double>();
  p.y = j[1].get<double>();
}

inline void to_json(nlohmann::json& j, const ConjugatePoint& c) {
  j = {{"parameter", c.parameter}, {"multiplicity", c.multiplicity}, {"position", c.position}};
}
inline void from_json(const nlohmann::json& j, ConjugatePoint& c) {
  c.parameter = j.at("parameter").get<double>();
  c.multiplicity = j.at("multiplicity").get<int>();
  c.position = j.at("position").get<PlanePoint>();
}

inline void to_json(nlohmann::json& j, const MinimalityReport& r) {
  j = {{"label", r.label},
       {"verdict", to_string(r.analytic)},
       {"morse_index", r.morse_index},
       {"smallest_eigenvalue", r.smallest_eigenvalue},
       {"eigen_threshold", r.eigen_threshold},
       {"mesh_intervals", r.mesh_intervals},
       {"conjugate_points", r.conjugate_points},
       {"antipodal", r.antipodal},
       {"antipodal_on_arc", r.antipodal_on_arc},
       {"conjugate_antipodal_distance", r.conjugate_antipodal_distance},
       {"morse_agrees", r.morse_agrees},
       {"jacobi_agrees", r.jacobi_agrees},
       {"morse_theorem_holds", r.morse_theorem_holds},
       {"geometry_agrees", r.geometry_agrees},
       {"conjugate_at_antipode", r.conjugate_at_antipode},
       {"endpoint_conjugate", r.endpoint_conjugate}};
}
inline void from_json(const nlohmann::json& j, MinimalityReport& r) {
  r.label = j.at("label").get<std::string>();
  r.analytic = verdict_from_string(j.at("verdict").get<std::string>());
  r.morse_index = j.at("morse_index").get<int>();
  r.smallest_eigenvalue = j.at("smallest_eigenvalue").get<double>();
  r.eigen_threshold = j.at("eigen_threshold").get<double>();
  r.mesh_intervals = j.at("mesh_intervals").get<int>();
  r.conjugate_points = j.at("conjugate_points").get<std::vector<ConjugatePoint>>();
  r.antipodal = j.at("antipodal").get<PlanePoint>();
  r.antipodal_on_arc = j.at("antipodal_on_arc").get<bool>();
  r.conjugate_antipodal_distance = j.at("conjugate_antipodal_distance").get<double>();
  r.morse_agrees = j.at("morse_agrees").get<bool>();
  r.jacobi_agrees = j.at("jacobi_agrees").get<bool>();
  r.morse_theorem_holds = j.at("morse_theorem_holds").get<bool>();
  r.geometry_agrees = j.at("geometry_agrees").get<bool>();
  r.conjugate_at_antipode = j.at("conjugate_at_antipode").get<bool>();
  r.endpoint_conjugate = j.at("endpoint_conjugate").get<bool>();
}

inline void to_json(nlohmann::json& j, const ArcRecord& a) {
  j = {{"label", a.label},
       {"eccentricity", a.eccentricity},
       {"phi_prime", a.phi_prime},
       {"start_angle", a.start_angle},
       {"span", a.span},
       {"orientation", a.orientation},
       {"transfer_time", a.transfer_time},
       {"transfer_time_original", a.transfer_time_original},
       {"degenerate_boundary", a.degenerate_boundary},
       {"conjugate_degenerate", a.conjugate_degenerate},
       {"minimality", a.minimality ? nlohmann::json(*a.minimality) : nlohmann::json(nullptr)}};
}
inline void from_json(const nlohmann::json& j, ArcRecord& a) {
  a.label = j.at("label").get<std::string>();
  a.eccentricity = j.at("eccentricity").get<double>();
  a.phi_prime = j.at("phi_prime").get<double>();
  a.start_angle = j.at("start_angle").get<double>();
  a.span = j.at("span").get<double>();
  a.orientation = j.at("orientation").get<int>();
  a.transfer_time = j.at("transfer_time").get<double>();
  a.transfer_time_original = j.at("transfer_time_original").get<double>();
  a.degenerate_boundary = j.at("degenerate_boundary").get<bool>();
  a.conjugate_degenerate = j.at("conjugate_degenerate").get<bool>();
  if (j.at("minimality").is_null()) a.minimality.reset();
  else a.minimality = j.at("minimality").get<MinimalityReport>();
}

inline void to_json(nlohmann::json& j, const ScenarioRecord& s) {
  j = {{"radius", s.radius},
       {"half_angle", s.half_angle},
       {"energy", s.energy},
       {"rotation", s.rotation},
       {"regime", s.regime},
       {"existence_bound", s.existence_bound ? nlohmann::json(*s.existence_bound) : nlohmann::json(nullptr)},
       {"arcs", s.arcs},
       {"notes", s.notes}};
}
inline void from_json(const nlohmann::json& j, ScenarioRecord& s) {
  s.radius = j.at("radius").get<double>();
  s.half_angle = j.at("half_angle").get<double>();
  s.energy = j.at("energy").get<double>();
  s.rotation = j.at("rotation").get<double>();
  s.regime = j.at("regime").get<std::string>();
  if (j.at("existence_bound").is_null()) s.existence_bound.reset();
  else s.existence_bound = j.at("existence_bound").get<double>();
  s.arcs = j.at("arcs").get<std::vector<ArcRecord>>();
  s.notes = j.at("notes").get<std::vector<std::string>>();
}

inline void to_json(nlohmann::json& j, const MemberRecord& m) {
  j = {{"n", m.n}, {"phi_n", m.phi_n}, {"e_n", m.e_n}, {"psi", m.psi}, {"radius", m.radius},
       {"x", m.x}, {"y", m.y}, {"distance", m.distance}};
}
inline void from_json(const nlohmann::json& j, MemberRecord& m) {
  m.n = j.at("n").get<int>();
  m.phi_n = j.at("phi_n").get<double>();
  m.e_n = j.at("e_n").get<double>();
  m.psi = j.at("psi").get<double>();
  m.radius = j.at("radius").get<double>();
  m.x = j.at("x").get<double>();
  m.y = j.at("y").get<double>();
  m.distance = j.at("distance").get<double>();
}

inline void to_json(nlohmann::json& j, const LimitRecord& l) {
  j = {{"psi_star", l.psi_star}, {"r_star", l.r_star}, {"m", l.m}, {"m_star", l.m_star},
       {"m_chord", l.m_chord}, {"antipode_gap", l.antipode_gap}, {"collinearity", l.collinearity},
       {"order", l.order}, {"psi_error", l.psi_error}, {"r_error", l.r_error}, {"monotone", l.monotone}};
}
inline void from_json(const nlohmann::json& j, LimitRecord& l) {
  l.psi_star = j.at("psi_star").get<double>();
  l.r_star = j.at("r_star").get<double>();
  l.m = j.at("m").get<double>();
  l.m_star = j.at("m_star").get<double>();
  l.m_chord = j.at("m_chord").get<double>();
  l.antipode_gap = j.at("antipode_gap").get<double>();
  l.collinearity = j.at("collinearity").get<double>();
  l.order = j.at("order").get<double>();
  l.psi_error = j.at("psi_error").get<double>();
  l.r_error = j.at("r_error").get<double>();
  l.monotone = j.at("monotone").get<bool>();
}

inline void to_json(nlohmann::json& j, const ShootingSummary& s) {
  j = {{"s_star", s.s_star}, {"s_star_jacobi", s.s_star_jacobi}, {"parameter_gap", s.parameter_gap},
       {"velocity_gap", s.velocity_gap}, {"max_direction_gap", s.max_direction_gap},
       {"max_hit_residual", s.max_hit_residual}, {"shot_members", s.shot_members}, {"unique", s.unique}};
}
inline void from_json(const nlohmann::json& j, ShootingSummary& s) {
  s.s_star = j.at("s_star").get<double>();
  s.s_star_jacobi = j.at("s_star_jacobi").get<double>();
  s.parameter_gap = j.at("parameter_gap").get<double>();
  s.velocity_gap = j.at("velocity_gap").get<double>();
  s.max_direction_gap = j.at("max_direction_gap").get<double>();
  s.max_hit_residual = j.at("max_hit_residual").get<double>();
  s.shot_members = j.at("shot_members").get<int>();
  s.unique = j.at("unique").get<bool>();
}

inline void to_json(nlohmann::json& j, const BifurcationRecord& b) {
  j = {{"eccentricity", b.eccentricity},
       {"phi_prime", b.phi_prime},
       {"anchor", PlanePoint{b.anchor_x, b.anchor_y}},
       {"r0", b.r0},
       {"phi0", b.phi0},
       {"branch", b.branch},
       {"circle", b.circle},
       {"members", b.members},
       {"limit", b.limit ? nlohmann::json(*b.limit) : nlohmann::json(nullptr)},
       {"shooting", b.shooting ? nlohmann::json(*b.shooting) : nlohmann::json(nullptr)},
       {"warnings", b.warnings},
       {"ok", b.ok}};
}
inline void from_json(const nlohmann::json& j, BifurcationRecord& b) {
  b.eccentricity = j.at("eccentricity").get<double>();
  b.phi_prime = j.at("phi_prime").get<double>();
  const auto a = j.at("anchor").get<PlanePoint>();
  b.anchor_x = a.x;
  b.anchor_y = a.y;
  b.r0 = j.at("r0").get<double>();
  b.phi0 = j.at("phi0").get<double>();
  b.branch = j.at("branch").get<int>();
  b.circle = j.at("circle").get<bool>();
  b.members = j.at("members").get<std::vector<MemberRecord>>();
  if (j.at("limit").is_null()) b.limit.reset();
  else b.limit = j.at("limit").get<LimitRecord>();
  if (j.at("shooting").is_null()) b.shooting.reset();
  else b.shooting = j.at("shooting").get<ShootingSummary>();
  b.warnings = j.at("warnings").get<std::vector<std::string>>();
  b.ok = j.at("ok").get<bool>();
}

inline void to_json(nlohmann::json& j, const RunSummary& s) {
  j = {{"scenarios", s.scenarios}, {"arcs", s.arcs}, {"minimizers", s.minimizers},
       {"non_minimizers", s.non_minimizers}, {"undecided", s.undecided}, {"disagreements", s.disagreements},
       {"families", s.families}, {"family_failures", s.family_failures}, {"ok", s.ok}};
}
inline void from_json(const nlohmann::json& j, RunSummary& s) {
  s.scenarios = j.at("scenarios").get<int>();
  s.arcs = j.at("arcs").get<int>();
  s.minimizers = j.at("minimizers").get<int>();
  s.non_minimizers = j.at("non_minimizers").get<int>();
  s.undecided = j.at("undecided").get<int>();
  s.disagreements = j.at("disagreements").get<int>();
  s.families = j.at("families").get<int>();
  s.family_failures = j.at("family_failures").get<int>();
  s.ok = j.at("ok").get<bool>();
}

inline void to_json(nlohmann::json& j, const RunReport& r) {
  j = {{"schema", r.schema},   {"command", r.command},         {"seed", r.seed},
       {"mesh", r.mesh},       {"scenarios", r.scenarios},     {"bifurcations", r.bifurcations},
       {"summary", r.summary}};
}
inline void from_json(const nlohmann::json& j, RunReport& r) {
  r.schema = j.at("schema").get<std::string>();
  if (r.schema != report_schema) throw ReportError("unsupported report schema '" + r.schema + "'");
  r.command = j.at("command").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.mesh = j.at("mesh").get<int>();
  r.scenarios = j.at("scenarios").get<std::vector<ScenarioRecord>>();
  r.bifurcations = j.at("bifurcations").get<std::vector<BifurcationRecord>>();
  r.summary = j.at("summary").get<RunSummary>();
}

inline std::string emit_report(const RunReport& r) { return nlohmann::json(r).dump(2) + "\n"; }

inline RunReport parse_report(const std::string& text) {
  try {
    return nlohmann::json::parse(text).get<RunReport>();
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("malformed report: ") + e.what());
  }
}

// CSV

/// Fixed-format number for tables: 15 significant digits.
inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(std::move(row));
  }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out << ',';
        out << quote(cells[i]);
      }
      out << '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out.str();
  }

 private:
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }

  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string bool_cell(bool b) { return b ? "true" : "false"; }

inline CsvTable enumerate_table(const RunReport& r) {
  CsvTable t({"scenario", "radius", "half_angle", "regime", "label", "eccentricity", "phi_prime", "orientation",
              "start_angle", "span", "transfer_time", "transfer_time_original", "degenerate_boundary"});
  for (std::size_t i = 0; i < r.scenarios.size(); ++i) {
    const auto& s = r.scenarios[i];
    for (const auto& a : s.arcs) {
      t.add_row({std::to_string(i), csv_number(s.radius), csv_number(s.half_angle), s.regime, a.label,
                 csv_number(a.eccentricity), csv_number(a.phi_prime), std::to_string(a.orientation),
                 csv_number(a.start_angle), csv_number(a.span), csv_number(a.transfer_time),
                 csv_number(a.transfer_time_original), bool_cell(a.degenerate_boundary)});
    }
  }
  return t;
}

inline CsvTable classify_table(const RunReport& r) {
  CsvTable t({"scenario", "radius", "half_angle", "regime", "label", "verdict", "morse_index", "smallest_eigenvalue",
              "eigen_threshold", "mesh_intervals", "conjugate_parameters", "conjugate_multiplicity",
              "antipodal_x", "antipodal_y", "antipodal_on_arc", "conjugate_antipodal_distance", "all_agree"});
  for (std::size_t i = 0; i < r.scenarios.size(); ++i) {
    const auto& s = r.scenarios[i];
    for (const auto& a : s.arcs) {
      if (!a.minimality) continue;
      const auto& m = *a.minimality;
      std::string params, mults;
      for (std::size_t k = 0; k < m.conjugate_points.size(); ++k) {
        if (k) {
          params += ';';
          mults += ';';
        }
        params += csv_number(m.conjugate_points[k].parameter);
        mults += std::to_string(m.conjugate_points[k].multiplicity);
      }
      t.add_row({std::to_string(i), csv_number(s.radius), csv_number(s.half_angle), s.regime, a.label,
                 to_string(m.analytic), std::to_string(m.morse_index), csv_number(m.smallest_eigenvalue),
                 csv_number(m.eigen_threshold), std::to_string(m.mesh_intervals), params, mults,
                 csv_number(m.antipodal.x), csv_number(m.antipodal.y), bool_cell(m.antipodal_on_arc),
                 csv_number(m.conjugate_antipodal_distance), bool_cell(m.all_agree())});
    }
  }
  return t;
}

inline CsvTable bifurcate_table(const RunReport& r) {
  CsvTable t({"family", "n", "phi_n", "e_n", "psi", "radius", "x", "y", "distance_to_antipode"});
  for (std::size_t i = 0; i < r.bifurcations.size(); ++i) {
    for (const auto& m : r.bifurcations[i].members) {
      t.add_row({std::to_string(i), std::to_string(m.n), csv_number(m.phi_n), csv_number(m.e_n), csv_number(m.psi),
                 csv_number(m.radius), csv_number(m.x), csv_number(m.y), csv_number(m.distance)});
    }
  }
  return t;
}

inline CsvTable bifurcate_summary_table(const RunReport& r) {
  CsvTable t({"family", "eccentricity", "r0", "phi0", "branch", "circle", "members", "order", "psi_error", "r_error",
              "slope_residual", "chord_slope_residual", "s_star", "s_star_jacobi", "parameter_gap", "velocity_gap",
              "ok"});
  for (std::size_t i = 0; i < r.bifurcations.size(); ++i) {
    const auto& b = r.bifurcations[i];
    const auto num = [](const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); };
    std::optional<double> order, pe, re, sr, cr, ss, sj, pg, vg;
    if (b.limit) {
      order = b.limit->order;
      pe = b.limit->psi_error;
      re = b.limit->r_error;
      sr = std::abs(b.limit->m - b.limit->m_star);
      cr = std::abs(b.limit->m - b.limit->m_chord);
    }
    if (b.shooting) {
      ss = b.shooting->s_star;
      sj = b.shooting->s_star_jacobi;
      pg = b.shooting->parameter_gap;
      vg = b.shooting->velocity_gap;
    }
    t.add_row({std::to_string(i), csv_number(b.eccentricity), csv_number(b.r0), csv_number(b.phi0),
               std::to_string(b.branch), bool_cell(b.circle), std::to_string(b.members.size()), num(order), num(pe),
               num(re), num(sr), num(cr), num(ss), num(sj), num(pg), num(vg), bool_cell(b.ok)});
  }
  return t;
}

}  // namespace kepler_arcs
