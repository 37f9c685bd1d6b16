// kepler_arcs: command-line front end.
//
//   kepler_arcs enumerate|classify|bifurcate|figure|verify
//       [--config PATH] [--out DIR] [--mesh N] [--seed S] [--jobs K]
//
// Exit codes: 0 success, 1 a scientific check failed, 2 usage error.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kepler_arcs/kepler_arcs.hpp"

namespace fs = std::filesystem;
using namespace kepler_arcs;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_disagreement = 1;
constexpr int exit_usage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<int> mesh;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("--config", o.config_path, "Scenario file (JSON)")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out_dir, "Output directory (default: $KEPLER_ARCS_OUT, else ./kepler_arcs_out)");
  sub->add_option("--mesh", o.mesh, "Intervals N of the discretized second variation")->check(CLI::Range(2, 1 << 20));
  sub->add_option("--seed", o.seed, "Seed for random families");
  sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::Range(1, 1024));
}

/// Used when no --config is given: a 10 x 10 sweep over the admissible box
/// and five random families.
Config default_config() {
  Config c;
  SweepGrid g;
  g.radius = {0.05, 0.95, 10};
  g.half_angle = {0.05, pi - 0.05, 10};
  c.grid = g;
  c.bifurcation.random_families = 5;
  return c;
}

Config resolve_config(const CommonOptions& o) {
  Config c = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (o.mesh) {
    c.mesh = *o.mesh;
    c.max_mesh = std::max(c.max_mesh, c.mesh);
  }
  if (o.seed) c.seed = *o.seed;
  return c;
}

fs::path output_dir(const CommonOptions& o, const Config& c) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (c.output) return *c.output;
  if (const char* env = std::getenv("KEPLER_ARCS_OUT"); env && *env) return env;
  return "kepler_arcs_out";
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  std::cout << "wrote " << path.string() << "\n";
}

/// Emits the report after confirming that parse(emit(r)) re-emits identically.
void write_report(const fs::path& dir, const RunReport& r) {
  const std::string text = emit_report(r);
  if (emit_report(parse_report(text)) != text) throw std::runtime_error("report JSON does not round-trip");
  write_file(dir / "report.json", text);
}

int finish(const RunReport& r) {
  const auto& s = r.summary;
  std::cout << "scenarios " << s.scenarios << ", arcs " << s.arcs << ", minimizers " << s.minimizers
            << ", non-minimizers " << s.non_minimizers << ", undecided " << s.undecided << ", disagreements "
            << s.disagreements << ", families " << s.families << ", family failures " << s.family_failures << "\n";
  return s.ok ? exit_ok : exit_disagreement;
}

int cmd_enumerate(const CommonOptions& o) {
  const Config c = resolve_config(o);
  const fs::path dir = output_dir(o, c);
  const RunReport r = run_enumerate(c, o.jobs);
  write_report(dir, r);
  write_file(dir / "arcs.csv", enumerate_table(r).str());
  return finish(r);
}

int cmd_classify(const CommonOptions& o) {
  const Config c = resolve_config(o);
  const fs::path dir = output_dir(o, c);
  const RunReport r = run_classify(c, o.jobs);
  write_report(dir, r);
  write_file(dir / "classification.csv", classify_table(r).str());
  return finish(r);
}

int cmd_bifurcate(const CommonOptions& o) {
  const Config c = resolve_config(o);
  const fs::path dir = output_dir(o, c);
  const RunReport r = run_bifurcate(c, o.jobs);
  write_report(dir, r);
  write_file(dir / "bifurcation_members.csv", bifurcate_table(r).str());
  write_file(dir / "bifurcation_summary.csv", bifurcate_summary_table(r).str());
  return finish(r);
}

FigurePanel scenario_panel(const Scenario& s) {
  FigurePanel fp;
  fp.scenario = s;
  char buf[160];
  std::snprintf(buf, sizeof buf, "R = %.4g, phi0 = %.4g (%s)", s.radius, s.half_angle,
                to_string(classify_regime(s)).c_str());
  fp.title = buf;
  for (const auto& arc : enumerate_arcs(s).arcs) fp.arcs.push_back({arc, classify_analytic(arc, s)});
  return fp;
}

int cmd_figure(const CommonOptions& o) {
  const Config c = resolve_config(o);
  const fs::path dir = output_dir(o, c);
  const auto scenarios = c.all_scenarios();
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const Scenario& s = scenarios[k];
    std::vector<FigurePanel> panels{scenario_panel(s)};
    if (s.radius > 0.5 && !s.on_circle()) panels.push_back(scenario_panel(make_scenario(s.radius, pi - s.half_angle)));
    write_file(dir / ("scenario_" + std::to_string(k) + ".svg"), scenario_figure(panels));
  }
  const auto families = all_families(c);
  ScheduleOptions so;
  so.members = c.bifurcation.members;
  so.first = c.bifurcation.first;
  so.ratio = c.bifurcation.ratio;
  for (std::size_t k = 0; k < families.size(); ++k) {
    const auto [ell, p] = families[k].resolve();
    ScheduleOptions sk = so;
    if (ell.is_circle()) sk.first = std::min(so.first * 5.0, 0.5);
    const PerturbedFamily fam = build_family(ell, p, geometric_schedule(sk), families[k].circle_branch);
    write_file(dir / ("family_" + std::to_string(k) + ".svg"), bifurcation_figure(fam, track_intersections(fam)));
  }
  return exit_ok;
}

int cmd_verify(const CommonOptions& o) {
  AcceptanceOptions ao;
  ao.jobs = o.jobs;
  if (o.seed) ao.seed = *o.seed;
  if (o.mesh) ao.mesh = *o.mesh;
  AcceptanceSuite suite(ao);
  CsvTable t({"criterion", "name", "passed", "detail"});
  bool all = true;
  for (int k = 1; k <= 9; ++k) {
    const CriterionResult r = suite.run(k);
    std::cout << r.line() << std::endl;
    all = all && r.passed;
    t.add_row({std::to_string(r.id), r.name, bool_cell(r.passed), r.detail});
  }
  const fs::path dir = o.out_dir.empty() ? output_dir(o, Config{}) : fs::path(o.out_dir);
  write_file(dir / "verify.csv", t.str());
  return all ? exit_ok : exit_disagreement;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-energy Kepler arcs: enumeration, minimality and geodesic bifurcation"};
  app.require_subcommand(1);
  CommonOptions opts;
  struct Entry {
    const char* name;
    const char* help;
    int (*run)(const CommonOptions&);
  };
  const std::vector<Entry> entries{
      {"enumerate", "List every Kepler arc joining p and q", cmd_enumerate},
      {"classify", "Minimality verdicts with Morse index and Jacobi fields", cmd_classify},
      {"bifurcate", "Perturbed families and their bifurcation limit", cmd_bifurcate},
      {"figure", "SVG figures of scenarios and families", cmd_figure},
      {"verify", "Run the acceptance checks", cmd_verify},
  };
  std::vector<CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, opts);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? exit_ok : exit_usage;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }
  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (subs[k]->parsed()) return entries[k].run(opts);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_disagreement;
  }
  return exit_usage;
}
