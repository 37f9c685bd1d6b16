// Enumerates the arcs of one scenario, classifies each, and follows one
// perturbed family to its bifurcation point.
#include <cstdio>

#include "kepler_arcs/kepler_arcs.hpp"

using namespace kepler_arcs;

int main() {
  const Scenario s = make_scenario(0.7, 0.3);
  const EnumerationResult res = enumerate_arcs(s);
  std::printf("R = %.2f, phi0 = %.2f: regime %s, %zu arcs\n", s.radius, s.half_angle, to_string(res.regime).c_str(),
              res.arcs.size());
  for (const auto& arc : res.arcs) {
    const MinimalityReport rep = analyze_arc(arc, s);
    std::printf("  %-7s e = %.6f  %-13s Morse index %d, conjugate points %zu, agree %s\n", rep.label.c_str(),
                arc.ellipse.eccentricity(), to_string(rep.analytic).c_str(), rep.morse_index,
                rep.conjugate_points.size(), rep.all_agree() ? "yes" : "no");
  }

  FamilySpec spec;
  spec.r0 = 0.4;
  spec.phi0 = 1.0;
  const auto [ell, p] = spec.resolve();
  const PerturbedFamily fam = build_family(ell, p, geometric_schedule({}));
  const auto pts = track_intersections(fam);
  const BifurcationLimit lim = limit_point(fam);
  std::printf("family e = %.6f: p_f = (%.12f, %.12f)\n", ell.eccentricity(), lim.antipode.x, lim.antipode.y);
  for (std::size_t k = 0; k < pts.size(); k += 4) {
    std::printf("  phi_n = %.3e  |p_n - p_f| = %.3e\n", pts[k].phi_n, pts[k].distance_to_antipode);
  }
  return 0;
}
