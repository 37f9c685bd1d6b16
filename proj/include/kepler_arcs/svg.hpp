// Static SVG 1.1 figures of scenarios and bifurcation families.
#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "kepler_arcs/bifurcation.hpp"
#include "kepler_arcs/enumeration.hpp"
#include "kepler_arcs/geometry.hpp"
#include "kepler_arcs/variational.hpp"

namespace kepler_arcs {

inline const char* verdict_color(std::optional<Verdict> v) {
  if (!v) return "black";
  switch (*v) {
    case Verdict::minimizer: return "magenta";
    case Verdict::non_minimizer: return "gray";
    case Verdict::undecided_degenerate: return "orange";
  }
  return "black";
}

/// One square panel mapping the world box [-extent, extent]^2 to pixels.
class SvgPanel {
 public:
  SvgPanel(double x0, double y0, double size, double extent) : x0_(x0), y0_(y0), size_(size), extent_(extent) {}

  PlanePoint to_pixels(PlanePoint w) const {
    return {x0_ + (w.x + extent_) / (2.0 * extent_) * size_, y0_ + (extent_ - w.y) / (2.0 * extent_) * size_};
  }
  std::string px(PlanePoint w) const {
    const PlanePoint s = to_pixels(w);
    return num(s.x) + "," + num(s.y);
  }
  double scale(double len) const { return len / (2.0 * extent_) * size_; }

  void circle(std::ostringstream& out, PlanePoint c, double r, const std::string& style) const {
    const PlanePoint p = to_pixels(c);
    out << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\"" << num(scale(r))
        << "\" " << style << "/>\n";
  }
  void dot(std::ostringstream& out, PlanePoint c, double r_px, const std::string& fill) const {
    const PlanePoint p = to_pixels(c);
    out << "<circle cx=\"" << num(p.x) << "\" cy=\"" << num(p.y) << "\" r=\"" << num(r_px)
        << "\" fill=\"" << fill << "\"/>\n";
  }
  void cross_mark(std::ostringstream& out, PlanePoint c, double r_px, const std::string& stroke) const {
    const PlanePoint p = to_pixels(c);
    const double cx = p.x, cy = p.y;
    out << "<path d=\"M" << num(cx - r_px) << "," << num(cy - r_px) << " L" << num(cx + r_px) << ","
        << num(cy + r_px) << " M" << num(cx - r_px) << "," << num(cy + r_px) << " L" << num(cx + r_px) << ","
        << num(cy - r_px) << "\" stroke=\"" << stroke << "\" stroke-width=\"1.5\" fill=\"none\"/>\n";
  }
  void polyline(std::ostringstream& out, const std::vector<PlanePoint>& pts, const std::string& style) const {
    out << "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) out << (i ? " " : "") << px(pts[i]);
    out << "\" fill=\"none\" " << style << "/>\n";
  }
  void text(std::ostringstream& out, PlanePoint at, const std::string& s, const std::string& color = "black",
            double dx = 4.0, double dy = -4.0) const {
    const PlanePoint p = to_pixels(at);
    const double cx = p.x, cy = p.y;
    out << "<text x=\"" << num(cx + dx) << "\" y=\"" << num(cy + dy) << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\""
        << color << "\">" << escape(s) << "</text>\n";
  }
  void title(std::ostringstream& out, const std::string& s) const {
    out << "<text x=\"" << num(x0_ + 8) << "\" y=\"" << num(y0_ + 18)
        << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape(s) << "</text>\n";
  }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
  }
  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  }

 private:
  double x0_, y0_, size_, extent_;
};

struct FigureArc {
  KeplerArc arc;
  std::optional<Verdict> verdict;
};

struct FigurePanel {
  Scenario scenario;
  std::string title;
  std::vector<FigureArc> arcs;
};

inline std::vector<PlanePoint> sample_arc(const KeplerArc& arc, int points = 400) {
  std::vector<PlanePoint> out;
  for (int i = 0; i <= points; ++i) out.push_back(arc.point_at_fraction(static_cast<double>(i) / points));
  return out;
}

/// Arrow head at the end of an arc, pointing along the direction of motion.
inline void arrow_head(std::ostringstream& out, const SvgPanel& panel, const KeplerArc& arc, const std::string& color) {
  const PlanePoint tip = arc.point_at_fraction(1.0);
  const PlanePoint back = arc.point_at_fraction(0.97);
  PlanePoint d = tip - back;
  const double len = norm(d);
  if (len == 0.0) return;
  d = d / len;
  const double h = 0.045;
  const PlanePoint n = perp(d);
  const PlanePoint a = tip - d * h + n * (0.5 * h);
  const PlanePoint b = tip - d * h - n * (0.5 * h);
  out << "<polygon points=\"" << panel.px(tip) << " " << panel.px(a) << " " << panel.px(b) << "\" fill=\"" << color
      << "\"/>\n";
}

/// Arcs joining p and q with the Hill's boundary |x| = 1, the circle
/// |x| = 1/2, the endpoint circle, the origin, p, q, second foci and
/// antipodal points. Several panels are laid out side by side.
inline std::string scenario_figure(const std::vector<FigurePanel>& panels) {
  const double size = 520.0;
  const double width = size * panels.size();
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << SvgPanel::num(width)
      << "\" height=\"" << SvgPanel::num(size) << "\" viewBox=\"0 0 " << SvgPanel::num(width) << " "
      << SvgPanel::num(size) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << SvgPanel::num(width) << "\" height=\"" << SvgPanel::num(size)
      << "\" fill=\"white\"/>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const auto& fp = panels[k];
    const SvgPanel panel(size * k, 0.0, size, 1.1);
    out << "<g id=\"panel" << k << "\">\n";
    panel.title(out, fp.title);
    panel.circle(out, {0, 0}, 1.0, "fill=\"none\" stroke=\"black\" stroke-width=\"1\"");
    panel.circle(out, {0, 0}, 0.5, "fill=\"none\" stroke=\"black\" stroke-width=\"0.8\" stroke-dasharray=\"5,4\"");
    panel.circle(out, {0, 0}, fp.scenario.radius,
                 "fill=\"none\" stroke=\"#7f7fbf\" stroke-width=\"0.8\" stroke-dasharray=\"2,3\"");
    panel.text(out, PlanePoint::from_polar(1.0, -0.8), "|x| = 1", "black", 4.0, 12.0);
    panel.text(out, PlanePoint::from_polar(0.5, -2.3), "|x| = 1/2", "black", -60.0, 14.0);
    for (const auto& fa : fp.arcs) {
      const std::string color = verdict_color(fa.verdict);
      panel.polyline(out, sample_arc(fa.arc), "stroke=\"" + color + "\" stroke-width=\"2\"");
      arrow_head(out, panel, fa.arc, color);
      const PlanePoint mid = fa.arc.point_at_fraction(0.5);
      panel.text(out, mid, fa.arc.label.str(), color);
      if (!fa.arc.ellipse.is_circle()) panel.cross_mark(out, second_focus(fa.arc.ellipse), 4.0, "#4060a0");
      const PlanePoint pf = antipodal_point(fa.arc.ellipse, fa.arc.start());
      panel.circle(out, pf, 0.012, "fill=\"white\" stroke=\"" + color + "\" stroke-width=\"1.5\"");
    }
    panel.dot(out, {0, 0}, 3.0, "black");
    panel.text(out, {0, 0}, "0");
    panel.dot(out, fp.scenario.p(), 3.5, "black");
    panel.text(out, fp.scenario.p(), "p", "black", 6.0, 12.0);
    panel.dot(out, fp.scenario.q(), 3.5, "black");
    panel.text(out, fp.scenario.q(), "q", "black", 6.0, -6.0);
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

/// Base ellipse, a few family members, the tracked intersections p_n and the
/// antipodal point p_f.
inline std::string bifurcation_figure(const PerturbedFamily& fam, const std::vector<IntersectionPoint>& pts,
                                      int members_drawn = 4) {
  const double size = 560.0;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << SvgPanel::num(size)
      << "\" height=\"" << SvgPanel::num(size) << "\" viewBox=\"0 0 " << SvgPanel::num(size) << " "
      << SvgPanel::num(size) << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << SvgPanel::num(size) << "\" height=\"" << SvgPanel::num(size)
      << "\" fill=\"white\"/>\n";
  const SvgPanel panel(0.0, 0.0, size, 1.1);
  panel.title(out, "perturbed family through p");
  panel.circle(out, {0, 0}, 1.0, "fill=\"none\" stroke=\"black\" stroke-width=\"1\"");
  auto ellipse_points = [](const KeplerEllipse& e) {
    std::vector<PlanePoint> v;
    for (int i = 0; i <= 720; ++i) v.push_back(point_at_angle(e, two_pi * i / 720));
    return v;
  };
  for (int k = 0; k < members_drawn && k < static_cast<int>(fam.members.size()); ++k) {
    const auto& m = fam.members[k];
    panel.polyline(out, ellipse_points(m.ellipse), "stroke=\"magenta\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");
    if (!m.ellipse.is_circle()) panel.cross_mark(out, second_focus(m.ellipse), 3.0, "magenta");
  }
  panel.polyline(out, ellipse_points(fam.base), "stroke=\"black\" stroke-width=\"2\"");
  for (const auto& ip : pts) panel.dot(out, ip.point, 2.5, "#2060c0");
  const PlanePoint pf = antipodal_point(fam.base, fam.anchor);
  if (!fam.base.is_circle()) {
    const PlanePoint f = second_focus(fam.base);
    panel.polyline(out, {fam.anchor, pf}, "stroke=\"#2060c0\" stroke-width=\"1\" stroke-dasharray=\"6,3\"");
    panel.cross_mark(out, f, 4.0, "black");
    panel.text(out, f, "f");
  }
  panel.dot(out, {0, 0}, 3.0, "black");
  panel.text(out, {0, 0}, "0");
  panel.dot(out, fam.anchor, 3.5, "black");
  panel.text(out, fam.anchor, "p", "black", 6.0, 12.0);
  panel.circle(out, pf, 0.015, "fill=\"none\" stroke=\"#2060c0\" stroke-width=\"1.5\"");
  panel.text(out, pf, "p_f", "#2060c0");
  out << "</svg>\n";
  return out.str();
}

}  // namespace kepler_arcs
