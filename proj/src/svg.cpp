#include "darkworlds/svg.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <numbers>

namespace darkworlds {

namespace {

constexpr double kGalaxyRadius = 25.0;  // semi-major axis, px
constexpr double kMarkerSize = 90.0;

std::string fixed3(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
  return std::string(buf, res.ptr);
}

}  // namespace

void render_sky_svg(const Sky& sky, const std::vector<Point2d>& true_halos,
                    const std::vector<Point2d>& fitted_halos, std::ostream& out) {
  if (sky.galaxies.empty()) throw ConfigError("cannot plot a sky without galaxies");
  const std::string size = fixed3(sky.field_size);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"840\" height=\"840\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << size << "\" height=\"" << size
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"4\"/>\n"
      // y axis points up
      << "<g transform=\"matrix(1 0 0 -1 0 " << size << ")\">\n"
      << "<g class=\"galaxies\" fill=\"none\" stroke=\"#303030\" stroke-width=\"3\">\n";
  for (const auto& g : sky.galaxies) {
    const double e = std::min(g.ell.magnitude(), 0.999);
    const double ratio = (1.0 - e) / (1.0 + e);
    const double angle = 0.5 * std::atan2(g.ell.e2, g.ell.e1) * 180.0 / std::numbers::pi;
    out << "<ellipse cx=\"" << fixed3(g.loc.x()) << "\" cy=\"" << fixed3(g.loc.y()) << "\" rx=\""
        << fixed3(kGalaxyRadius) << "\" ry=\"" << fixed3(kGalaxyRadius * ratio)
        << "\" transform=\"rotate(" << fixed3(angle) << ' ' << fixed3(g.loc.x()) << ' '
        << fixed3(g.loc.y()) << ")\"/>\n";
  }
  out << "</g>\n";
  const double h = kMarkerSize / 2;
  for (const auto& p : true_halos) {
    out << "<g class=\"true-halo\" stroke=\"red\" stroke-width=\"12\">"
        << "<line x1=\"" << fixed3(p.x() - h) << "\" y1=\"" << fixed3(p.y() - h) << "\" x2=\""
        << fixed3(p.x() + h) << "\" y2=\"" << fixed3(p.y() + h) << "\"/>"
        << "<line x1=\"" << fixed3(p.x() - h) << "\" y1=\"" << fixed3(p.y() + h) << "\" x2=\""
        << fixed3(p.x() + h) << "\" y2=\"" << fixed3(p.y() - h) << "\"/></g>\n";
  }
  for (const auto& p : fitted_halos) {
    out << "<g class=\"fitted-halo\" fill=\"none\" stroke=\"green\" stroke-width=\"12\">"
        << "<circle cx=\"" << fixed3(p.x()) << "\" cy=\"" << fixed3(p.y()) << "\" r=\""
        << fixed3(kMarkerSize) << "\"/></g>\n";
  }
  out << "</g>\n</svg>\n";
}

void render_sky_svg(const Sky& sky, const std::vector<Point2d>& true_halos,
                    const std::vector<Point2d>& fitted_halos, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path, 0, "cannot open file for writing");
  render_sky_svg(sky, true_halos, fitted_halos, out);
  if (!out) throw FormatError(path, 0, "write failed");
}

}  // namespace darkworlds
