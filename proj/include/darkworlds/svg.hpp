#ifndef DARKWORLDS_SVG_HPP
#define DARKWORLDS_SVG_HPP

#include <ostream>
#include <string>
#include <vector>

#include "darkworlds/lensing.hpp"

namespace darkworlds {

/// Static sky plot: one ellipse per galaxy (orientation 0.5 atan2(e2, e1),
/// axis ratio (1 - |e|) / (1 + |e|)), a red cross group per true halo and a
/// green circle group per fitted halo. Coordinates use three decimals.
void render_sky_svg(const Sky& sky, const std::vector<Point2d>& true_halos,
                    const std::vector<Point2d>& fitted_halos, std::ostream& out);
void render_sky_svg(const Sky& sky, const std::vector<Point2d>& true_halos,
                    const std::vector<Point2d>& fitted_halos, const std::string& path);

}  // namespace darkworlds

#endif  // DARKWORLDS_SVG_HPP
