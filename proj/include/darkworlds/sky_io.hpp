#ifndef DARKWORLDS_SKY_IO_HPP
#define DARKWORLDS_SKY_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "darkworlds/bugs/graph.hpp"
#include "darkworlds/lensing.hpp"

namespace darkworlds {

// Sky files:   GalaxyID,x,y,e1,e2
// Truth files: SkyId,NumberHalos,x1,y1,x2,y2,x3,y3  (unused slots 0,0)
// Reals are written with 17 significant digits, LF line endings.

inline constexpr int kMaxHalos = 3;

struct TruthRow {
  int sky_id = 0;
  std::vector<Point2d> halos;  ///< 1..3 centres

  friend bool operator==(const TruthRow&, const TruthRow&) = default;
};

Sky read_sky(const std::string& path, int sky_id = 0);
Sky parse_sky(std::istream& in, const std::string& name, int sky_id = 0);
void write_sky(const Sky& sky, const std::string& path);
void write_sky(const Sky& sky, std::ostream& out);

std::vector<TruthRow> read_truth(const std::string& path);
std::vector<TruthRow> parse_truth(std::istream& in, const std::string& name);
void write_truth(const std::vector<TruthRow>& rows, const std::string& path);
void write_truth(const std::vector<TruthRow>& rows, std::ostream& out);

/// Locale independent shortest-exact formatting with 17 significant digits.
std::string format_real(double v);

/// Binds a sky to the model's data names: gx, gy, e1, e2 and the constant G.
void bind_sky(const Sky& sky, bugs::DataTable& data, bugs::Constants& constants);

}  // namespace darkworlds

#endif  // DARKWORLDS_SKY_IO_HPP
