#include "darkworlds/sky_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace darkworlds {

std::string format_real(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

const std::vector<std::string> kSkyHeader{"GalaxyID", "x", "y", "e1", "e2"};
const std::vector<std::string> kTruthHeader{"SkyId", "NumberHalos", "x1", "y1",
                                            "x2",    "y2",          "x3", "y3"};

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

class LineReader {
public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  // Next non-blank line, or false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!trim(line).empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const { throw FormatError(name_, line_no_, what); }

  double real(std::string_view field, const std::string& column) const {
    field = trim(field);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
      fail("non-numeric value '" + std::string(field) + "' in column " + column);
    return v;
  }

  int integer(std::string_view field, const std::string& column) const {
    field = trim(field);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
      fail("non-integer value '" + std::string(field) + "' in column " + column);
    return v;
  }

  void header(const std::vector<std::string>& expected) {
    std::string line;
    if (!next(line)) fail("empty file, expected header");
    std::vector<std::string> got;
    for (auto f : split(line)) got.emplace_back(trim(f));
    if (got == expected) return;
    std::string missing;
    for (const auto& col : expected) {
      if (std::find(got.begin(), got.end(), col) == got.end())
        missing += (missing.empty() ? "" : ", ") + col;
    }
    std::string want;
    for (const auto& col : expected) want += (want.empty() ? "" : ",") + col;
    if (!missing.empty()) fail("header mismatch: missing column " + missing + " (expected " + want + ")");
    fail("header mismatch: expected " + want);
  }

  std::size_t line_no() const { return line_no_; }

private:
  std::istream& in_;
  std::string name_;
  std::size_t line_no_ = 0;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, 0, "cannot open file for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path, 0, "cannot open file for writing");
  return out;
}

}  // namespace

Sky parse_sky(std::istream& in, const std::string& name, int sky_id) {
  LineReader r(in, name);
  r.header(kSkyHeader);
  Sky sky;
  sky.id = sky_id;
  std::set<int> ids;
  std::string line;
  while (r.next(line)) {
    const auto f = split(line);
    if (f.size() != kSkyHeader.size())
      r.fail("expected " + std::to_string(kSkyHeader.size()) + " fields, got " +
             std::to_string(f.size()));
    Galaxy g;
    g.id = r.integer(f[0], "GalaxyID");
    g.loc = {r.real(f[1], "x"), r.real(f[2], "y")};
    g.ell = {r.real(f[3], "e1"), r.real(f[4], "e2")};
    if (!ids.insert(g.id).second) r.fail("duplicate galaxy id " + std::to_string(g.id));
    for (double c : {g.loc.x(), g.loc.y()}) {
      if (c < 0 || c > sky.field_size)
        r.fail("galaxy " + std::to_string(g.id) + " lies outside the field [0, " +
               format_real(sky.field_size) + "]");
    }
    sky.galaxies.push_back(g);
  }
  if (sky.galaxies.empty()) r.fail("sky has no galaxies");
  return sky;
}

Sky read_sky(const std::string& path, int sky_id) {
  auto in = open_in(path);
  return parse_sky(in, path, sky_id);
}

void write_sky(const Sky& sky, std::ostream& out) {
  out << "GalaxyID,x,y,e1,e2\n";
  for (const auto& g : sky.galaxies) {
    out << g.id << ',' << format_real(g.loc.x()) << ',' << format_real(g.loc.y()) << ','
        << format_real(g.ell.e1) << ',' << format_real(g.ell.e2) << '\n';
  }
}

void write_sky(const Sky& sky, const std::string& path) {
  auto out = open_out(path);
  write_sky(sky, out);
  if (!out) throw FormatError(path, 0, "write failed");
}

std::vector<TruthRow> parse_truth(std::istream& in, const std::string& name) {
  LineReader r(in, name);
  r.header(kTruthHeader);
  std::vector<TruthRow> rows;
  std::set<int> ids;
  std::string line;
  while (r.next(line)) {
    const auto f = split(line);
    if (f.size() != kTruthHeader.size())
      r.fail("expected " + std::to_string(kTruthHeader.size()) + " fields, got " +
             std::to_string(f.size()));
    TruthRow row;
    row.sky_id = r.integer(f[0], "SkyId");
    const int count = r.integer(f[1], "NumberHalos");
    if (count < 1 || count > kMaxHalos)
      r.fail("NumberHalos must be between 1 and 3, got " + std::to_string(count));
    for (int h = 0; h < kMaxHalos; ++h) {
      const std::string n = std::to_string(h + 1);
      const Point2d p{r.real(f[2 + 2 * h], "x" + n), r.real(f[3 + 2 * h], "y" + n)};
      if (h < count) {
        row.halos.push_back(p);
      } else if (p.x() != 0 || p.y() != 0) {
        r.fail("row declares " + std::to_string(count) + " halo(s) but halo slot " + n +
               " is not 0,0");
      }
    }
    if (!ids.insert(row.sky_id).second) r.fail("duplicate sky id " + std::to_string(row.sky_id));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TruthRow> read_truth(const std::string& path) {
  auto in = open_in(path);
  return parse_truth(in, path);
}

void write_truth(const std::vector<TruthRow>& rows, std::ostream& out) {
  out << "SkyId,NumberHalos,x1,y1,x2,y2,x3,y3\n";
  for (const auto& row : rows) {
    if (row.halos.empty() || row.halos.size() > static_cast<std::size_t>(kMaxHalos))
      throw ConfigError("truth row for sky " + std::to_string(row.sky_id) + " needs 1-3 halos");
    out << row.sky_id << ',' << row.halos.size();
    for (int h = 0; h < kMaxHalos; ++h) {
      if (static_cast<std::size_t>(h) < row.halos.size())
        out << ',' << format_real(row.halos[h].x()) << ',' << format_real(row.halos[h].y());
      else
        out << ",0,0";
    }
    out << '\n';
  }
}

void write_truth(const std::vector<TruthRow>& rows, const std::string& path) {
  auto out = open_out(path);
  write_truth(rows, out);
  if (!out) throw FormatError(path, 0, "write failed");
}

void bind_sky(const Sky& sky, bugs::DataTable& data, bugs::Constants& constants) {
  std::vector<double> gx, gy, e1, e2;
  for (const auto& g : sky.galaxies) {
    gx.push_back(g.loc.x());
    gy.push_back(g.loc.y());
    e1.push_back(g.ell.e1);
    e2.push_back(g.ell.e2);
  }
  data["gx"] = bugs::DataArray::vector(std::move(gx));
  data["gy"] = bugs::DataArray::vector(std::move(gy));
  data["e1"] = bugs::DataArray::vector(std::move(e1));
  data["e2"] = bugs::DataArray::vector(std::move(e2));
  constants["G"] = static_cast<double>(sky.galaxies.size());
}

}  // namespace darkworlds
