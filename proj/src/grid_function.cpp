#include "bbayes/grid_function.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bbayes/errors.hpp"

namespace bbayes {

namespace {

void check_level(int level) {
  if (level < 0 || level > GridFunction::kMaxLevel)
    throw std::invalid_argument("grid level " + std::to_string(level) + " out of range");
}

double parse_double(const std::string& s, const std::string& context) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(context + ": cannot parse number '" + s + "'");
  }
}

// Extracts "<key>=<value>" from a header comment.
std::string header_field(const std::string& line, const std::string& key) {
  auto pos = line.find(key + "=");
  if (pos == std::string::npos) throw IoError("missing '" + key + "' in header: " + line);
  pos += key.size() + 1;
  auto end = line.find_first_of(" \t\r", pos);
  return line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
}

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

}  // namespace

GridFunction::GridFunction() : level_(0), values_(1, 0.0) {}

GridFunction::GridFunction(int level, std::vector<double> values)
    : level_(level), values_(std::move(values)) {
  check_level(level);
  if (values_.size() != (std::size_t{1} << level))
    throw std::invalid_argument("GridFunction: expected " + std::to_string(1u << level) +
                                " values, got " + std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("GridFunction: non-finite value");
}

GridFunction GridFunction::constant(int level, double c) {
  check_level(level);
  return GridFunction(level, std::vector<double>(std::size_t{1} << level, c));
}

std::size_t GridFunction::bin_of(double x) const {
  const std::size_t m = values_.size();
  if (!(x >= 0.0)) return 0;
  if (x >= 1.0) return m - 1;
  auto k = static_cast<std::size_t>(std::floor(x * static_cast<double>(m)));
  return std::min(k, m - 1);
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

GridFunction GridFunction::refined(int level) const {
  if (level < level_) throw std::invalid_argument("refined: target level is coarser");
  if (level == level_) return *this;
  check_level(level);
  const std::size_t rep = std::size_t{1} << (level - level_);
  std::vector<double> out;
  out.reserve(values_.size() * rep);
  for (double v : values_) out.insert(out.end(), rep, v);
  return GridFunction(level, std::move(out));
}

GridFunction& GridFunction::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

GridFunction& GridFunction::operator-=(double c) {
  for (double& v : values_) v -= c;
  return *this;
}

PointPattern::PointPattern(double intensity, double ceiling, std::vector<Point> points)
    : intensity_(intensity), ceiling_(ceiling) {
  if (!(intensity > 0.0) || !std::isfinite(intensity))
    throw std::invalid_argument("PointPattern: intensity must be positive");
  if (!std::isfinite(ceiling)) throw std::invalid_argument("PointPattern: ceiling must be finite");
  points_.reserve(points.size());
  for (const Point& p : points) add(p);
}

void PointPattern::add(Point p) {
  if (!(p.x >= 0.0 && p.x <= 1.0)) throw std::invalid_argument("PointPattern: x outside [0,1]");
  if (!std::isfinite(p.y) || p.y > ceiling_)
    throw std::invalid_argument("PointPattern: y above ceiling or not finite");
  points_.push_back(p);
}

std::pair<GridFunction, GridFunction> common_level(const GridFunction& f, const GridFunction& g) {
  const int level = std::max(f.level(), g.level());
  return {f.refined(level), g.refined(level)};
}

namespace {
template <class Op>
GridFunction combine(const GridFunction& f, const GridFunction& g, Op op) {
  auto [a, b] = common_level(f, g);
  std::vector<double> out(a.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a[k], b[k]);
  return GridFunction(a.level(), std::move(out));
}
}  // namespace

GridFunction pointwise_max(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double a, double b) { return std::max(a, b); });
}

GridFunction pointwise_min(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double a, double b) { return std::min(a, b); });
}

GridFunction difference(const GridFunction& f, const GridFunction& g) {
  return combine(f, g, [](double a, double b) { return a - b; });
}

bool dominated_by(const GridFunction& f, const GridFunction& g) {
  auto [a, b] = common_level(f, g);
  for (std::size_t k = 0; k < a.size(); ++k)
    if (a[k] > b[k]) return false;
  return true;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

void write_csv(std::ostream& os, const GridFunction& f) {
  os << "# grid_level=" << f.level() << '\n';
  for (double v : f.values()) os << format_double(v) << '\n';
}

void write_csv(std::ostream& os, const PointPattern& p) {
  os << "# intensity=" << format_double(p.intensity()) << " ceiling=" << format_double(p.ceiling())
     << '\n';
  os << "x,y\n";
  for (const Point& q : p.points()) os << format_double(q.x) << ',' << format_double(q.y) << '\n';
}

namespace {

// Reads one GridFunction block. Returns false at clean end of stream.
bool read_grid_block(std::istream& is, std::string& pending, GridFunction& out) {
  std::string line;
  std::string header = pending;
  pending.clear();
  while (header.empty()) {
    if (!std::getline(is, line)) return false;
    header = trim(line);
  }
  if (header.rfind('#', 0) != 0) throw IoError("GridFunction CSV: expected '# grid_level=' header");
  const int level = static_cast<int>(parse_double(header_field(header, "grid_level"), "grid_level"));
  check_level(level);
  const std::size_t m = std::size_t{1} << level;
  std::vector<double> values;
  values.reserve(m);
  while (values.size() < m && std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      pending = line;
      break;
    }
    values.push_back(parse_double(line, "GridFunction CSV"));
  }
  if (values.size() != m)
    throw IoError("GridFunction CSV: expected " + std::to_string(m) + " values, got " +
                  std::to_string(values.size()));
  out = GridFunction(level, std::move(values));
  return true;
}

}  // namespace

GridFunction read_grid_function_csv(std::istream& is) {
  std::string pending;
  GridFunction f;
  if (!read_grid_block(is, pending, f)) throw IoError("GridFunction CSV: empty input");
  return f;
}

std::vector<GridFunction> read_grid_function_list(std::istream& is) {
  std::vector<GridFunction> out;
  std::string pending;
  GridFunction f;
  while (read_grid_block(is, pending, f)) out.push_back(f);
  return out;
}

PointPattern read_point_pattern_csv(std::istream& is) {
  std::string line;
  std::string header;
  while (header.empty() && std::getline(is, line)) header = trim(line);
  if (header.rfind('#', 0) != 0) throw IoError("PointPattern CSV: missing header");
  PointPattern p(parse_double(header_field(header, "intensity"), "intensity"),
                 parse_double(header_field(header, "ceiling"), "ceiling"));
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line == "x,y") continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError("PointPattern CSV: bad row '" + line + "'");
    p.add({parse_double(trim(line.substr(0, comma)), "x"),
           parse_double(trim(line.substr(comma + 1)), "y")});
  }
  return p;
}

namespace {
std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path + "' for reading");
  return is;
}
std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}
}  // namespace

GridFunction load_grid_function(const std::string& path) {
  auto is = open_in(path);
  try {
    return read_grid_function_csv(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

PointPattern load_point_pattern(const std::string& path) {
  auto is = open_in(path);
  try {
    return read_point_pattern_csv(is);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void save(const std::string& path, const GridFunction& f) {
  auto os = open_out(path);
  write_csv(os, f);
}

void save(const std::string& path, const PointPattern& p) {
  auto os = open_out(path);
  write_csv(os, p);
}

}  // namespace bbayes
