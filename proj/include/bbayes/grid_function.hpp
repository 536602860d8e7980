#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bbayes {

/// A boundary function stored as its values on the 2^L dyadic bins of [0,1].
///
/// Bin k covers [k/m, (k+1)/m) with m = 2^L; the last bin also owns x = 1.
/// Values are always finite. Functions on different levels are compared by
/// replicating the coarser one onto the finer grid, which is exact for
/// piecewise constants.
class GridFunction {
 public:
  static constexpr int kMaxLevel = 20;

  GridFunction();
  GridFunction(int level, std::vector<double> values);

  static GridFunction constant(int level, double c);

  int level() const { return level_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }

  /// Bin index holding x under the left-closed convention.
  std::size_t bin_of(double x) const;
  double at(double x) const { return values_[bin_of(x)]; }

  double min() const;
  double max() const;

  /// Replicates every bin 2^(level - this->level()) times.
  GridFunction refined(int level) const;

  GridFunction& operator+=(double c);
  GridFunction& operator-=(double c);
  friend GridFunction operator+(GridFunction f, double c) { return f += c; }
  friend GridFunction operator-(GridFunction f, double c) { return f -= c; }

  bool operator==(const GridFunction&) const = default;

 private:
  int level_;
  std::vector<double> values_;
};

struct Point {
  double x;
  double y;
  bool operator==(const Point&) const = default;
};

/// A realised point process observed below a simulation ceiling.
class PointPattern {
 public:
  PointPattern(double intensity, double ceiling, std::vector<Point> points = {});

  double intensity() const { return intensity_; }
  double ceiling() const { return ceiling_; }
  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Adds a point; it must lie in [0,1] x (-inf, ceiling].
  void add(Point p);

  bool operator==(const PointPattern&) const = default;

 private:
  double intensity_;
  double ceiling_;
  std::vector<Point> points_;
};

// Pointwise combinations on the finer of the two grids.
GridFunction pointwise_max(const GridFunction& f, const GridFunction& g);
GridFunction pointwise_min(const GridFunction& f, const GridFunction& g);
GridFunction difference(const GridFunction& f, const GridFunction& g);

/// Refines both functions to their common (finer) level.
std::pair<GridFunction, GridFunction> common_level(const GridFunction& f, const GridFunction& g);

/// True iff f_k <= g_k on every bin of the common grid.
bool dominated_by(const GridFunction& f, const GridFunction& g);

// CSV I/O. GridFunction: header "# grid_level=<L>", then one value per line.
// PointPattern: header "# intensity=<n> ceiling=<y_max>", a "x,y" line, then points.
void write_csv(std::ostream& os, const GridFunction& f);
void write_csv(std::ostream& os, const PointPattern& p);
GridFunction read_grid_function_csv(std::istream& is);
PointPattern read_point_pattern_csv(std::istream& is);

/// Reads back-to-back GridFunction CSV blocks until end of stream.
std::vector<GridFunction> read_grid_function_list(std::istream& is);

GridFunction load_grid_function(const std::string& path);
PointPattern load_point_pattern(const std::string& path);
void save(const std::string& path, const GridFunction& f);
void save(const std::string& path, const PointPattern& p);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace bbayes
