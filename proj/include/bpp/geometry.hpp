#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bpp {

struct Point {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }
  bool operator==(const Point&) const = default;
};

Point make_point(std::initializer_list<double> cs);
Point add(const Point& p, const Point& q);
Point sub(const Point& p, const Point& q);
Point scale(double a, const Point& p);
double norm(const Point& p);
bool is_finite(const Point& p);

/// Euclidean metric. Throws std::invalid_argument on dimension mismatch.
double distance(const Point& p, const Point& q);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

struct SearchConfig {
  double tol_value = 1e-9;       // slack for equality-with-gap comparisons
  double tol_param = 1e-12;      // golden-section refinement width
  double tol_membership = 1e-9;  // set membership tolerance
  int grid_n = 1024;             // coarse grid size for 1-D searches
  int max_bracket_doublings = 64;
};

struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One side of the pair (A, B): either a finite point list or a
/// 1-D parameterized segment/ray member(t) = base + t*dir, t in [lo, hi].
class PointSet {
 public:
  enum class Kind { Finite, Param1D };

  static PointSet finite(std::vector<Point> pts);
  static PointSet param1d(Point base, Point dir, double lo, double hi);
  static PointSet ray(Point base, Point dir, double lo);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<Point>& points() const { return points_; }
  const Point& base() const { return base_; }
  const Point& dir() const { return dir_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool unbounded() const;

  Point at(double t) const;  // Param1D member

  /// Closed-form projection parameter of p onto the carrier line,
  /// clamped to [lo, hi]. Param1D only.
  double project_param(const Point& p) const;

  bool contains(const Point& p, double tol) const;

 private:
  PointSet() = default;
  Kind kind_ = Kind::Finite;
  std::size_t dim_ = 0;
  std::vector<Point> points_;
  Point base_, dir_;
  double lo_ = 0, hi_ = 0;
};

/// Grid scan followed by golden-section refinement on the bracketing
/// cell. Ties on the grid resolve to the smallest parameter.
struct MinResult {
  double t;
  double value;
};
MinResult minimize_1d(const std::function<double(double)>& f, double lo,
                      double hi, int grid_n, double tol_param);

/// Minimization over [lo, inf): brackets outward by doubling until the
/// profile increases, then refines. Throws BracketError if no bracketing
/// minimum is found within max_doublings.
MinResult minimize_ray(const std::function<double(double)>& f, double lo,
                       int grid_n, double tol_param, int max_doublings);

double set_distance(const PointSet& A, const PointSet& B,
                    const SearchConfig& cfg);

std::pair<Point, double> nearest_in_set(const Point& target, const PointSet& A,
                                        const SearchConfig& cfg);

/// nearest_in_set with the Param1D search range capped at param <= cap.
std::pair<Point, double> nearest_in_set_capped(const Point& target,
                                               const PointSet& A,
                                               const SearchConfig& cfg,
                                               std::optional<double> cap);

struct ParamInterval {
  double lo, hi;
};

/// Description of A0 or B0: finite members, or parameter subintervals.
struct SetRegion {
  PointSet::Kind kind = PointSet::Kind::Finite;
  std::vector<std::size_t> indices;       // Finite: indices into points()
  std::vector<Point> points;              // Finite: the members
  std::vector<ParamInterval> intervals;   // Param1D
  bool full_set = false;                  // whole (scanned) set qualified

  bool contains(const PointSet& owner, const Point& p, double tol) const;
};

struct Witness {
  Point x, y;
  double dist;
};

struct ProximityStructure {
  double gap = 0;
  SetRegion a0, b0;
  std::vector<Witness> witnesses;
};

/// Computes d(A,B) and the proximity sets A0, B0. A known closed-form gap
/// may be supplied to bypass the numeric set_distance; caps bound the
/// parameter scan of unbounded sets.
ProximityStructure proximity_sets(const PointSet& A, const PointSet& B,
                                  const SearchConfig& cfg,
                                  std::optional<double> known_gap = {},
                                  std::optional<double> cap_a = {},
                                  std::optional<double> cap_b = {});

}  // namespace bpp
