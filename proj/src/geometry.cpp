#include "bpp/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace bpp {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, end);
}

Point make_point(std::initializer_list<double> cs) { return Point{cs}; }

Point add(const Point& p, const Point& q) {
  Point r = p;
  for (std::size_t i = 0; i < r.dim(); ++i) r.coords[i] += q[i];
  return r;
}

Point sub(const Point& p, const Point& q) {
  Point r = p;
  for (std::size_t i = 0; i < r.dim(); ++i) r.coords[i] -= q[i];
  return r;
}

Point scale(double a, const Point& p) {
  Point r = p;
  for (auto& c : r.coords) c *= a;
  return r;
}

double norm(const Point& p) {
  double s = 0;
  for (double c : p.coords) s += c * c;
  return std::sqrt(s);
}

bool is_finite(const Point& p) {
  return std::all_of(p.coords.begin(), p.coords.end(),
                     [](double c) { return std::isfinite(c); });
}

double distance(const Point& p, const Point& q) {
  if (p.dim() != q.dim())
    throw std::invalid_argument("distance: dimension mismatch");
  double s = 0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return std::sqrt(s);
}

PointSet PointSet::finite(std::vector<Point> pts) {
  if (pts.empty()) throw std::invalid_argument("PointSet: empty point list");
  const std::size_t d = pts.front().dim();
  for (const auto& p : pts) {
    if (p.dim() != d)
      throw std::invalid_argument("PointSet: inconsistent dimensions");
    if (!is_finite(p))
      throw std::invalid_argument("PointSet: non-finite coordinate");
  }
  PointSet s;
  s.kind_ = Kind::Finite;
  s.dim_ = d;
  s.points_ = std::move(pts);
  return s;
}

PointSet PointSet::param1d(Point base, Point dir, double lo, double hi) {
  if (base.dim() != dir.dim())
    throw std::invalid_argument("PointSet: base/dir dimension mismatch");
  if (!is_finite(base) || !is_finite(dir))
    throw std::invalid_argument("PointSet: non-finite coordinate");
  if (norm(dir) <= 0) throw std::invalid_argument("PointSet: zero direction");
  if (!(lo <= hi)) throw std::invalid_argument("PointSet: lo > hi");
  PointSet s;
  s.kind_ = Kind::Param1D;
  s.dim_ = base.dim();
  s.base_ = std::move(base);
  s.dir_ = std::move(dir);
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

PointSet PointSet::ray(Point base, Point dir, double lo) {
  return param1d(std::move(base), std::move(dir), lo,
                 std::numeric_limits<double>::infinity());
}

bool PointSet::unbounded() const {
  return kind_ == Kind::Param1D && std::isinf(hi_);
}

Point PointSet::at(double t) const {
  if (kind_ != Kind::Param1D)
    throw std::logic_error("PointSet::at on finite set");
  return add(base_, scale(t, dir_));
}

double PointSet::project_param(const Point& p) const {
  if (kind_ != Kind::Param1D)
    throw std::logic_error("PointSet::project_param on finite set");
  const Point rel = sub(p, base_);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    num += rel[i] * dir_[i];
    den += dir_[i] * dir_[i];
  }
  return std::clamp(num / den, lo_, hi_);
}

bool PointSet::contains(const Point& p, double tol) const {
  if (p.dim() != dim_) return false;
  if (kind_ == Kind::Finite) {
    for (const auto& q : points_)
      if (distance(p, q) <= tol) return true;
    return false;
  }
  return distance(p, at(project_param(p))) <= tol;
}

namespace {

double golden_refine(const std::function<double(double)>& f, double a,
                     double b, double tol_param) {
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol_param) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

MinResult minimize_1d(const std::function<double(double)>& f, double lo,
                      double hi, int grid_n, double tol_param) {
  if (!(lo <= hi)) throw std::invalid_argument("minimize_1d: lo > hi");
  if (lo == hi) return {lo, f(lo)};
  const int n = std::max(grid_n, 2);
  double best_t = lo, best_f = f(lo);
  int best_i = 0;
  for (int i = 1; i <= n; ++i) {
    const double t = lo + (hi - lo) * (double(i) / n);
    const double v = f(t);
    if (v < best_f) {
      best_f = v;
      best_t = t;
      best_i = i;
    }
  }
  const double h = (hi - lo) / n;
  const double a = std::max(lo, best_t - h);
  const double b = std::min(hi, best_t + h);
  const double tr = golden_refine(f, a, b, tol_param);
  const double fr = f(tr);
  if (fr < best_f) return {tr, fr};
  // keep the grid point (smallest-parameter tie-break is the scan order)
  (void)best_i;
  return {best_t, best_f};
}

MinResult minimize_ray(const std::function<double(double)>& f, double lo,
                       int grid_n, double tol_param, int max_doublings) {
  double span = 1.0;
  double prev = f(lo);
  double best = prev;
  for (int k = 0; k < max_doublings; ++k) {
    const double t = lo + span;
    const double v = f(t);
    if (v > best) {
      // profile increased past the minimum: bracket found
      return minimize_1d(f, lo, t, grid_n, tol_param);
    }
    best = std::min(best, v);
    span *= 2;
  }
  throw BracketError("no bracketing minimum");
}

namespace {

struct ParamRange {
  double lo, hi;
  bool unbounded;
};

ParamRange effective_range(const PointSet& s, std::optional<double> cap) {
  double hi = s.hi();
  bool unb = std::isinf(hi);
  if (cap) {
    hi = std::min(hi, *cap);
    unb = false;
  }
  return {s.lo(), hi, unb};
}

// distance from a fixed point to a Param1D set via 1-D search
MinResult point_to_param(const Point& target, const PointSet& s,
                         const SearchConfig& cfg, std::optional<double> cap) {
  auto f = [&](double t) { return distance(target, s.at(t)); };
  const ParamRange r = effective_range(s, cap);
  if (r.unbounded)
    return minimize_ray(f, r.lo, cfg.grid_n, cfg.tol_param,
                        cfg.max_bracket_doublings);
  return minimize_1d(f, r.lo, r.hi, cfg.grid_n, cfg.tol_param);
}

double set_distance_impl(const PointSet& A, const PointSet& B,
                         const SearchConfig& cfg, std::optional<double> cap_a,
                         std::optional<double> cap_b) {
  if (A.dim() != B.dim())
    throw std::invalid_argument("set_distance: dimension mismatch");
  using Kind = PointSet::Kind;
  if (A.kind() == Kind::Finite && B.kind() == Kind::Finite) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : A.points())
      for (const auto& q : B.points()) best = std::min(best, distance(p, q));
    return best;
  }
  if (A.kind() == Kind::Finite) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : A.points())
      best = std::min(best, point_to_param(p, B, cfg, cap_b).value);
    return best;
  }
  if (B.kind() == Kind::Finite) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : B.points())
      best = std::min(best, point_to_param(q, A, cfg, cap_a).value);
    return best;
  }
  auto outer = [&](double t) {
    return point_to_param(A.at(t), B, cfg, cap_b).value;
  };
  const ParamRange r = effective_range(A, cap_a);
  if (r.unbounded)
    return minimize_ray(outer, r.lo, cfg.grid_n, cfg.tol_param,
                        cfg.max_bracket_doublings)
        .value;
  return minimize_1d(outer, r.lo, r.hi, cfg.grid_n, cfg.tol_param).value;
}

}  // namespace

double set_distance(const PointSet& A, const PointSet& B,
                    const SearchConfig& cfg) {
  return set_distance_impl(A, B, cfg, {}, {});
}

std::pair<Point, double> nearest_in_set(const Point& target, const PointSet& A,
                                        const SearchConfig& cfg) {
  return nearest_in_set_capped(target, A, cfg, {});
}

std::pair<Point, double> nearest_in_set_capped(const Point& target,
                                               const PointSet& A,
                                               const SearchConfig& cfg,
                                               std::optional<double> cap) {
  if (target.dim() != A.dim())
    throw std::invalid_argument("nearest_in_set: dimension mismatch");
  if (A.kind() == PointSet::Kind::Finite) {
    std::size_t best = 0;
    double best_d = distance(target, A.points()[0]);
    for (std::size_t i = 1; i < A.points().size(); ++i) {
      const double d = distance(target, A.points()[i]);
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return {A.points()[best], best_d};
  }
  const MinResult m = point_to_param(target, A, cfg, cap);
  return {A.at(m.t), m.value};
}

bool SetRegion::contains(const PointSet& owner, const Point& p,
                         double tol) const {
  if (full_set) return owner.contains(p, tol);
  if (kind == PointSet::Kind::Finite) {
    for (const auto& q : points)
      if (distance(p, q) <= tol) return true;
    return false;
  }
  const double t = owner.project_param(p);
  if (distance(p, owner.at(t)) > tol) return false;
  const double slack = tol / norm(owner.dir());
  for (const auto& iv : intervals)
    if (t >= iv.lo - slack && t <= iv.hi + slack) return true;
  return false;
}

namespace {

// one side of the proximity-set computation
void fill_region(const PointSet& self, const PointSet& other,
                 const SearchConfig& cfg, std::optional<double> cap_self,
                 std::optional<double> cap_other, double gap, SetRegion& out,
                 std::vector<Witness>& witnesses) {
  out.kind = self.kind();
  if (self.kind() == PointSet::Kind::Finite) {
    out.full_set = true;
    for (std::size_t i = 0; i < self.points().size(); ++i) {
      const auto [y, d] =
          nearest_in_set_capped(self.points()[i], other, cfg, cap_other);
      if (d <= gap + cfg.tol_value) {
        out.indices.push_back(i);
        out.points.push_back(self.points()[i]);
        witnesses.push_back({self.points()[i], y, d});
      } else {
        out.full_set = false;
      }
    }
    return;
  }
  const ParamRange r = effective_range(self, cap_self);
  if (r.unbounded)
    throw BracketError(
        "proximity_sets: unbounded parameter range requires a search cap");
  auto qualifies = [&](double t) {
    return nearest_in_set_capped(self.at(t), other, cfg, cap_other).second <=
           gap + cfg.tol_value;
  };
  const int n = std::max(cfg.grid_n, 2);
  std::vector<double> ts(n + 1);
  std::vector<bool> ok(n + 1);
  bool all = true;
  for (int i = 0; i <= n; ++i) {
    ts[i] = r.lo + (r.hi - r.lo) * (double(i) / n);
    ok[i] = qualifies(ts[i]);
    all = all && ok[i];
  }
  auto bisect_edge = [&](double t_in, double t_out) {
    for (int it = 0; it < 100 && std::abs(t_out - t_in) > cfg.tol_param; ++it) {
      const double mid = 0.5 * (t_in + t_out);
      (qualifies(mid) ? t_in : t_out) = mid;
    }
    return t_in;
  };
  int i = 0;
  while (i <= n) {
    if (!ok[i]) {
      ++i;
      continue;
    }
    int j = i;
    while (j + 1 <= n && ok[j + 1]) ++j;
    double a = ts[i], b = ts[j];
    if (i > 0) a = bisect_edge(ts[i], ts[i - 1]);
    if (j < n) b = bisect_edge(ts[j], ts[j + 1]);
    out.intervals.push_back({a, b});
    for (double t : {a, 0.5 * (a + b), b}) {
      const auto [y, d] = nearest_in_set_capped(self.at(t), other, cfg,
                                                cap_other);
      witnesses.push_back({self.at(t), y, d});
    }
    i = j + 1;
  }
  out.full_set = all;
}

}  // namespace

ProximityStructure proximity_sets(const PointSet& A, const PointSet& B,
                                  const SearchConfig& cfg,
                                  std::optional<double> known_gap,
                                  std::optional<double> cap_a,
                                  std::optional<double> cap_b) {
  ProximityStructure prox;
  prox.gap = known_gap ? *known_gap
                       : set_distance_impl(A, B, cfg, cap_a, cap_b);
  fill_region(A, B, cfg, cap_a, cap_b, prox.gap, prox.a0, prox.witnesses);
  fill_region(B, A, cfg, cap_b, cap_a, prox.gap, prox.b0, prox.witnesses);
  return prox;
}

}  // namespace bpp
