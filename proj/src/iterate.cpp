#include "bpp/iterate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"

namespace bpp {

std::string status_name(IterationStatus s) {
  switch (s) {
    case IterationStatus::Converged:
      return "Converged";
    case IterationStatus::MaxIters:
      return "MaxIters";
    case IterationStatus::Diverged:
      return "Diverged";
    case IterationStatus::StepFailed:
      return "StepFailed";
  }
  return "?";
}

Point proximal_step(const Point& x, const InstanceBundle& inst,
                    const ProximityStructure& prox, const SearchConfig& cfg,
                    const IterationConfig& icfg) {
  const Point target = inst.S.eval(inst.T.eval(x));
  auto residual = [&](const Point& u) {
    return std::abs(distance(inst.S.eval(u), target) - prox.gap);
  };
  if (inst.exact_step) {
    Point u = (*inst.exact_step)(x);
    if (residual(u) <= icfg.tol_residual) return u;
  }
  std::optional<Point> best;
  double best_r = std::numeric_limits<double>::infinity();
  if (prox.a0.kind == PointSet::Kind::Finite) {
    for (const auto& u : prox.a0.points) {
      const double r = residual(u);
      if (r < best_r) {
        best_r = r;
        best = u;
      }
    }
  } else {
    for (const auto& iv : prox.a0.intervals) {
      auto f = [&](double t) { return residual(inst.A.at(t)); };
      const MinResult m =
          minimize_1d(f, iv.lo, iv.hi, cfg.grid_n, cfg.tol_param);
      if (m.value < best_r) {
        best_r = m.value;
        best = inst.A.at(m.t);
      }
    }
  }
  if (best && best_r <= icfg.tol_residual) return *best;
  throw StepFailedError(
      "proximal step: no candidate attains d(Su,STx)=d(A,B) within "
      "tol_residual (T(A0) may not lie in B0, or the grid is too coarse)");
}

IterationTrace run_iteration(const Point& x0, const InstanceBundle& inst,
                             const ProximityStructure& prox,
                             const SearchConfig& cfg,
                             const IterationConfig& icfg) {
  if (!prox.a0.contains(inst.A, x0, cfg.tol_membership))
    throw std::invalid_argument("run_iteration: x0 is not in A0");
  IterationTrace trace;
  trace.gap = prox.gap;
  Point x = x0;
  double prev_step = std::numeric_limits<double>::quiet_NaN();
  double prev_raw = std::numeric_limits<double>::quiet_NaN();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t n = 0; n <= icfg.max_iters; ++n) {
    if (std::any_of(x.coords.begin(), x.coords.end(), [&](double c) {
          return std::abs(c) > icfg.divergence_radius;
        })) {
      trace.status = IterationStatus::Diverged;
      trace.final_point = x;
      trace.iterations = n;
      return trace;
    }
    const Point sx = inst.S.eval(x);
    const Point stx = inst.S.eval(inst.T.eval(x));
    const double raw_res = distance(sx, stx) - prox.gap;
    const double residual = raw_res < 0 ? 0.0 : raw_res;
    Point xn;
    try {
      xn = proximal_step(x, inst, prox, cfg, icfg);
    } catch (const StepFailedError&) {
      trace.steps.push_back({n, x, sx, stx, residual, nan, nan, nan, nan});
      trace.status = IterationStatus::StepFailed;
      trace.final_point = x;
      trace.iterations = n;
      return trace;
    }
    const double step = distance(sx, inst.S.eval(xn));
    const double raw_step = distance(x, xn);
    const double ratio = (n > 0 && prev_step > 0) ? step / prev_step : nan;
    const double raw_ratio =
        (n > 0 && prev_raw > 0) ? raw_step / prev_raw : nan;
    trace.steps.push_back(
        {n, x, sx, stx, residual, step, ratio, raw_step, raw_ratio});
    // Converged only when the raw iterates settle as well: S can contract
    // its image while the raw sequence escapes (the subsequential
    // convergence failure mode), and that must not read as convergence.
    if (residual <= icfg.tol_residual && step <= icfg.tol_step &&
        raw_step <= icfg.tol_step) {
      trace.status = IterationStatus::Converged;
      trace.final_point = x;
      trace.iterations = n;
      return trace;
    }
    prev_step = step;
    prev_raw = raw_step;
    x = xn;
  }
  trace.status = IterationStatus::MaxIters;
  trace.final_point = x;
  trace.iterations = icfg.max_iters;
  return trace;
}

Diagnostics convergence_diagnostics(const IterationTrace& trace,
                                    const GeraghtyFunction* beta,
                                    bool kannan_type,
                                    const IterationConfig& icfg) {
  Diagnostics d;
  std::size_t usable = 0;
  for (std::size_t n = 1; n < trace.steps.size(); ++n) {
    const double prev = trace.steps[n - 1].step;
    const double cur = trace.steps[n].step;
    if (!(prev > icfg.tol_step) || std::isnan(cur)) continue;
    ++usable;
    const double ratio = cur / prev;
    d.ratio_series.push_back(ratio);
    const double rprev = trace.steps[n - 1].raw_step;
    const double rcur = trace.steps[n].raw_step;
    d.raw_ratio_series.push_back(rprev > 0 ? rcur / rprev
                                           : std::numeric_limits<double>::quiet_NaN());
    d.sup_ratio = std::max(d.sup_ratio, ratio);
    if (beta) {
      const double b = beta->eval(prev);
      const double bound = kannan_type ? b / (1.0 - b) : b;
      const bool ok = ratio <= bound + 1e-12;
      d.bound_ok.push_back(ok);
      d.all_bounds_ok = d.all_bounds_ok && ok;
    }
  }
  d.vacuous = usable < 3;
  return d;
}

std::vector<OracleHit> brute_force_best_proximity(
    const InstanceBundle& inst, const ProximityStructure& prox,
    const SearchConfig& cfg, double tol_residual, std::size_t grid_points,
    std::optional<ParamInterval> range) {
  std::vector<OracleHit> hits;
  auto consider = [&](const Point& x) {
    const double r = distance(x, inst.T.eval(x)) - prox.gap;
    if (r <= tol_residual) hits.push_back({x, r < 0 ? 0.0 : r});
  };
  if (inst.A.kind() == PointSet::Kind::Finite) {
    for (const auto& x : inst.A.points()) consider(x);
  } else {
    double lo = inst.A.lo();
    double hi = inst.A.hi();
    if (inst.search_cap) hi = std::min(hi, *inst.search_cap);
    if (range) {
      lo = range->lo;
      hi = range->hi;
    }
    if (std::isinf(hi))
      throw BracketError(
          "brute_force_best_proximity: unbounded set requires a range or cap");
    const std::size_t n = std::max<std::size_t>(grid_points, 2);
    for (std::size_t i = 0; i < n; ++i)
      consider(inst.A.at(lo + (hi - lo) * double(i) / double(n - 1)));
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const OracleHit& a, const OracleHit& b) {
                     return a.residual < b.residual;
                   });
  (void)cfg;
  return hits;
}

void write_trace_csv(const IterationTrace& trace, std::ostream& os) {
  const std::size_t dim =
      trace.steps.empty() ? trace.final_point.dim() : trace.steps[0].x.dim();
  os << "n";
  for (std::size_t i = 0; i < dim; ++i) os << ",x_" << i;
  os << ",residual,step,ratio\n";
  for (const auto& s : trace.steps) {
    os << s.n;
    for (std::size_t i = 0; i < dim; ++i)
      os << "," << format_double(s.x[i]);
    os << "," << format_double(s.residual) << "," << format_double(s.step)
       << "," << format_double(s.ratio) << "\n";
  }
}

std::string trace_summary_json(const IterationTrace& trace) {
  nlohmann::json j;
  j["status"] = status_name(trace.status);
  j["iterations"] = trace.iterations;
  j["gap"] = trace.gap;
  j["final_point"] = trace.final_point.coords;
  double sup = 0;
  bool any = false;
  for (std::size_t n = 1; n < trace.steps.size(); ++n) {
    const double r = trace.steps[n].ratio;
    if (!std::isnan(r)) {
      sup = std::max(sup, r);
      any = true;
    }
  }
  j["sup_ratio"] = any ? sup : 0.0;
  j["final_residual"] =
      trace.steps.empty() ? 0.0 : trace.steps.back().residual;
  return j.dump(2);
}

}  // namespace bpp
