#pragma once

#include <iosfwd>

#include "bpp/mappings.hpp"

namespace bpp {

struct StepFailedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IterationConfig {
  std::size_t max_iters = 10000;
  double tol_step = 1e-10;       // on d(Sx_{n+1}, Sx_n)
  double tol_residual = 1e-9;    // on |d(Sx_n, STx_n) - gap|
  double divergence_radius = 1e12;
};

enum class IterationStatus { Converged, MaxIters, Diverged, StepFailed };

std::string status_name(IterationStatus s);

struct IterationStep {
  std::size_t n = 0;
  Point x, sx, stx;
  double residual = 0;   // d(Sx_n, STx_n) - gap, clamped at 0
  double step = 0;       // d(Sx_n, Sx_{n+1})
  double ratio = 0;      // step_n / step_{n-1} in S-image space (NaN if n/a)
  double raw_step = 0;   // d(x_n, x_{n+1})
  double raw_ratio = 0;
};

struct IterationTrace {
  std::vector<IterationStep> steps;
  IterationStatus status = IterationStatus::MaxIters;
  Point final_point;
  std::size_t iterations = 0;
  double gap = 0;
};

/// One proximal step: the u in A0 with d(Su, STx) = d(A,B) within
/// tol_residual. Uses the instance's closed-form step when attached,
/// otherwise a 1-D / exhaustive search over A0. Throws StepFailedError
/// when no candidate achieves the equality.
Point proximal_step(const Point& x, const InstanceBundle& inst,
                    const ProximityStructure& prox, const SearchConfig& cfg,
                    const IterationConfig& icfg);

IterationTrace run_iteration(const Point& x0, const InstanceBundle& inst,
                             const ProximityStructure& prox,
                             const SearchConfig& cfg,
                             const IterationConfig& icfg);

struct Diagnostics {
  bool vacuous = true;
  std::vector<double> ratio_series;      // S-image step ratios
  std::vector<double> raw_ratio_series;  // raw step ratios
  double sup_ratio = 0;
  std::vector<bool> bound_ok;            // per ratio entry, when beta given
  bool all_bounds_ok = true;
};

/// Ratio diagnostics; with a beta, checks each S-image ratio against
/// beta(s_{n-1}) (Geraghty runs) or beta/(1-beta) (Kannan-type runs).
Diagnostics convergence_diagnostics(const IterationTrace& trace,
                                    const GeraghtyFunction* beta,
                                    bool kannan_type,
                                    const IterationConfig& icfg);

struct OracleHit {
  Point x;
  double residual;
};

/// Independent brute-force search for best proximity points: enumerates
/// or grids A and returns every x with d(x, Tx) - d(A,B) <= tol_residual,
/// sorted by residual. Shares no code with the proximal iteration.
std::vector<OracleHit> brute_force_best_proximity(
    const InstanceBundle& inst, const ProximityStructure& prox,
    const SearchConfig& cfg, double tol_residual, std::size_t grid_points,
    std::optional<ParamInterval> range = {});

void write_trace_csv(const IterationTrace& trace, std::ostream& os);
std::string trace_summary_json(const IterationTrace& trace);

}  // namespace bpp
