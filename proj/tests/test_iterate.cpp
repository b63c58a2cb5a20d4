#include <cmath>
#include <random>
#include <sstream>

#include "bpp/iterate.hpp"
#include "bpp/scenarios.hpp"
#include "doctest.h"

using namespace bpp;

TEST_CASE("proximal_step: exact and numeric paths agree") {
  SearchConfig cfg;
  IterationConfig icfg;

  auto inst = registration_model(0.5, 0.5);
  const auto prox = analyze(inst, cfg);
  const Point x{{0, 0.8}};
  const Point exact = proximal_step(x, inst, prox, cfg, icfg);
  CHECK(exact == Point{{0, 0.4}});

  // strip the closed form to force the numeric search
  auto numeric_inst = inst;
  numeric_inst.exact_step.reset();
  const Point numeric = proximal_step(x, numeric_inst, prox, cfg, icfg);
  CHECK(distance(exact, numeric) < 1e-6);

  // degenerate model: one step reaches the best proximity point
  const auto deg = kannan_degenerate_model(0.5);
  const auto dprox = analyze(deg, cfg);
  CHECK(proximal_step(Point{{0, 0.9}}, deg, dprox, cfg, icfg) ==
        Point{{0, 0}});
}

TEST_CASE("proximal_step on the counterexample at moderate magnitude") {
  SearchConfig cfg;
  IterationConfig icfg;
  const auto inst = necessity_counterexample(100);
  const auto prox = analyze(inst, cfg);
  const Point x{{0, 3}};
  CHECK(proximal_step(x, inst, prox, cfg, icfg) == Point{{0, 7}});

  auto numeric_inst = inst;
  numeric_inst.exact_step.reset();
  const Point numeric = proximal_step(x, numeric_inst, prox, cfg, icfg);
  // the numeric search solves in the S-image metric; invert to compare
  CHECK(numeric[0] == 0.0);
  CHECK(numeric[1] == doctest::Approx(7.0).epsilon(1e-4));
}

TEST_CASE("registration iteration: geometric decay t_n = kappa^n") {
  SearchConfig cfg;
  IterationConfig icfg;
  icfg.tol_step = 1e-14;
  const auto inst = registration_model(0.5, 0.5);
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 1}}, inst, prox, cfg, icfg);
  CHECK(trace.status == IterationStatus::Converged);
  REQUIRE(trace.steps.size() >= 20);
  for (std::size_t n = 0; n < std::min<std::size_t>(trace.steps.size(), 40);
       ++n) {
    const double expected = std::pow(0.5, double(n));
    CHECK(trace.steps[n].x[0] == 0.0);
    CHECK(trace.steps[n].x[1] ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(norm(trace.final_point) < 1e-9);
}

TEST_CASE("geometric rate holds across kappa values") {
  SearchConfig cfg;
  IterationConfig icfg;
  icfg.tol_step = 1e-16;
  icfg.max_iters = 400;
  for (const double kappa : {0.25, 0.5, 0.9}) {
    const auto inst = registration_model(0.5, kappa);
    const auto prox = analyze(inst, cfg);
    const auto trace = run_iteration(Point{{0, 1}}, inst, prox, cfg, icfg);
    const std::size_t limit = std::min<std::size_t>(trace.steps.size(), 50);
    REQUIRE(limit >= 10);
    for (std::size_t n = 0; n < limit; ++n)
      CHECK(trace.steps[n].x[1] ==
            doctest::Approx(std::pow(kappa, double(n))).epsilon(1e-10));
  }
}

TEST_CASE("start-point independence of the registration limit") {
  SearchConfig cfg;
  IterationConfig icfg;
  const auto inst = registration_model(0.5, 0.5);
  const auto prox = analyze(inst, cfg);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> pick(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto trace =
        run_iteration(Point{{0, pick(rng)}}, inst, prox, cfg, icfg);
    CHECK(trace.status == IterationStatus::Converged);
    CHECK(norm(trace.final_point) <= 10 * icfg.tol_step);
  }
}

TEST_CASE("counterexample iteration diverges with t_n = 2^n - 1") {
  SearchConfig cfg;
  IterationConfig icfg;
  const auto inst = necessity_counterexample(100);
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 0}}, inst, prox, cfg, icfg);
  CHECK(trace.status == IterationStatus::Diverged);
  for (std::size_t n = 0; n < std::min<std::size_t>(trace.steps.size(), 31);
       ++n) {
    CHECK(trace.steps[n].x[1] == std::pow(2.0, double(n)) - 1.0);
  }
  // S-image steps shrink while raw steps explode: the failure signature
  REQUIRE(trace.steps.size() > 10);
  CHECK(trace.steps[10].step < trace.steps[2].step);
  CHECK(trace.steps[10].raw_step > trace.steps[2].raw_step);
}

TEST_CASE("gap-zero instance converges in place") {
  SearchConfig cfg;
  IterationConfig icfg;
  InstanceBundle inst{
      PointSet::finite({Point{{1, 1}}}),
      PointSet::finite({Point{{1, 1}}}),
      NonSelfMap{[](const Point& p) { return p; }, "identity", ""},
      AuxiliaryMap::identity(),
      {}, {}, {}, {}, {}, false, ""};
  const auto prox = analyze(inst, cfg);
  CHECK(prox.gap == 0.0);
  const auto trace = run_iteration(Point{{1, 1}}, inst, prox, cfg, icfg);
  CHECK(trace.status == IterationStatus::Converged);
  CHECK(trace.iterations == 0);
  CHECK(trace.final_point == Point{{1, 1}});
}

TEST_CASE("step failure is reported, not masked") {
  SearchConfig cfg;
  IterationConfig icfg;
  // T sends everything to the far element of B: the premise equality has
  // no solution, so the very first step must fail.
  InstanceBundle inst{
      PointSet::finite({Point{{0, 0}}}),
      PointSet::finite({Point{{2, 0}}, Point{{2, 5}}}),
      NonSelfMap{[](const Point&) { return Point{{2, 5}}; }, "const (2,5)",
                 ""},
      AuxiliaryMap::identity(),
      {}, {}, {}, {}, {}, false, ""};
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 0}}, inst, prox, cfg, icfg);
  CHECK(trace.status == IterationStatus::StepFailed);
  CHECK(trace.iterations == 0);

  CHECK_THROWS_AS(proximal_step(Point{{0, 0}}, inst, prox, cfg, icfg),
                  StepFailedError);
}

TEST_CASE("run_iteration rejects start points outside A0") {
  SearchConfig cfg;
  IterationConfig icfg;
  InstanceBundle inst{
      PointSet::finite({Point{{0, 0}}, Point{{0, 9}}}),
      PointSet::finite({Point{{2, 0}}}),
      NonSelfMap{[](const Point&) { return Point{{2, 0}}; }, "const", ""},
      AuxiliaryMap::identity(),
      {}, {}, {}, {}, {}, false, ""};
  const auto prox = analyze(inst, cfg);
  CHECK_THROWS_AS(run_iteration(Point{{0, 9}}, inst, prox, cfg, icfg),
                  std::invalid_argument);
}

TEST_CASE("convergence diagnostics against beta bounds") {
  SearchConfig cfg;
  IterationConfig icfg;
  icfg.tol_step = 1e-14;
  const auto inst = registration_model(0.5, 0.5);
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 1}}, inst, prox, cfg, icfg);

  const auto beta = beta_constant(0.5);
  const auto diag = convergence_diagnostics(trace, &beta, false, icfg);
  CHECK(!diag.vacuous);
  CHECK(diag.all_bounds_ok);
  CHECK(diag.sup_ratio == doctest::Approx(0.5).epsilon(1e-9));
  for (const double r : diag.ratio_series)
    CHECK(r == doctest::Approx(0.5).epsilon(1e-6));

  // a beta below the true rate flags the run
  const auto tight = beta_constant(0.4);
  CHECK(!convergence_diagnostics(trace, &tight, false, icfg).all_bounds_ok);
}

TEST_CASE("diagnostics on the counterexample show raw escape") {
  SearchConfig cfg;
  IterationConfig icfg;
  const auto inst = necessity_counterexample(100);
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 0}}, inst, prox, cfg, icfg);
  const auto diag = convergence_diagnostics(trace, nullptr, false, icfg);
  REQUIRE(diag.raw_ratio_series.size() >= 5);
  // raw steps double each iteration: d(x_n, x_{n+1}) = 2^n
  for (std::size_t i = 1; i < 5; ++i)
    CHECK(diag.raw_ratio_series[i] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("diagnostics are vacuous on trivially short traces") {
  IterationConfig icfg;
  IterationTrace trace;
  trace.steps.push_back({0, Point{{0, 0}}, Point{{0, 0}}, Point{{0, 0}}, 0, 0,
                         0, 0, 0});
  const auto diag = convergence_diagnostics(trace, nullptr, false, icfg);
  CHECK(diag.vacuous);
}

TEST_CASE("brute-force oracle on the built-in scenarios") {
  SearchConfig cfg;

  // registration: the unique best proximity point is (0, 0)
  const auto reg = registration_model(0.5, 0.5);
  const auto reg_prox = analyze(reg, cfg);
  const auto reg_hits =
      brute_force_best_proximity(reg, reg_prox, cfg, 1e-6, 10001);
  REQUIRE(!reg_hits.empty());
  CHECK(distance(reg_hits.front().x, Point{{0, 0}}) < 1e-4);
  // hits cluster around t = 0 only
  for (const auto& h : reg_hits) CHECK(h.x[1] <= 2.1e-3);

  // degenerate model: same unique point
  const auto deg = kannan_degenerate_model(0.5);
  const auto deg_prox = analyze(deg, cfg);
  const auto deg_hits =
      brute_force_best_proximity(deg, deg_prox, cfg, 1e-9, 10001);
  REQUIRE(!deg_hits.empty());
  CHECK(deg_hits.front().x == Point{{0, 0}});

  // counterexample: no best proximity point anywhere on [0, 100]
  const auto cex = necessity_counterexample(100);
  const auto cex_prox = analyze(cex, cfg);
  const auto cex_hits =
      brute_force_best_proximity(cex, cex_prox, cfg, 1e-6, 10001);
  CHECK(cex_hits.empty());

  // the infimum of the residual over the ray is sqrt(2) - 1, attained at 0
  double min_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 10000; ++i) {
    const Point x = cex.A.at(100.0 * i / 10000.0);
    min_res = std::min(min_res, distance(x, cex.T.eval(x)) - cex_prox.gap);
  }
  CHECK(min_res == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-9));
}

TEST_CASE("trace CSV and summary formats") {
  SearchConfig cfg;
  IterationConfig icfg;
  const auto inst = registration_model(0.5, 0.5);
  const auto prox = analyze(inst, cfg);
  const auto trace = run_iteration(Point{{0, 1}}, inst, prox, cfg, icfg);

  std::ostringstream os;
  write_trace_csv(trace, os);
  const std::string csv = os.str();
  CHECK(csv.rfind("n,x_0,x_1,residual,step,ratio\n", 0) == 0);
  CHECK(csv.find("\n0,0,1,") != std::string::npos);

  const std::string summary = trace_summary_json(trace);
  CHECK(summary.find("\"status\": \"Converged\"") != std::string::npos);
  CHECK(summary.find("\"gap\": 0.5") != std::string::npos);
}
