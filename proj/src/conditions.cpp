#include "bpp/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "json.hpp"

namespace bpp {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::NotFalsified:
      return "NotFalsified";
    case Verdict::Falsified:
      return "Falsified";
    case Verdict::Vacuous:
      return "Vacuous";
    case Verdict::FalsifiedAtHorizon:
      return "Falsified-at-horizon";
  }
  return "?";
}

std::string report_to_json(const ConditionReport& r) {
  nlohmann::json j;
  j["condition_id"] = r.condition_id;
  j["n_samples"] = r.n_samples;
  j["n_applicable"] = r.n_applicable;
  j["verdict"] = verdict_name(r.verdict);
  j["worst_margin"] = r.n_applicable > 0 ? r.worst_margin : 0.0;
  j["n_violations"] = r.violations.size();
  if (!r.caveat.empty()) j["caveat"] = r.caveat;
  auto& vs = j["violations"] = nlohmann::json::array();
  const std::size_t cap = std::min<std::size_t>(r.violations.size(), 10);
  for (std::size_t i = 0; i < cap; ++i) {
    const auto& w = r.violations[i];
    nlohmann::json v;
    auto& pts = v["points"] = nlohmann::json::array();
    for (const auto& p : w.points) pts.push_back(p.coords);
    v["lhs"] = w.lhs;
    v["rhs"] = w.rhs;
    v["margin"] = w.margin;
    if (!w.note.empty()) v["note"] = w.note;
    vs.push_back(v);
  }
  return j.dump(2);
}

namespace {

void finish(ConditionReport& r) {
  if (!r.violations.empty())
    r.verdict = Verdict::Falsified;
  else if (r.n_applicable == 0)
    r.verdict = Verdict::Vacuous;
  else
    r.verdict = Verdict::NotFalsified;
}

// Sample points of a region of a set (grid positions are deterministic,
// random positions are seeded).
std::vector<Point> sample_region(const PointSet& owner, const SetRegion& reg,
                                 const SamplerOptions& opts) {
  std::vector<Point> out;
  if (reg.kind == PointSet::Kind::Finite) {
    const auto& members = reg.points;
    if (members.empty()) return out;
    if (opts.strategy == SamplerOptions::Strategy::Random) {
      std::mt19937_64 rng(opts.seed);
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      for (std::size_t i = 0; i < opts.n; ++i) out.push_back(members[pick(rng)]);
    } else if (opts.strategy == SamplerOptions::Strategy::Exhaustive ||
               members.size() <= opts.n) {
      out = members;
    } else {
      const double stride = double(members.size() - 1) / double(opts.n - 1);
      for (std::size_t i = 0; i < opts.n; ++i)
        out.push_back(members[std::size_t(std::round(i * stride))]);
    }
    return out;
  }
  if (reg.intervals.empty()) return out;
  double total = 0;
  for (const auto& iv : reg.intervals) total += iv.hi - iv.lo;
  auto at_pos = [&](double s) {
    for (const auto& iv : reg.intervals) {
      const double len = iv.hi - iv.lo;
      if (s <= len || &iv == &reg.intervals.back())
        return owner.at(std::min(iv.lo + s, iv.hi));
      s -= len;
    }
    return owner.at(reg.intervals.back().hi);
  };
  if (total == 0) {
    for (const auto& iv : reg.intervals) out.push_back(owner.at(iv.lo));
    return out;
  }
  if (opts.strategy == SamplerOptions::Strategy::Random) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> pick(0.0, total);
    for (std::size_t i = 0; i < opts.n; ++i) out.push_back(at_pos(pick(rng)));
  } else {
    const std::size_t n = std::max<std::size_t>(opts.n, 2);
    for (std::size_t i = 0; i < n; ++i)
      out.push_back(at_pos(total * double(i) / double(n - 1)));
  }
  return out;
}

// Finds u in A0 with d(Su, STx) = gap (S dropped when with_s is false).
std::optional<Point> solve_premise(const InstanceBundle& inst,
                                   const ProximityStructure& prox,
                                   const SearchConfig& cfg, const Point& x,
                                   bool with_s) {
  const Point tx = inst.T.eval(x);
  const Point target = with_s ? inst.S.eval(tx) : tx;
  auto residual = [&](const Point& u) {
    const Point su = with_s ? inst.S.eval(u) : u;
    return std::abs(distance(su, target) - prox.gap);
  };
  if (inst.exact_step &&
      (with_s || inst.S.descriptor == "identity")) {
    Point u = (*inst.exact_step)(x);
    if (residual(u) <= cfg.tol_value) return u;
  }
  if (prox.a0.kind == PointSet::Kind::Finite) {
    std::optional<Point> best;
    double best_r = std::numeric_limits<double>::infinity();
    for (const auto& u : prox.a0.points) {
      const double r = residual(u);
      if (r < best_r) {
        best_r = r;
        best = u;
      }
    }
    if (best && best_r <= cfg.tol_value) return best;
    return std::nullopt;
  }
  std::optional<Point> best;
  double best_r = std::numeric_limits<double>::infinity();
  for (const auto& iv : prox.a0.intervals) {
    auto f = [&](double t) { return residual(inst.A.at(t)); };
    const MinResult m = minimize_1d(f, iv.lo, iv.hi, cfg.grid_n, cfg.tol_param);
    if (m.value < best_r) {
      best_r = m.value;
      best = inst.A.at(m.t);
    }
  }
  if (best && best_r <= cfg.tol_value) return best;
  return std::nullopt;
}

}  // namespace

std::vector<PremisePair> sample_premise_pairs(const InstanceBundle& inst,
                                              const ProximityStructure& prox,
                                              const SearchConfig& cfg,
                                              const SamplerOptions& opts,
                                              bool with_s) {
  std::vector<PremisePair> pairs;
  if (opts.strategy == SamplerOptions::Strategy::Exhaustive &&
      inst.A.kind() == PointSet::Kind::Finite) {
    // all (u, x) in A x A0 satisfying the premise equality
    for (const auto& x : prox.a0.points) {
      const Point tx = inst.T.eval(x);
      const Point target = with_s ? inst.S.eval(tx) : tx;
      for (const auto& u : inst.A.points()) {
        const Point su = with_s ? inst.S.eval(u) : u;
        if (std::abs(distance(su, target) - prox.gap) <= cfg.tol_value)
          pairs.push_back({u, x});
      }
    }
    return pairs;
  }
  for (const auto& x : sample_region(inst.A, prox.a0, opts)) {
    if (auto u = solve_premise(inst, prox, cfg, x, with_s))
      pairs.push_back({*u, x});
  }
  return pairs;
}

namespace {

// Shared driver: evaluates a conclusion inequality over pairs of premise
// samples. eval returns {lhs, rhs, applicable}.
struct PairEval {
  double lhs, rhs;
  bool applicable;
};

ConditionReport run_pairwise(
    const std::string& id, const std::vector<PremisePair>& singles,
    const SearchConfig& cfg, bool ordered,
    const std::function<PairEval(const PremisePair&, const PremisePair&)>&
        eval) {
  ConditionReport r;
  r.condition_id = id;
  for (std::size_t i = 0; i < singles.size(); ++i) {
    for (std::size_t j = ordered ? 0 : i + 1; j < singles.size(); ++j) {
      if (j == i) continue;
      ++r.n_samples;
      const PairEval e = eval(singles[i], singles[j]);
      if (!e.applicable) continue;
      ++r.n_applicable;
      const double margin = e.lhs - e.rhs;
      r.worst_margin = std::max(r.worst_margin, margin);
      if (margin > cfg.tol_value) {
        ViolationWitness w;
        w.points = {singles[i].u, singles[i].x, singles[j].u, singles[j].x};
        w.lhs = e.lhs;
        w.rhs = e.rhs;
        w.margin = margin;
        w.note = "points are (u,x,v,y)";
        r.violations.push_back(w);
      }
    }
  }
  finish(r);
  return r;
}

std::string beta_caveat(const GeraghtyFunction& beta) {
  return beta.gamma_status == GammaStatus::Unverified
             ? "beta is user-supplied; Gamma membership not certified"
             : "";
}

}  // namespace

ConditionReport check_s_proximal_geraghty(const InstanceBundle& inst,
                                          const ProximityStructure& prox,
                                          const GeraghtyFunction& beta,
                                          const SearchConfig& cfg,
                                          const SamplerOptions& opts) {
  const auto singles = sample_premise_pairs(inst, prox, cfg, opts, true);
  auto report = run_pairwise(
      "s-proximal-geraghty", singles, cfg, false,
      [&](const PremisePair& a, const PremisePair& b) -> PairEval {
        const double lhs = distance(inst.S.eval(a.u), inst.S.eval(b.u));
        const double dxy = distance(inst.S.eval(a.x), inst.S.eval(b.x));
        return {lhs, beta.eval(dxy) * dxy, true};
      });
  report.caveat = beta_caveat(beta);
  return report;
}

ConditionReport check_s_proximal_kannan_geraghty(const InstanceBundle& inst,
                                                 const ProximityStructure& prox,
                                                 const GeraghtyFunction& beta,
                                                 const SearchConfig& cfg,
                                                 const SamplerOptions& opts) {
  const auto singles = sample_premise_pairs(inst, prox, cfg, opts, true);
  auto report = run_pairwise(
      "s-proximal-kannan-geraghty", singles, cfg, false,
      [&](const PremisePair& a, const PremisePair& b) -> PairEval {
        const double lhs = distance(inst.S.eval(a.u), inst.S.eval(b.u));
        const double dxy = distance(inst.S.eval(a.x), inst.S.eval(b.x));
        const double rhs = beta.eval(dxy) * (d_star(a.x, inst, prox, cfg) +
                                             d_star(b.x, inst, prox, cfg));
        return {lhs, rhs, true};
      });
  report.caveat = beta_caveat(beta);
  return report;
}

ConditionReport check_proximal_contraction_first_kind(
    const InstanceBundle& inst, const ProximityStructure& prox, double alpha,
    const SearchConfig& cfg, const SamplerOptions& opts) {
  if (!(alpha >= 0 && alpha < 1))
    throw std::invalid_argument("alpha must lie in [0,1)");
  const auto singles = sample_premise_pairs(inst, prox, cfg, opts, false);
  return run_pairwise(
      "proximal-contraction-first-kind", singles, cfg, false,
      [&](const PremisePair& a, const PremisePair& b) -> PairEval {
        return {distance(a.u, b.u), alpha * distance(a.x, b.x), true};
      });
}

ConditionReport check_proximal_kannan(const InstanceBundle& inst,
                                      const ProximityStructure& prox,
                                      double alpha, const SearchConfig& cfg,
                                      const SamplerOptions& opts) {
  if (!(alpha >= 0 && alpha < 0.5))
    throw std::invalid_argument("alpha must lie in [0,1/2)");
  const auto singles = sample_premise_pairs(inst, prox, cfg, opts, false);
  return run_pairwise(
      "proximal-kannan", singles, cfg, false,
      [&](const PremisePair& a, const PremisePair& b) -> PairEval {
        const double rhs = alpha * (d_star_plain(a.x, inst, prox, cfg) +
                                    d_star_plain(b.x, inst, prox, cfg));
        return {distance(a.u, b.u), rhs, true};
      });
}

ConditionReport check_weak_proximal_kannan(const InstanceBundle& inst,
                                           const ProximityStructure& prox,
                                           double alpha,
                                           const SearchConfig& cfg,
                                           const SamplerOptions& opts) {
  if (!(alpha > 0 && alpha < 0.5))
    throw std::invalid_argument("alpha must lie in (0,1/2)");
  const double r = alpha / (1.0 - alpha);
  const auto singles = sample_premise_pairs(inst, prox, cfg, opts, false);
  return run_pairwise(
      "weak-proximal-kannan", singles, cfg, true,
      [&](const PremisePair& a, const PremisePair& b) -> PairEval {
        const double dsx = d_star_plain(a.x, inst, prox, cfg);
        const double dxy = distance(a.x, b.x);
        const bool guard = dsx / r <= dxy + cfg.tol_value;
        const double rhs =
            alpha * (dsx + d_star_plain(b.x, inst, prox, cfg));
        return {distance(a.u, b.u), rhs, guard};
      });
}

namespace {

std::vector<Point> sample_set(const PointSet& X, const SamplerOptions& opts,
                              std::optional<double> cap) {
  SetRegion whole;
  whole.kind = X.kind();
  whole.full_set = true;
  if (X.kind() == PointSet::Kind::Finite) {
    whole.points = X.points();
  } else {
    double hi = X.hi();
    if (cap) hi = std::min(hi, *cap);
    if (std::isinf(hi))
      throw BracketError("sampling an unbounded set requires a cap");
    whole.intervals.push_back({X.lo(), hi});
  }
  return sample_region(X, whole, opts);
}

ConditionReport run_selfmap_pairs(
    const std::string& id, const std::vector<Point>& xs,
    const SearchConfig& cfg,
    const std::function<PairEval(const Point&, const Point&)>& eval) {
  std::vector<PremisePair> singles;
  singles.reserve(xs.size());
  for (const auto& x : xs) singles.push_back({x, x});
  return run_pairwise(id, singles, cfg, false,
                      [&](const PremisePair& a, const PremisePair& b) {
                        return eval(a.x, b.x);
                      });
}

}  // namespace

ConditionReport check_geraghty_self(const SelfMap& f, const PointSet& X,
                                    const GeraghtyFunction& beta,
                                    const SearchConfig& cfg,
                                    const SamplerOptions& opts,
                                    std::optional<double> cap) {
  auto report = run_selfmap_pairs(
      "geraghty-self", sample_set(X, opts, cap), cfg,
      [&](const Point& x, const Point& y) -> PairEval {
        const double dxy = distance(x, y);
        return {distance(f(x), f(y)), beta.eval(dxy) * dxy, true};
      });
  report.caveat = beta_caveat(beta);
  return report;
}

ConditionReport check_kannan_geraghty_self(const SelfMap& f, const PointSet& X,
                                           const GeraghtyFunction& beta,
                                           const SearchConfig& cfg,
                                           const SamplerOptions& opts,
                                           std::optional<double> cap) {
  auto report = run_selfmap_pairs(
      "kannan-geraghty-self", sample_set(X, opts, cap), cfg,
      [&](const Point& x, const Point& y) -> PairEval {
        const double dxy = distance(x, y);
        const double rhs = beta.eval(dxy) * 0.5 *
                           (distance(x, f(x)) + distance(y, f(y)));
        return {distance(f(x), f(y)), rhs, true};
      });
  report.caveat = beta_caveat(beta);
  return report;
}

ConditionReport check_s_contraction_self(const SelfMap& f,
                                         const AuxiliaryMap& S, double k,
                                         const PointSet& X,
                                         const SearchConfig& cfg,
                                         const SamplerOptions& opts,
                                         std::optional<double> cap) {
  if (!(k > 0 && k < 1))
    throw std::invalid_argument("k must lie in (0,1)");
  return run_selfmap_pairs(
      "s-contraction-self", sample_set(X, opts, cap), cfg,
      [&](const Point& x, const Point& y) -> PairEval {
        const double lhs = distance(S.eval(f(x)), S.eval(f(y)));
        return {lhs, k * distance(S.eval(x), S.eval(y)), true};
      });
}

ConditionReport probe_subsequential_convergence(
    const AuxiliaryMap& S, const std::vector<std::vector<Point>>& probes,
    std::size_t horizon, double tol, double escape_radius) {
  ConditionReport r;
  r.condition_id = "subseq-convergence";
  r.caveat = "finite-horizon evidence, not proof";
  bool falsified = false;
  for (const auto& probe : probes) {
    ++r.n_samples;
    const std::size_t len = std::min(horizon, probe.size());
    if (len < 4) continue;
    std::vector<Point> images;
    images.reserve(len);
    for (std::size_t i = 0; i < len; ++i) images.push_back(S.eval(probe[i]));
    const std::size_t tail_start = len - std::max<std::size_t>(len / 4, 2);
    double image_diam = 0;
    double raw_min_sep = std::numeric_limits<double>::infinity();
    for (std::size_t i = tail_start; i < len; ++i)
      for (std::size_t j = i + 1; j < len; ++j) {
        image_diam = std::max(image_diam, distance(images[i], images[j]));
        raw_min_sep = std::min(raw_min_sep, distance(probe[i], probe[j]));
      }
    const bool images_cauchy = image_diam < tol;
    if (!images_cauchy) continue;  // failure premise absent
    ++r.n_applicable;
    r.worst_margin = std::max(r.worst_margin, raw_min_sep - escape_radius);
    if (raw_min_sep >= escape_radius) {
      falsified = true;
      ViolationWitness w;
      w.points = {probe[tail_start], probe[len - 1]};
      w.lhs = raw_min_sep;
      w.rhs = escape_radius;
      w.margin = raw_min_sep - escape_radius;
      w.note = "S-images Cauchy at horizon while raw tail never clusters";
      r.violations.push_back(w);
    }
  }
  if (falsified)
    r.verdict = Verdict::FalsifiedAtHorizon;
  else if (r.n_samples == 0)
    r.verdict = Verdict::Vacuous;
  else
    r.verdict = Verdict::NotFalsified;
  return r;
}

}  // namespace bpp
