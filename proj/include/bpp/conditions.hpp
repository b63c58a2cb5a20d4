#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpp/mappings.hpp"

namespace bpp {

enum class Verdict { NotFalsified, Falsified, Vacuous, FalsifiedAtHorizon };

std::string verdict_name(Verdict v);

struct ViolationWitness {
  std::vector<Point> points;  // the tuple the inequality was evaluated on
  double lhs = 0, rhs = 0;
  double margin = 0;  // lhs - rhs
  std::string note;
};

struct ConditionReport {
  std::string condition_id;
  std::size_t n_samples = 0;
  std::size_t n_applicable = 0;
  std::vector<ViolationWitness> violations;
  Verdict verdict = Verdict::Vacuous;
  double worst_margin = -std::numeric_limits<double>::infinity();
  std::string caveat;  // e.g. user-supplied beta without Gamma certificate
};

/// JSON serialization (verdict, counts, worst margin, up to 10 witnesses).
std::string report_to_json(const ConditionReport& report);

struct SamplerOptions {
  enum class Strategy { Grid, Random, Exhaustive };
  Strategy strategy = Strategy::Grid;
  std::uint64_t seed = 0;
  std::size_t n = 32;  // sample count (per side)
};

/// A pair (u, x) with d(Su, STx) = d(A,B) within tol_value (or the S = Id
/// form d(u, Tx) = d(A,B) when with_s is false).
struct PremisePair {
  Point u, x;
};

std::vector<PremisePair> sample_premise_pairs(const InstanceBundle& inst,
                                              const ProximityStructure& prox,
                                              const SearchConfig& cfg,
                                              const SamplerOptions& opts,
                                              bool with_s = true);

ConditionReport check_s_proximal_geraghty(const InstanceBundle& inst,
                                          const ProximityStructure& prox,
                                          const GeraghtyFunction& beta,
                                          const SearchConfig& cfg,
                                          const SamplerOptions& opts);

ConditionReport check_s_proximal_kannan_geraghty(const InstanceBundle& inst,
                                                 const ProximityStructure& prox,
                                                 const GeraghtyFunction& beta,
                                                 const SearchConfig& cfg,
                                                 const SamplerOptions& opts);

ConditionReport check_proximal_contraction_first_kind(
    const InstanceBundle& inst, const ProximityStructure& prox, double alpha,
    const SearchConfig& cfg, const SamplerOptions& opts);

ConditionReport check_proximal_kannan(const InstanceBundle& inst,
                                      const ProximityStructure& prox,
                                      double alpha, const SearchConfig& cfg,
                                      const SamplerOptions& opts);

ConditionReport check_weak_proximal_kannan(const InstanceBundle& inst,
                                           const ProximityStructure& prox,
                                           double alpha,
                                           const SearchConfig& cfg,
                                           const SamplerOptions& opts);

// Self-map checks on a sampled subset of X.
using SelfMap = std::function<Point(const Point&)>;

ConditionReport check_geraghty_self(const SelfMap& f, const PointSet& X,
                                    const GeraghtyFunction& beta,
                                    const SearchConfig& cfg,
                                    const SamplerOptions& opts,
                                    std::optional<double> cap = {});

ConditionReport check_kannan_geraghty_self(const SelfMap& f, const PointSet& X,
                                           const GeraghtyFunction& beta,
                                           const SearchConfig& cfg,
                                           const SamplerOptions& opts,
                                           std::optional<double> cap = {});

ConditionReport check_s_contraction_self(const SelfMap& f,
                                         const AuxiliaryMap& S, double k,
                                         const PointSet& X,
                                         const SearchConfig& cfg,
                                         const SamplerOptions& opts,
                                         std::optional<double> cap = {});

/// Finite-horizon probe of subsequential convergence of S: flags probes
/// whose S-images are numerically Cauchy while the raw sequence never
/// clusters within escape_radius. Evidence, not proof.
ConditionReport probe_subsequential_convergence(
    const AuxiliaryMap& S, const std::vector<std::vector<Point>>& probes,
    std::size_t horizon, double tol, double escape_radius);

}  // namespace bpp
