#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bpp/geometry.hpp"

namespace bpp {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GapInconsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The non-self map T: A -> B.
struct NonSelfMap {
  std::function<Point(const Point&)> eval;
  std::string descriptor;
  std::string persist;  // JSON snippet for instance files (may be empty)
};

/// Auxiliary map S with S(A) ⊆ A and S(B) ⊆ B.
struct AuxiliaryMap {
  std::function<Point(const Point&)> eval;
  std::string descriptor;
  bool claims_injective = true;
  bool claims_subseq_convergent = true;
  std::string persist;

  static AuxiliaryMap identity();
};

enum class GammaStatus { GuaranteedInGamma, Unverified };

struct GeraghtyFunction {
  std::function<double(double)> eval;
  GammaStatus gamma_status = GammaStatus::Unverified;
  std::string descriptor;
  std::string persist;
};

// Library constructors; these are the only ones certified in Gamma.
GeraghtyFunction beta_constant(double k);         // beta(t) = k, k in (0,1)
GeraghtyFunction beta_reciprocal_linear();        // beta(t) = 1/(1+t)
GeraghtyFunction beta_scaled_exp(double k);       // beta(t) = k*exp(-t)

struct AssumptionFlags {
  bool a0_closed = true;
  bool b0_closed = true;
  bool s_subseq_convergent = true;
};

/// A full problem instance: the pair (A, B), the maps, an optional beta,
/// and declared (not verified) assumption flags.
struct InstanceBundle {
  PointSet A, B;
  NonSelfMap T;
  AuxiliaryMap S;
  std::optional<GeraghtyFunction> beta;
  AssumptionFlags flags;

  // closed-form gap attached by scenarios; overrides numeric set_distance
  std::optional<double> known_gap;
  // closed-form proximal step (u with d(Su, STx) = gap) for built-ins
  std::optional<std::function<Point(const Point&)>> exact_step;
  // parameter cap for searches over unbounded sets
  std::optional<double> search_cap;
  bool domain_truncated = false;

  std::string provenance;
};

/// Computes the proximity structure of an instance, honoring its
/// closed-form gap and search caps.
ProximityStructure analyze(const InstanceBundle& inst, const SearchConfig& cfg);

Point apply_T(const Point& x, const InstanceBundle& inst,
              const SearchConfig& cfg);
Point apply_S(const Point& x, const InstanceBundle& inst,
              const SearchConfig& cfg);

/// d*(x) = d(Sx, STx) - d(A,B), clamped to 0 inside (-tol_value, 0).
/// Values below -tol_value signal an inconsistent gap and throw.
double d_star(const Point& x, const InstanceBundle& inst,
              const ProximityStructure& prox, const SearchConfig& cfg);

/// d*(x) with S = Id: d(x, Tx) - d(A,B), same clamping rule.
double d_star_plain(const Point& x, const InstanceBundle& inst,
                    const ProximityStructure& prox, const SearchConfig& cfg);

}  // namespace bpp
