#include "bpp/mappings.hpp"

#include <cmath>

namespace bpp {

AuxiliaryMap AuxiliaryMap::identity() {
  return {[](const Point& p) { return p; }, "identity", true, true,
          R"({"kind":"identity"})"};
}

GeraghtyFunction beta_constant(double k) {
  if (!(k > 0 && k < 1))
    throw std::invalid_argument("beta_constant: k must lie in (0,1)");
  return {[k](double) { return k; }, GammaStatus::GuaranteedInGamma,
          "constant(" + format_double(k) + ")",
          R"({"kind":"constant","params":{"k":")" + format_double(k) +
              R"("}})"};
}

GeraghtyFunction beta_reciprocal_linear() {
  return {[](double t) { return 1.0 / (1.0 + t); },
          GammaStatus::GuaranteedInGamma, "reciprocal_linear",
          R"({"kind":"reciprocal_linear"})"};
}

GeraghtyFunction beta_scaled_exp(double k) {
  if (!(k > 0 && k < 1))
    throw std::invalid_argument("beta_scaled_exp: k must lie in (0,1)");
  return {[k](double t) { return k * std::exp(-t); },
          GammaStatus::GuaranteedInGamma,
          "scaled_exp(" + format_double(k) + ")",
          R"({"kind":"scaled_exp","params":{"k":")" + format_double(k) +
              R"("}})"};
}

ProximityStructure analyze(const InstanceBundle& inst,
                           const SearchConfig& cfg) {
  return proximity_sets(inst.A, inst.B, cfg, inst.known_gap, inst.search_cap,
                        inst.search_cap);
}

Point apply_T(const Point& x, const InstanceBundle& inst,
              const SearchConfig& cfg) {
  if (!inst.A.contains(x, cfg.tol_membership))
    throw DomainError("apply_T: point is not a member of A");
  return inst.T.eval(x);
}

Point apply_S(const Point& x, const InstanceBundle& inst,
              const SearchConfig& cfg) {
  if (!inst.A.contains(x, cfg.tol_membership) &&
      !inst.B.contains(x, cfg.tol_membership))
    throw DomainError("apply_S: point is neither in A nor in B");
  return inst.S.eval(x);
}

namespace {

double clamp_residual(double raw, double tol) {
  if (raw < -tol)
    throw GapInconsistencyError("gap inconsistency: d* = " +
                                std::to_string(raw));
  return raw < 0 ? 0.0 : raw;
}

}  // namespace

double d_star(const Point& x, const InstanceBundle& inst,
              const ProximityStructure& prox, const SearchConfig& cfg) {
  const Point sx = inst.S.eval(x);
  const Point stx = inst.S.eval(inst.T.eval(x));
  return clamp_residual(distance(sx, stx) - prox.gap, cfg.tol_value);
}

double d_star_plain(const Point& x, const InstanceBundle& inst,
                    const ProximityStructure& prox, const SearchConfig& cfg) {
  return clamp_residual(distance(x, inst.T.eval(x)) - prox.gap, cfg.tol_value);
}

}  // namespace bpp
