#pragma once

#include "bpp/mappings.hpp"

namespace bpp {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two unit segments at horizontal offset delta; T scales the vertical
/// coordinate by kappa. S is the identity, beta == kappa.
InstanceBundle registration_model(double delta, double kappa);

/// Same pair, with T collapsing everything to (delta, 0).
InstanceBundle kannan_degenerate_model(double delta);

/// Two vertical rays at offset 1; T(0,t) = (1, 2t+1), S(x,y) = (x, e^{-y}).
/// Searches are capped at parameter t_max (the truncation is recorded);
/// S is declared not subsequentially convergent.
InstanceBundle necessity_counterexample(double t_max);

/// Structural checks run at construction and load time: dimensions agree,
/// T maps samples of A into B, S preserves sides. Throws ValidationError.
void validate_instance(const InstanceBundle& inst, const SearchConfig& cfg);

InstanceBundle load_instance(const std::string& path, const SearchConfig& cfg);
InstanceBundle parse_instance(const std::string& json_text,
                              const SearchConfig& cfg);
std::string instance_to_json(const InstanceBundle& inst);
void save_instance(const InstanceBundle& inst, const std::string& path);

/// Table-driven map: each key maps to the value at the same index; eval
/// matches its argument against the keys within tol.
NonSelfMap table_map(std::vector<Point> keys, std::vector<Point> values,
                     double tol);

struct ScenarioInfo {
  std::string name;
  std::string params;
  std::string description;
};
std::vector<ScenarioInfo> list_scenarios();

}  // namespace bpp
