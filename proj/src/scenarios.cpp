#include "bpp/scenarios.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bpp {

using nlohmann::json;

namespace {

double parse_number(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
      throw ParseError("instance schema violation at " + where +
                       ": not a decimal number: '" + s + "'");
    return v;
  }
  throw ParseError("instance schema violation at " + where +
                   ": expected number or decimal string");
}

const json& field(const json& j, const std::string& name,
                  const std::string& where) {
  auto it = j.find(name);
  if (it == j.end())
    throw ParseError("instance schema violation at " + where +
                     ": missing field '" + name + "'");
  return *it;
}

Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array())
    throw ParseError("instance schema violation at " + where +
                     ": expected coordinate array");
  Point p;
  for (std::size_t i = 0; i < j.size(); ++i)
    p.coords.push_back(parse_number(j[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

json emit_point(const Point& p) {
  json a = json::array();
  for (double c : p.coords) a.push_back(format_double(c));
  return a;
}

PointSet parse_set(const json& j, const std::string& where) {
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind == "finite") {
    const json& pts = field(j, "points", where);
    std::vector<Point> points;
    for (std::size_t i = 0; i < pts.size(); ++i)
      points.push_back(parse_point(pts[i], where + ".points"));
    return PointSet::finite(std::move(points));
  }
  if (kind == "param1d") {
    return PointSet::param1d(parse_point(field(j, "base", where), where + ".base"),
                             parse_point(field(j, "dir", where), where + ".dir"),
                             parse_number(field(j, "lo", where), where + ".lo"),
                             parse_number(field(j, "hi", where), where + ".hi"));
  }
  throw ParseError("instance schema violation at " + where +
                   ": unknown set kind '" + kind + "'");
}

json emit_set(const PointSet& s) {
  json j;
  if (s.kind() == PointSet::Kind::Finite) {
    j["kind"] = "finite";
    auto& pts = j["points"] = json::array();
    for (const auto& p : s.points()) pts.push_back(emit_point(p));
  } else {
    j["kind"] = "param1d";
    j["base"] = emit_point(s.base());
    j["dir"] = emit_point(s.dir());
    j["lo"] = format_double(s.lo());
    j["hi"] = std::isinf(s.hi()) ? json("inf") : json(format_double(s.hi()));
  }
  return j;
}

std::function<Point(const Point&)> affine_eval(std::vector<std::vector<double>> m,
                                               Point offset) {
  return [m = std::move(m), offset = std::move(offset)](const Point& x) {
    Point y = offset;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t k = 0; k < m[i].size(); ++k)
        y.coords[i] += m[i][k] * x[k];
    return y;
  };
}

struct ParsedMap {
  std::function<Point(const Point&)> eval;
  std::string descriptor;
  std::string persist;
};

ParsedMap parse_map(const json& j, const std::string& where, double tol) {
  const std::string kind = field(j, "kind", where).get<std::string>();
  json persist;
  persist["kind"] = kind;
  if (kind == "identity") {
    return {[](const Point& p) { return p; }, "identity", persist.dump()};
  }
  if (kind == "affine") {
    const json& mj = field(j, "matrix", where);
    const json& oj = field(j, "offset", where);
    std::vector<std::vector<double>> m;
    json mp = json::array();
    for (std::size_t i = 0; i < mj.size(); ++i) {
      std::vector<double> row;
      json rp = json::array();
      for (std::size_t k = 0; k < mj[i].size(); ++k) {
        row.push_back(parse_number(mj[i][k], where + ".matrix"));
        rp.push_back(format_double(row.back()));
      }
      m.push_back(std::move(row));
      mp.push_back(rp);
    }
    const Point off = parse_point(oj, where + ".offset");
    persist["matrix"] = mp;
    persist["offset"] = emit_point(off);
    return {affine_eval(std::move(m), off), "affine", persist.dump()};
  }
  if (kind == "exp_coord") {
    const std::size_t coord = static_cast<std::size_t>(
        parse_number(field(field(j, "params", where), "coord", where),
                     where + ".params.coord"));
    persist["params"]["coord"] = coord;
    return {[coord](const Point& p) {
              Point q = p;
              q.coords[coord] = std::exp(-p[coord]);
              return q;
            },
            "exp_coord(" + std::to_string(coord) + ")", persist.dump()};
  }
  if (kind == "table") {
    const json& pairs = field(j, "pairs", where);
    std::vector<Point> keys, values;
    json pp = json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      keys.push_back(parse_point(pairs[i][0], where + ".pairs"));
      values.push_back(parse_point(pairs[i][1], where + ".pairs"));
      pp.push_back(json::array({emit_point(keys.back()), emit_point(values.back())}));
    }
    persist["pairs"] = pp;
    auto eval = [keys, values, tol](const Point& x) {
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (distance(keys[i], x) <= tol) return values[i];
      throw DomainError("table map: argument matches no table key");
    };
    return {eval, "table", persist.dump()};
  }
  throw ParseError("instance schema violation at " + where +
                   ": unknown map kind '" + kind + "'");
}

GeraghtyFunction parse_beta(const json& j, const std::string& where) {
  const std::string kind = field(j, "kind", where).get<std::string>();
  if (kind == "constant")
    return beta_constant(parse_number(
        field(field(j, "params", where), "k", where), where + ".params.k"));
  if (kind == "reciprocal_linear") return beta_reciprocal_linear();
  if (kind == "scaled_exp")
    return beta_scaled_exp(parse_number(
        field(field(j, "params", where), "k", where), where + ".params.k"));
  throw ParseError("instance schema violation at " + where +
                   ": unknown beta kind '" + kind + "'");
}

std::vector<Point> validation_samples(const PointSet& s,
                                      std::optional<double> cap) {
  std::vector<Point> out;
  if (s.kind() == PointSet::Kind::Finite) {
    for (const auto& p : s.points()) {
      out.push_back(p);
      if (out.size() >= 64) break;
    }
    return out;
  }
  double hi = s.hi();
  if (cap) hi = std::min(hi, *cap);
  if (std::isinf(hi)) hi = s.lo() + 1.0;
  for (int i = 0; i <= 32; ++i)
    out.push_back(s.at(s.lo() + (hi - s.lo()) * double(i) / 32.0));
  return out;
}

// Builds the persist JSON of an affine map with explicit arrays; a nested
// brace-init list of strings would be read back as an object.
std::string affine_persist(const std::vector<std::vector<double>>& m,
                           const std::vector<double>& offset) {
  json p;
  p["kind"] = "affine";
  json mj = json::array();
  for (const auto& row : m) {
    json rj = json::array();
    for (double v : row) rj.push_back(format_double(v));
    mj.push_back(rj);
  }
  p["matrix"] = mj;
  json oj = json::array();
  for (double v : offset) oj.push_back(format_double(v));
  p["offset"] = oj;
  return p.dump();
}

}  // namespace

NonSelfMap table_map(std::vector<Point> keys, std::vector<Point> values,
                     double tol) {
  json persist;
  persist["kind"] = "table";
  auto& pp = persist["pairs"] = json::array();
  for (std::size_t i = 0; i < keys.size(); ++i)
    pp.push_back(json::array({emit_point(keys[i]), emit_point(values[i])}));
  auto eval = [keys = std::move(keys), values = std::move(values),
               tol](const Point& x) {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (distance(keys[i], x) <= tol) return values[i];
    throw DomainError("table map: argument matches no table key");
  };
  return {eval, "table", persist.dump()};
}

void validate_instance(const InstanceBundle& inst, const SearchConfig& cfg) {
  if (inst.A.dim() != inst.B.dim())
    throw ValidationError("A and B have different dimensions");
  for (const auto& x : validation_samples(inst.A, inst.search_cap)) {
    if (!inst.B.contains(inst.T.eval(x), cfg.tol_membership))
      throw ValidationError("codomain violation: T image leaves B");
    if (!inst.A.contains(inst.S.eval(x), cfg.tol_membership))
      throw ValidationError("auxiliary map violation: S does not preserve A");
  }
  for (const auto& y : validation_samples(inst.B, inst.search_cap)) {
    if (!inst.B.contains(inst.S.eval(y), cfg.tol_membership))
      throw ValidationError("auxiliary map violation: S does not preserve B");
  }
}

InstanceBundle registration_model(double delta, double kappa) {
  if (!(delta > 0)) throw std::invalid_argument("registration_model: delta must be > 0");
  if (!(kappa > 0 && kappa < 1))
    throw std::invalid_argument("registration_model: kappa must lie in (0,1)");
  InstanceBundle inst{
      PointSet::param1d(Point{{0, 0}}, Point{{0, 1}}, 0, 1),
      PointSet::param1d(Point{{delta, 0}}, Point{{0, 1}}, 0, 1),
      NonSelfMap{},
      AuxiliaryMap::identity(),
      beta_constant(kappa),
      AssumptionFlags{},
      delta,
      {},
      {},
      false,
      "scenario:registration(delta=" + format_double(delta) +
          ",kappa=" + format_double(kappa) + ")"};
  inst.T.eval = [delta, kappa](const Point& p) {
    return Point{{delta, kappa * p[1]}};
  };
  inst.T.descriptor = "affine: (delta, kappa*t)";
  inst.T.persist = affine_persist({{0.0, 0.0}, {0.0, kappa}}, {delta, 0.0});
  inst.exact_step = [kappa](const Point& p) { return Point{{0.0, kappa * p[1]}}; };
  return inst;
}

InstanceBundle kannan_degenerate_model(double delta) {
  if (!(delta > 0))
    throw std::invalid_argument("kannan_degenerate_model: delta must be > 0");
  InstanceBundle inst{
      PointSet::param1d(Point{{0, 0}}, Point{{0, 1}}, 0, 1),
      PointSet::param1d(Point{{delta, 0}}, Point{{0, 1}}, 0, 1),
      NonSelfMap{},
      AuxiliaryMap::identity(),
      beta_constant(0.5),
      AssumptionFlags{},
      delta,
      {},
      {},
      false,
      "scenario:kannan-degenerate(delta=" + format_double(delta) + ")"};
  inst.T.eval = [delta](const Point&) { return Point{{delta, 0.0}}; };
  inst.T.descriptor = "constant: (delta, 0)";
  inst.T.persist = affine_persist({{0.0, 0.0}, {0.0, 0.0}}, {delta, 0.0});
  inst.exact_step = [](const Point&) { return Point{{0.0, 0.0}}; };
  return inst;
}

InstanceBundle necessity_counterexample(double t_max) {
  if (!(t_max > 0))
    throw std::invalid_argument("necessity_counterexample: t_max must be > 0");
  InstanceBundle inst{
      PointSet::ray(Point{{0, 0}}, Point{{0, 1}}, 0),
      PointSet::ray(Point{{1, 0}}, Point{{0, 1}}, 0),
      NonSelfMap{},
      AuxiliaryMap{},
      beta_constant(1.0 / std::exp(1.0)),
      AssumptionFlags{true, true, false},
      1.0,
      {},
      t_max,
      true,
      "scenario:counterexample(t_max=" + format_double(t_max) + ")"};
  inst.T.eval = [](const Point& p) { return Point{{1.0, 2.0 * p[1] + 1.0}}; };
  inst.T.descriptor = "affine: (1, 2t+1)";
  inst.T.persist = affine_persist({{0.0, 0.0}, {0.0, 2.0}}, {1.0, 1.0});
  inst.S.eval = [](const Point& p) {
    return Point{{p[0], std::exp(-p[1])}};
  };
  inst.S.descriptor = "exp_coord(1)";
  inst.S.claims_injective = true;
  inst.S.claims_subseq_convergent = false;
  inst.S.persist = json{{"kind", "exp_coord"}, {"params", {{"coord", 1}}}}.dump();
  inst.exact_step = [](const Point& p) { return Point{{0.0, 2.0 * p[1] + 1.0}}; };
  return inst;
}

InstanceBundle parse_instance(const std::string& json_text,
                              const SearchConfig& cfg) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("instance schema violation: ") + e.what());
  }
  const std::size_t dim =
      static_cast<std::size_t>(parse_number(field(j, "dim", "$"), "$.dim"));
  InstanceBundle inst{parse_set(field(j, "A", "$"), "$.A"),
                      parse_set(field(j, "B", "$"), "$.B"),
                      NonSelfMap{},
                      AuxiliaryMap{},
                      {},
                      AssumptionFlags{},
                      {},
                      {},
                      {},
                      false,
                      "inline"};
  if (inst.A.dim() != dim || inst.B.dim() != dim)
    throw ParseError("instance schema violation at $.dim: sets disagree with dim");
  ParsedMap t = parse_map(field(j, "T", "$"), "$.T", cfg.tol_membership);
  inst.T = {t.eval, t.descriptor, t.persist};
  const json& sj = field(j, "S", "$");
  ParsedMap s = parse_map(sj, "$.S", cfg.tol_membership);
  inst.S = {s.eval, s.descriptor, true, true, s.persist};
  if (sj.contains("flags")) {
    const json& fl = sj["flags"];
    inst.S.claims_injective = fl.value("claims_injective", true);
    inst.S.claims_subseq_convergent = fl.value("claims_subseq_convergent", true);
  }
  if (j.contains("beta")) inst.beta = parse_beta(j["beta"], "$.beta");
  if (j.contains("flags")) {
    const json& fl = j["flags"];
    inst.flags.a0_closed = fl.value("a0_closed", true);
    inst.flags.b0_closed = fl.value("b0_closed", true);
    inst.flags.s_subseq_convergent =
        fl.value("s_subseq_convergent", inst.S.claims_subseq_convergent);
  } else {
    inst.flags.s_subseq_convergent = inst.S.claims_subseq_convergent;
  }
  if (j.contains("gap")) inst.known_gap = parse_number(j["gap"], "$.gap");
  if (j.contains("search_cap")) {
    inst.search_cap = parse_number(j["search_cap"], "$.search_cap");
    inst.domain_truncated = inst.A.unbounded() || inst.B.unbounded();
  }
  validate_instance(inst, cfg);
  return inst;
}

InstanceBundle load_instance(const std::string& path, const SearchConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  InstanceBundle inst = parse_instance(ss.str(), cfg);
  inst.provenance = "file:" + path;
  return inst;
}

std::string instance_to_json(const InstanceBundle& inst) {
  if (inst.T.persist.empty() || inst.S.persist.empty())
    throw ValidationError("instance has non-persistable maps");
  json j;
  j["dim"] = inst.A.dim();
  j["A"] = emit_set(inst.A);
  j["B"] = emit_set(inst.B);
  j["T"] = json::parse(inst.T.persist);
  j["S"] = json::parse(inst.S.persist);
  j["S"]["flags"] = {{"claims_injective", inst.S.claims_injective},
                     {"claims_subseq_convergent", inst.S.claims_subseq_convergent}};
  if (inst.beta) {
    if (inst.beta->persist.empty())
      throw ValidationError("instance has a non-persistable beta");
    j["beta"] = json::parse(inst.beta->persist);
  }
  j["flags"] = {{"a0_closed", inst.flags.a0_closed},
                {"b0_closed", inst.flags.b0_closed},
                {"s_subseq_convergent", inst.flags.s_subseq_convergent}};
  if (inst.known_gap) j["gap"] = format_double(*inst.known_gap);
  if (inst.search_cap) j["search_cap"] = format_double(*inst.search_cap);
  return j.dump(2);
}

void save_instance(const InstanceBundle& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(inst) << "\n";
}

std::vector<ScenarioInfo> list_scenarios() {
  return {
      {"registration",
       "--delta D (>0, default 0.5), --kappa K (in (0,1), default 0.5)",
       "two unit segments at horizontal offset delta; T scales the vertical "
       "coordinate by kappa; S = Id; unique best proximity point (0,0)"},
      {"kannan-degenerate", "--delta D (>0, default 0.5)",
       "same pair with T constant at (delta,0); the Kannan-type condition "
       "holds with zero left-hand side"},
      {"counterexample", "--t-max R (>0, default 100)",
       "two vertical rays at offset 1 with T(0,t)=(1,2t+1), S(x,y)=(x,e^-y); "
       "S is not subsequentially convergent and no best proximity point "
       "exists"},
  };
}

}  // namespace bpp
