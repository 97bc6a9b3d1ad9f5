#include "ballerg/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ballerg {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ParseError, path + ": " + msg);
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path.empty() ? key : path + "." + key, "unknown field");
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing field");
  return obj.at(key);
}

double parse_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

std::uint64_t parse_count(const json& j, const std::string& path) {
  if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {parse_real(j, path), 0.0};
  if (!j.is_array() || j.size() != 2) fail(path, "expected a number or [re, im]");
  return {parse_real(j[0], path + "[0]"), parse_real(j[1], path + "[1]")};
}

CVector parse_vector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of complex numbers");
  CVector v;
  for (std::size_t i = 0; i < j.size(); ++i)
    v.push_back(parse_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return v;
}

CMatrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected an array of rows");
  const std::size_t n = j.size();
  if (n > CMatrix::kMaxDim) fail(path, "dimension exceeds 16");
  std::vector<Complex> data;
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const CVector row = parse_vector(j[r], rp);
    if (row.size() != n) fail(rp, "row length " + std::to_string(row.size()) + " != " + std::to_string(n));
    data.insert(data.end(), row.begin(), row.end());
  }
  return CMatrix(n, std::move(data));
}

std::vector<CVector> parse_points(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of points");
  std::vector<CVector> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(parse_vector(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

HoloMap parse_map_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const json& type = field(j, path, "type");
  if (!type.is_string()) fail(path + ".type", "expected a string");
  const std::string kind = type.get<std::string>();
  try {
    if (kind == "linear" || kind == "unitary") {
      reject_unknown(j, path, {"type", "matrix"});
      CMatrix m = parse_matrix(field(j, path, "matrix"), path + ".matrix");
      return kind == "linear" ? HoloMap::linear(std::move(m)) : HoloMap::unitary(std::move(m));
    }
    if (kind == "involution") {
      reject_unknown(j, path, {"type", "a"});
      return HoloMap::involution(parse_vector(field(j, path, "a"), path + ".a"));
    }
    if (kind == "mobius") {
      reject_unknown(j, path, {"type", "u", "a"});
      return HoloMap::mobius(parse_matrix(field(j, path, "u"), path + ".u"),
                             parse_vector(field(j, path, "a"), path + ".a"));
    }
    if (kind == "monomial") {
      reject_unknown(j, path, {"type", "dim", "components"});
      const std::size_t dim = parse_count(field(j, path, "dim"), path + ".dim");
      const json& comps = field(j, path, "components");
      if (!comps.is_array()) fail(path + ".components", "expected an array");
      std::vector<std::vector<MonomialTerm>> components;
      for (std::size_t i = 0; i < comps.size(); ++i) {
        const std::string cp = path + ".components[" + std::to_string(i) + "]";
        if (!comps[i].is_array()) fail(cp, "expected an array of terms");
        std::vector<MonomialTerm> terms;
        for (std::size_t t = 0; t < comps[i].size(); ++t) {
          const std::string tp = cp + "[" + std::to_string(t) + "]";
          const json& term = comps[i][t];
          if (!term.is_object()) fail(tp, "expected {coef, powers}");
          reject_unknown(term, tp, {"coef", "powers"});
          const json& powers = field(term, tp, "powers");
          if (!powers.is_array()) fail(tp + ".powers", "expected an array");
          std::vector<unsigned> p;
          for (std::size_t e = 0; e < powers.size(); ++e)
            p.push_back(static_cast<unsigned>(
                parse_count(powers[e], tp + ".powers[" + std::to_string(e) + "]")));
          terms.push_back({parse_complex(field(term, tp, "coef"), tp + ".coef"), std::move(p)});
        }
        components.push_back(std::move(terms));
      }
      return HoloMap::monomial(dim, std::move(components));
    }
    if (kind == "composite") {
      reject_unknown(j, path, {"type", "factors"});
      const json& fs = field(j, path, "factors");
      if (!fs.is_array() || fs.empty()) fail(path + ".factors", "expected a non-empty array");
      std::vector<HoloMap> factors;
      for (std::size_t i = 0; i < fs.size(); ++i)
        factors.push_back(parse_map_json(fs[i], path + ".factors[" + std::to_string(i) + "]"));
      return HoloMap::composite(std::move(factors));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    fail(path, e.what());
  }
  fail(path + ".type", "unknown map type '" + kind + "'");
}

json complex_json(Complex c) { return json::array({c.real(), c.imag()}); }

json vector_json(std::span<const Complex> v) {
  json out = json::array();
  for (const auto& c : v) out.push_back(complex_json(c));
  return out;
}

json matrix_json(const CMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.dim(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(complex_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

json map_json(const HoloMap& map) {
  struct Visitor {
    json operator()(const LinearMap& m) const { return {{"type", "linear"}, {"matrix", matrix_json(m.matrix)}}; }
    json operator()(const UnitaryMap& m) const { return {{"type", "unitary"}, {"matrix", matrix_json(m.matrix)}}; }
    json operator()(const InvolutionMap& m) const { return {{"type", "involution"}, {"a", vector_json(m.center)}}; }
    json operator()(const MobiusMap& m) const {
      return {{"type", "mobius"}, {"u", matrix_json(m.unitary)}, {"a", vector_json(m.center)}};
    }
    json operator()(const MonomialMap& m) const {
      json comps = json::array();
      for (const auto& comp : m.components) {
        json terms = json::array();
        for (const auto& t : comp) terms.push_back({{"coef", complex_json(t.coef)}, {"powers", t.powers}});
        comps.push_back(terms);
      }
      return {{"type", "monomial"}, {"dim", m.dim}, {"components", comps}};
    }
    json operator()(const CompositeMap& m) const {
      json fs = json::array();
      for (const auto& f : m.factors) fs.push_back(map_json(f));
      return {{"type", "composite"}, {"factors", fs}};
    }
  };
  return std::visit(Visitor{}, map.variant());
}

RunConfig parse_config_json(const json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  reject_unknown(j, "", {"map", "tol", "jmax", "grid", "epsilon", "eta", "rows", "ratio_a", "radius",
                         "points", "sequence", "out"});
  RunConfig c;
  if (j.contains("map")) c.map = parse_map_json(j.at("map"), "map");
  if (j.contains("tol")) c.tol = parse_real(j.at("tol"), "tol");
  if (j.contains("jmax")) c.jmax = static_cast<unsigned>(parse_count(j.at("jmax"), "jmax"));
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    if (!g.is_object()) fail("grid", "expected an object");
    reject_unknown(g, "grid", {"levels", "dirs", "seed"});
    if (g.contains("levels")) c.grid_levels = static_cast<unsigned>(parse_count(g.at("levels"), "grid.levels"));
    if (g.contains("dirs")) c.dirs = static_cast<unsigned>(parse_count(g.at("dirs"), "grid.dirs"));
    if (g.contains("seed")) c.seed = parse_count(g.at("seed"), "grid.seed");
  }
  if (j.contains("epsilon")) c.epsilon = parse_real(j.at("epsilon"), "epsilon");
  if (j.contains("eta")) c.eta = parse_real(j.at("eta"), "eta");
  if (j.contains("rows")) c.rows = static_cast<unsigned>(parse_count(j.at("rows"), "rows"));
  if (j.contains("ratio_a")) c.ratio_a = parse_real(j.at("ratio_a"), "ratio_a");
  if (j.contains("radius")) c.radius = parse_real(j.at("radius"), "radius");
  if (j.contains("points")) c.points = parse_points(j.at("points"), "points");
  if (j.contains("sequence")) c.sequence = parse_points(j.at("sequence"), "sequence");
  if (j.contains("out")) {
    if (!j.at("out").is_string()) fail("out", "expected a string");
    c.out = j.at("out").get<std::string>();
  }

  if (!(c.tol > 0.0)) fail("tol", "must be positive");
  if (c.jmax == 0) fail("jmax", "must be positive");
  if (c.grid_levels == 0 || c.grid_levels > 52) fail("grid.levels", "must be in [1, 52]");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) fail("epsilon", "must be in (0, 1)");
  if (!(c.eta > 0.0 && c.eta < 1.0)) fail("eta", "must be in (0, 1)");
  if (!(c.ratio_a > 0.0 && c.ratio_a < 1.0)) fail("ratio_a", "must be in (0, 1)");
  if (!(c.radius > 0.0)) fail("radius", "must be positive");
  return c;
}

json config_json(const RunConfig& c) {
  json j;
  if (c.map) j["map"] = map_json(*c.map);
  j["tol"] = c.tol;
  j["jmax"] = c.jmax;
  j["grid"] = {{"levels", c.grid_levels}, {"dirs", c.dirs}, {"seed", c.seed}};
  j["epsilon"] = c.epsilon;
  j["eta"] = c.eta;
  j["rows"] = c.rows;
  j["ratio_a"] = c.ratio_a;
  j["radius"] = c.radius;
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(vector_json(p));
  j["points"] = pts;
  json seq = json::array();
  for (const auto& p : c.sequence) seq.push_back(vector_json(p));
  j["sequence"] = seq;
  j["out"] = c.out;
  return j;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) { return parse_config_json(parse_text(text)); }

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string print_config(const RunConfig& config) { return config_json(config).dump(2) + "\n"; }

HoloMap parse_map(const std::string& json_text) { return parse_map_json(parse_text(json_text), "map"); }

std::string print_map(const HoloMap& map) { return map_json(map).dump(); }

void write_traces_csv(std::ostream& os, const std::vector<ConvergenceTrace>& traces) {
  std::vector<TraceRow> rows;
  for (const auto& t : traces) {
    auto r = t.rows();
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return a.name != b.name ? a.name < b.name : a.j < b.j;
  });
  os << "j,name,value\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.value);
    os << r.j << "," << r.name << "," << buf << "\n";
  }
}

void emit_traces(const std::vector<ConvergenceTrace>& traces, const std::filesystem::path& path) {
  if (traces.empty()) throw Error(ErrorCode::InvalidArgument, "no traces to write to " + path.string());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  write_traces_csv(out, traces);
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace ballerg
