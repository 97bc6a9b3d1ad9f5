// Command-line front end: ballerg <command> <config.json> [flags]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ballerg/config.hpp"
#include "ballerg/dynamics.hpp"
#include "ballerg/ergodicity.hpp"
#include "ballerg/interpolation.hpp"

using namespace ballerg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInconclusive = 2;

std::string fmt_real(double x, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string fmt_complex(Complex c, int digits = 10) {
  const double tiny = std::pow(10.0, -digits);
  const double re = std::abs(c.real()) < tiny ? 0.0 : c.real();
  const double im = std::abs(c.imag()) < tiny ? 0.0 : c.imag();
  if (im == 0.0) return fmt_real(re, digits);
  if (re == 0.0) return fmt_real(im, digits) + "i";
  return fmt_real(re, digits) + (im < 0 ? "-" : "+") + fmt_real(std::abs(im), digits) + "i";
}

std::string fmt_point(std::span<const Complex> z, int digits = 10) {
  std::string s = "(";
  for (std::size_t i = 0; i < z.size(); ++i) s += (i ? ", " : "") + fmt_complex(z[i], digits);
  return s + ")";
}

// Coordinates rounded to 1e-6, for points only known to that accuracy.
std::string fmt_rounded(std::span<const Complex> z) {
  CVector r;
  for (const auto& c : z)
    r.emplace_back(std::round(c.real() * 1e6) / 1e6, std::round(c.imag() * 1e6) / 1e6);
  return fmt_point(r, 7);
}

const HoloMap& require_map(const RunConfig& c) {
  if (!c.map) throw Error(ErrorCode::ParseError, "map: missing field (required by this command)");
  require_self_map(*c.map, c.grid());
  return *c.map;
}

struct Outcome {
  int code = kExitOk;
  std::string report;
  std::vector<ConvergenceTrace> traces;
};

void describe_traces(std::ostream& os, const std::vector<ConvergenceTrace>& traces) {
  for (const auto& t : traces) {
    if (t.empty()) continue;
    os << "trace " << t.name() << ": " << t.size() << " rows, last j=" << t.points().back().first
       << " value=" << fmt_real(t.last()) << "\n";
  }
}

Outcome run_classify(const RunConfig& c) {
  const HoloMap& map = require_map(c);
  ClassifyOptions o;
  o.tol = c.tol;
  o.j_max = c.jmax;
  o.epsilon = c.epsilon;
  o.grid = c.grid();
  const auto v = classify_mean_ergodic(map, o);

  std::ostringstream os;
  os << to_string(v.verdict) << " / " << v.branch << " / k=" << (v.k ? std::to_string(v.k) : "n/a")
     << "\n";
  os << "verdict: " << to_string(v.verdict) << "\n";
  os << "branch: " << v.branch << "\n";
  os << "limit: " << v.limit_description << "\n";
  os << "fixed_point: " << (v.fixed_point ? fmt_point(*v.fixed_point) : "none") << "\n";
  if (!v.spectrum.empty()) {
    os << "spectrum:";
    for (const auto& l : v.spectrum) os << " " << fmt_complex(l);
    os << "\n";
  }
  if (v.certificate) {
    os << "quasi_compact: n0=" << v.certificate->n0
       << " sup=" << fmt_real(v.certificate->sup_estimate) << "\n";
  }
  if (v.dw) {
    os << "denjoy_wolff: " << fmt_rounded(v.dw->point.coords())
       << " residual=" << fmt_real(v.dw->residual, 3) << "\n";
  }
  if (!v.violated_condition.empty()) os << "violated: " << v.violated_condition << "\n";
  if (!v.note.empty()) os << "note: " << v.note << "\n";
  describe_traces(os, v.traces);
  return {v.verdict == Verdict::Inconclusive ? kExitInconclusive : kExitOk, os.str(), v.traces};
}

Outcome run_iterate(const RunConfig& c) {
  const HoloMap& map = require_map(c);
  std::vector<CVector> starts = c.points;
  if (starts.empty()) starts.push_back(CVector(map.dim(), Complex{0.0, 0.0}));
  Outcome out;
  std::ostringstream os;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i].size() != map.dim()) {
      throw Error(ErrorCode::ParseError, "points[" + std::to_string(i) + "]: dimension mismatch");
    }
    require_interior(starts[i], "start point");
    ConvergenceTrace t("orbit_norm[" + std::to_string(i) + "]");
    CVector w = starts[i];
    t.push(0, norm(w));
    for (unsigned j = 1; j <= c.jmax; ++j) {
      w = evaluate(map, w);
      t.push(j, norm(w));
    }
    os << "start " << fmt_point(starts[i]) << " -> phi_" << c.jmax << " = " << fmt_point(w)
       << " |.|=" << fmt_real(norm(w)) << "\n";
    out.traces.push_back(std::move(t));
  }
  out.report = os.str();
  return out;
}

Outcome run_cesaro(const RunConfig& c) {
  const HoloMap& map = require_map(c);
  const auto grid = c.grid();
  const auto dict = FunctionDictionary::standard(map.dim());
  const auto points = grid_points(grid, map.dim());
  const auto& fs = dict.entries();

  std::vector<std::vector<double>> sup(fs.size(), std::vector<double>(c.jmax, 0.0));
  for (const auto& z : points) {
    std::vector<Complex> sum(fs.size());
    CVector w = z;
    for (unsigned j = 1; j <= c.jmax; ++j) {
      w = evaluate_raw(map, w);
      for (std::size_t f = 0; f < fs.size(); ++f) {
        sum[f] += fs[f].eval(w);
        sup[f][j - 1] = std::max(sup[f][j - 1], std::abs(sum[f]) / j);
      }
    }
  }
  Outcome out;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    ConvergenceTrace t("cesaro_sup:" + fs[f].name + "#" + std::to_string(f));
    for (unsigned j = 1; j <= c.jmax; ++j) t.push(j, sup[f][j - 1]);
    out.traces.push_back(std::move(t));
  }
  std::ostringstream os;
  os << "dictionary: " << fs.size() << " functions, grid points: " << points.size() << "\n";
  std::optional<CVector> a;
  try {
    a = find_fixed_point(map);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    os << "fixed point search inconclusive\n";
  }
  if (a) {
    out.traces.push_back(
        cesaro_gap_trace(map, LimitOperator::point_evaluation(*a), dict, c.jmax, grid));
    os << "gap against K_a, a = " << fmt_point(*a) << "\n";
  } else {
    os << "no interior fixed point; no K_a gap\n";
  }
  describe_traces(os, out.traces);
  out.report = os.str();
  return out;
}

Outcome run_dw(const RunConfig& c) {
  const HoloMap& map = require_map(c);
  std::ostringstream os;
  if (auto a = find_fixed_point(map)) {
    os << "interior fixed point " << fmt_point(*a) << "; no Denjoy-Wolff point\n";
    return {kExitOk, os.str(), {}};
  }
  const auto dw = denjoy_wolff(map, 1e-8, 100000);
  os << "denjoy_wolff: " << fmt_rounded(dw.point.coords()) << " residual=" << fmt_real(dw.residual, 3)
     << " iterations=" << dw.iterations << "\n";
  return {kExitOk, os.str(), {dw.step_trace}};
}

Outcome run_metric(const RunConfig& c) {
  if (c.points.size() < 2) throw Error(ErrorCode::ParseError, "points: metric needs at least two points");
  std::ostringstream os;
  for (std::size_t i = 0; i + 1 < c.points.size(); ++i) {
    const auto& z = c.points[i];
    const auto& w = c.points[i + 1];
    os << "beta(p" << i << ", p" << i + 1 << ") = " << fmt_real(bergman_distance(z, w), 15)
       << "  pseudo = " << fmt_real(pseudo_hyperbolic(z, w), 15) << "\n";
  }
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    os << "p" << i << (in_bergman_ball(c.points[0], c.radius, c.points[i]) ? " in " : " not in ")
       << "B(p0, " << fmt_real(c.radius) << ")\n";
  }
  return {kExitOk, os.str(), {}};
}

Outcome run_interp(const RunConfig& c) {
  NodeSequence seq{c.sequence, "user"};
  seq.validate();
  std::ostringstream os;
  Outcome out;
  if (seq.points.size() >= 2) {
    const auto r = ratio_condition(seq, c.ratio_a);
    os << "ratio_condition(a=" << fmt_real(c.ratio_a) << "): " << (r.holds ? "holds" : "fails");
    if (r.first_violation) os << " at j=" << *r.first_violation;
    os << " max_ratio=" << fmt_real(r.max_ratio) << "\n";
    ConvergenceTrace delta("delta_min");
    for (std::size_t t = 2; t <= seq.points.size(); ++t)
      delta.push(static_cast<unsigned>(t), separation_products(seq, t).delta_min);
    out.traces.push_back(std::move(delta));
  }
  const auto family = build_interpolants(seq);
  double kron = 0.0;
  for (std::size_t l = 0; l < family.size(); ++l)
    for (std::size_t j = 0; j < family.size(); ++j)
      kron = std::max(kron, std::abs(family.eval(l, seq.points[j]) - (l == j ? 1.0 : 0.0)));
  os << "delta_min: " << fmt_real(family.delta_min()) << "\n";
  os << "kronecker_error: " << fmt_real(kron, 3) << "\n";
  os << "measured_sum_S: " << fmt_real(family.measured_sum(c.grid())) << "\n";
  describe_traces(os, out.traces);
  out.report = os.str();
  return out;
}

Outcome run_witness(const RunConfig& c) {
  const HoloMap& map = require_map(c);
  const auto grid = c.grid();
  std::ostringstream os;
  TriangularArray arr;
  try {
    arr = build_triangular_array(map, c.epsilon, c.rows, grid);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::MapContracts) throw;
    os << "no triangular array: " << e.what() << "\n";
    return {kExitOk, os.str(), {}};
  }
  const auto f = witness_function(map, arr);
  const double sup = f.sup_grid(grid);
  os << "rows: " << arr.anchors.size() << " distinct nodes: " << arr.nodes.points.size() << "\n";
  os << "ratio_a: " << fmt_real(arr.ratio_a) << " dilation_a: " << fmt_real(arr.dilation_a) << "\n";
  os << "schwarz_chain: " << (arr.schwarz_chain ? "ok" : "violated") << "\n";
  os << "f(0) = " << fmt_complex(f.eval(CVector(map.dim(), Complex{0.0, 0.0}))) << "\n";
  double node_err = 0.0;
  for (const auto& x : arr.nodes.points) node_err = std::max(node_err, std::abs(f.eval(x) - norm2(x)));
  os << "node_value_error: " << fmt_real(node_err, 3) << "\n";
  os << "sup_grid|f|: " << fmt_real(sup) << "\n";
  os << "epsilon^2/sup: " << fmt_real(c.epsilon * c.epsilon / sup) << "\n";
  ConvergenceTrace avg("row_cesaro"), bound("witness_lower_bound");
  for (unsigned j = 1; j <= arr.anchors.size(); ++j) {
    const Complex m = f.row_cesaro(j);
    avg.push(j, std::abs(m));
    bound.push(j, std::abs(m) / sup);
  }
  os << "anchors:";
  for (const auto& a : arr.anchors) os << " " << fmt_point(a, 12);
  os << "\n";
  std::vector<ConvergenceTrace> traces{avg, bound};
  describe_traces(os, traces);
  return {kExitOk, os.str(), traces};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Holomorphic self-maps of the unit ball and mean ergodicity of composition operators"};
  std::string command, config_path;
  std::optional<double> tol;
  std::optional<unsigned> jmax, levels, dirs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool print_cfg = false;

  app.add_option("command", command, "classify | iterate | cesaro | dw | metric | interp | witness")
      ->required()
      ->check(CLI::IsMember({"classify", "iterate", "cesaro", "dw", "metric", "interp", "witness"}));
  app.add_option("config", config_path, "JSON run configuration")->required();
  app.add_option("--tol", tol, "trace convergence threshold");
  app.add_option("--jmax", jmax, "iteration horizon");
  app.add_option("--grid-levels", levels, "radii 1 - 2^-m, m = 1..levels");
  app.add_option("--dirs", dirs, "random directions per radius");
  app.add_option("--seed", seed, "grid seed");
  app.add_option("--out", out_dir, "directory for report and CSV traces (default $BALLERG_OUT_DIR)");
  app.add_flag("--print-config", print_cfg, "echo the canonical configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (tol) cfg.tol = *tol;
    if (jmax) cfg.jmax = *jmax;
    if (levels) cfg.grid_levels = *levels;
    if (dirs) cfg.dirs = *dirs;
    if (seed) cfg.seed = *seed;
    if (out_dir) {
      cfg.out = *out_dir;
    } else if (cfg.out.empty()) {
      if (const char* env = std::getenv("BALLERG_OUT_DIR")) cfg.out = env;
    }
    // Re-validate after the overrides.
    cfg = parse_config(print_config(cfg));
    if (print_cfg) std::cout << print_config(cfg);

    Outcome result;
    if (command == "classify") result = run_classify(cfg);
    else if (command == "iterate") result = run_iterate(cfg);
    else if (command == "cesaro") result = run_cesaro(cfg);
    else if (command == "dw") result = run_dw(cfg);
    else if (command == "metric") result = run_metric(cfg);
    else if (command == "interp") result = run_interp(cfg);
    else result = run_witness(cfg);

    std::cout << result.report;
    if (!cfg.out.empty()) {
      const std::filesystem::path dir(cfg.out);
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
      std::ofstream rep(dir / (command + "_report.txt"));
      if (!rep) throw Error(ErrorCode::IoError, "cannot write " + (dir / (command + "_report.txt")).string());
      rep << result.report;
      if (!result.traces.empty()) emit_traces(result.traces, dir / (command + "_traces.csv"));
    }
    return result.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::Inconclusive || e.code() == ErrorCode::NotEscaping ||
                   e.code() == ErrorCode::SearchExhausted
               ? kExitInconclusive
               : kExitInput;
  }
}
