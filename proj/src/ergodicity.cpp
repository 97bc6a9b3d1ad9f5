#include "ballerg/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ballerg {

// ---- test functions ------------------------------------------------------------

FunctionDictionary::FunctionDictionary(std::vector<TestFunction> entries)
    : entries_(std::move(entries)) {}

void FunctionDictionary::add(TestFunction f) {
  if (!f.eval || !(f.sup_bound > 0.0) || !std::isfinite(f.sup_bound)) {
    throw Error(ErrorCode::InvalidArgument, "test function needs an evaluator and a positive bound");
  }
  entries_.push_back(std::move(f));
}

TestFunction constant_function(Complex c) {
  std::ostringstream name;
  name << "const(" << c.real() << "," << c.imag() << ")";
  return {name.str(), [c](std::span<const Complex>) { return c; },
          std::max(std::abs(c), std::numeric_limits<double>::min())};
}

TestFunction coordinate_functional(CVector u) {
  const double bound = norm(u);
  return {"<z,u>", [u = std::move(u)](std::span<const Complex> z) { return inner(z, u); },
          std::max(bound, std::numeric_limits<double>::min())};
}

TestFunction monomial_function(std::vector<unsigned> powers) {
  // sup over the ball of |z^p| is prod (p_i/|p|)^{p_i/2}.
  unsigned total = 0;
  for (unsigned p : powers) total += p;
  double bound = 1.0;
  std::string name = "z^(";
  for (std::size_t i = 0; i < powers.size(); ++i) {
    if (powers[i] > 0) bound *= std::pow(double(powers[i]) / total, 0.5 * powers[i]);
    name += (i ? "," : "") + std::to_string(powers[i]);
  }
  name += ")";
  return {name,
          [powers = std::move(powers)](std::span<const Complex> z) {
            Complex acc{1.0, 0.0};
            for (std::size_t i = 0; i < powers.size(); ++i)
              for (unsigned e = 0; e < powers[i]; ++e) acc *= z[i];
            return acc;
          },
          bound};
}

TestFunction involutive_product(std::vector<CVector> centers, std::vector<CVector> directions) {
  if (centers.size() != directions.size() || centers.empty()) {
    throw Error(ErrorCode::InvalidArgument, "need one direction per involution center");
  }
  std::vector<Involution> factors;
  for (auto& c : centers) factors.emplace_back(std::move(c));
  double bound = 1.0;
  for (const auto& d : directions) bound *= norm(d);
  return {"involutive_product",
          [factors = std::move(factors), directions = std::move(directions)](
              std::span<const Complex> z) {
            Complex acc{1.0, 0.0};
            for (std::size_t i = 0; i < factors.size(); ++i)
              acc *= inner(factors[i].apply(z), directions[i]);
            return acc;
          },
          bound};
}

TestFunction witness_power(const BoundaryPoint& z0, double m) {
  return {"witness_power",
          [c = z0.coords(), m](std::span<const Complex> z) {
            const Complex g = 0.5 * (1.0 + inner(z, c));
            return std::pow(g, m);
          },
          1.0};
}

FunctionDictionary FunctionDictionary::standard(std::size_t dim) {
  FunctionDictionary d;
  d.add(constant_function(1.0));
  for (std::size_t k = 0; k < dim; ++k) {
    std::vector<unsigned> p(dim, 0);
    p[k] = 1;
    d.add(monomial_function(p));
    p[k] = 2;
    d.add(monomial_function(p));
  }
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t m = k + 1; m < dim; ++m) {
      std::vector<unsigned> p(dim, 0);
      p[k] = p[m] = 1;
      d.add(monomial_function(p));
    }
  const double s = 1.0 / std::sqrt(static_cast<double>(dim));
  CVector flat(dim, Complex{s, 0.0});
  CVector twisted(dim);
  for (std::size_t k = 0; k < dim; ++k) twisted[k] = std::polar(s, 0.7 * static_cast<double>(k + 1));
  d.add(coordinate_functional(flat));
  d.add(coordinate_functional(twisted));
  return d;
}

// ---- limit operators ---------------------------------------------------------------

LimitOperator LimitOperator::identity() { return LimitOperator(Kind::Identity); }

LimitOperator LimitOperator::point_evaluation(CVector a) {
  require_interior(a, "evaluation point");
  LimitOperator op(Kind::PointEvaluation);
  op.a_ = std::move(a);
  return op;
}

LimitOperator LimitOperator::averaged_projection(
    HoloMap map, unsigned k, std::function<CVector(std::span<const Complex>)> rho) {
  if (k == 0 || !rho) throw Error(ErrorCode::InvalidArgument, "averaged projection needs k >= 1 and rho");
  LimitOperator op(Kind::AveragedProjection);
  op.map_ = std::move(map);
  op.k_ = k;
  op.rho_ = std::move(rho);
  return op;
}

Complex LimitOperator::apply(const TestFunction& f, std::span<const Complex> z) const {
  switch (kind_) {
    case Kind::Identity: return f.eval(z);
    case Kind::PointEvaluation: return f.eval(a_);
    case Kind::AveragedProjection: {
      Complex acc{0.0, 0.0};
      CVector w(z.begin(), z.end());
      for (unsigned i = 0; i < k_; ++i) {
        acc += f.eval(rho_(w));
        if (i + 1 < k_) w = evaluate_raw(*map_, w);
      }
      return acc / static_cast<double>(k_);
    }
  }
  return {};
}

std::string LimitOperator::describe() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::PointEvaluation: {
      std::ostringstream os;
      os << "K_a (evaluation at a = [";
      for (std::size_t i = 0; i < a_.size(); ++i)
        os << (i ? ", " : "") << a_[i].real() << (a_[i].imag() < 0 ? "-" : "+")
           << std::abs(a_[i].imag()) << "i";
      os << "])";
      return os.str();
    }
    case Kind::AveragedProjection:
      return "(1/k) sum_{i<k} C_{rho o phi_i}, k = " + std::to_string(k_);
  }
  return "none";
}

// ---- Cesaro means --------------------------------------------------------------------

std::vector<Complex> cesaro_apply(const HoloMap& map, const TestFunction& f, unsigned j,
                                  const GridSpec& grid) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "Cesaro index starts at 1");
  const auto points = grid_points(grid, map.dim());
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const auto& z : points) {
    Orbit orbit(map, z);
    Complex acc{0.0, 0.0};
    for (unsigned i = 1; i <= j; ++i) acc += f.eval(orbit.at(i));
    out.push_back(acc / static_cast<double>(j));
  }
  return out;
}

ConvergenceTrace cesaro_gap_trace(const HoloMap& map, const LimitOperator& limit,
                                  const FunctionDictionary& dict, unsigned j_max,
                                  const GridSpec& grid) {
  if (j_max == 0) throw Error(ErrorCode::InvalidArgument, "j_max must be positive");
  const auto points = grid_points(grid, map.dim());
  const auto& fs = dict.entries();
  std::vector<double> gap(j_max, 0.0);
  std::vector<Complex> target(fs.size()), sum(fs.size());
  for (const auto& z : points) {
    for (std::size_t f = 0; f < fs.size(); ++f) {
      target[f] = limit.apply(fs[f], z);
      sum[f] = 0.0;
    }
    CVector w = z;
    for (unsigned j = 1; j <= j_max; ++j) {
      w = evaluate_raw(map, w);
      for (std::size_t f = 0; f < fs.size(); ++f) {
        sum[f] += fs[f].eval(w);
        const double d = std::abs(sum[f] / static_cast<double>(j) - target[f]) / fs[f].sup_bound;
        gap[j - 1] = std::max(gap[j - 1], d);
      }
    }
  }
  ConvergenceTrace trace("cesaro_gap");
  for (unsigned j = 1; j <= j_max; ++j) trace.push(j, gap[j - 1]);
  return trace;
}

double cesaro_gap(const HoloMap& map, const LimitOperator& limit, const FunctionDictionary& dict,
                  unsigned j, const GridSpec& grid) {
  return cesaro_gap_trace(map, limit, dict, j, grid).last();
}

// ---- quasi-compactness -----------------------------------------------------------------

namespace {

unsigned trusted_window(unsigned j_max, const GridSpec& grid) {
  const unsigned levels = static_cast<unsigned>(grid.radii.size());
  return std::max(1u, std::min(j_max, levels > 2 ? levels - 2 : 1u));
}

}  // namespace

std::optional<QuasiCompactCertificate> quasi_compact_certificate(const HoloMap& map,
                                                                 unsigned j_max,
                                                                 const GridSpec& grid,
                                                                 double margin) {
  grid.validate();
  if (!(margin > 0.0 && margin < 1.0)) throw Error(ErrorCode::InvalidArgument, "margin must be in (0, 1)");
  const unsigned window = trusted_window(j_max, grid);
  const CVector origin(map.dim(), Complex{0.0, 0.0});
  const auto profile = sup_profile(map, origin, window, grid);
  for (unsigned j = 1; j <= window; ++j) {
    if (profile.sup(j) < 1.0 - margin && !profile.approaching_boundary(j)) {
      return QuasiCompactCertificate{j, profile.sup(j)};
    }
  }
  return std::nullopt;
}

// ---- classifier -------------------------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::UniformlyMeanErgodic: return "UniformlyMeanErgodic";
    case Verdict::NotMeanErgodic: return "NotMeanErgodic";
    case Verdict::NotUniformlyMeanErgodic_MeanUnknown: return "NotUniformlyMeanErgodic_MeanUnknown";
    case Verdict::NumericalEvidenceUME: return "NumericalEvidenceUME";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

const ConvergenceTrace* ErgodicVerdict::trace(const std::string& name) const {
  for (const auto& t : traces)
    if (t.name() == name) return &t;
  return nullptr;
}

std::vector<ConvergenceTrace> witness_traces(const HoloMap& map, const BoundaryPoint& z0,
                                             unsigned count, const GridSpec& grid) {
  const std::size_t n = map.dim();
  if (z0.dim() != n) throw Error(ErrorCode::InvalidArgument, "boundary point dimension mismatch");
  const auto& c = z0.coords();
  auto g = [&c](std::span<const Complex> z) { return 0.5 * (1.0 + inner(z, c)); };

  std::vector<CVector> orbit;
  CVector w(n, Complex{0.0, 0.0});
  for (unsigned l = 1; l <= count; ++l) {
    w = evaluate_raw(map, w);
    orbit.push_back(w);
  }
  const auto points = grid_points(grid, n);

  ConvergenceTrace gap_trace("witness_gap");
  ConvergenceTrace k_trace("witness_k");
  double r = 1.0;
  double closest = std::numeric_limits<double>::infinity();
  for (unsigned j = 1; j <= count; ++j) {
    closest = std::min(closest, norm(sub(orbit[j - 1], c)));
    r = std::min(0.5 * r, 0.5 * closest);
    double s = 0.0;
    for (const auto& z : points)
      if (norm(sub(z, c)) >= r) s = std::max(s, std::abs(g(z)));
    for (unsigned l = 0; l < j; ++l) s = std::max(s, std::abs(g(orbit[l])));
    if (!(s < 1.0)) {
      throw Error(ErrorCode::Inconclusive, "witness sup reached 1; the orbit is not separated from z0");
    }
    // smallest k with s^k < 1/2
    double k = std::floor(std::log(0.5) / std::log(s)) + 1.0;
    k = std::max(k, 1.0);
    Complex mean{0.0, 0.0};
    for (unsigned l = 0; l < j; ++l) mean += std::pow(g(orbit[l]), k);
    mean /= static_cast<double>(j);
    const Complex at_z0 = std::pow(g(c), k);
    gap_trace.push(j, std::abs(at_z0 - mean));
    k_trace.push(j, k);
  }
  return {gap_trace, k_trace};
}

namespace {

ErgodicVerdict inconclusive(std::string branch, std::string note) {
  ErgodicVerdict v;
  v.verdict = Verdict::Inconclusive;
  v.branch = std::move(branch);
  v.note = std::move(note);
  return v;
}

ConvergenceTrace sup_trace(const SupProfile& profile, unsigned j_max) {
  ConvergenceTrace t("sup_norm_deviation");
  for (unsigned j = 1; j <= j_max; ++j) t.push(j, profile.sup(j));
  return t;
}

bool tail_non_increasing(const ConvergenceTrace& t) {
  const auto& pts = t.points();
  const std::size_t tail = std::max<std::size_t>(1, pts.size() / 4);
  for (std::size_t i = pts.size() - tail; i + 1 < pts.size(); ++i)
    if (pts[i + 1].second > pts[i].second * (1.0 + 1e-12) + 1e-15) return false;
  return true;
}

}  // namespace

ErgodicVerdict classify_mean_ergodic(const HoloMap& map, double tol, const GridSpec& grid,
                                     unsigned j_max) {
  ClassifyOptions o;
  o.tol = tol;
  o.grid = grid;
  o.j_max = j_max;
  return classify_mean_ergodic(map, o);
}

ErgodicVerdict classify_mean_ergodic(const HoloMap& map, const ClassifyOptions& o) {
  o.grid.validate();
  if (o.j_max == 0) throw Error(ErrorCode::InvalidArgument, "j_max must be positive");
  const std::size_t n = map.dim();
  const CVector origin(n, Complex{0.0, 0.0});
  const auto dict = FunctionDictionary::standard(n);

  std::optional<CVector> a;
  try {
    a = find_fixed_point(map, o.fixed_point_tol, o.fixed_point_budget);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Inconclusive) throw;
    return inconclusive(branch::kFixedPointSearch, e.what());
  }

  // (1) no interior fixed point
  if (!a) {
    ErgodicVerdict v;
    v.branch = branch::kNoInteriorFixedPoint;
    try {
      v.dw = denjoy_wolff(map, o.fixed_point_tol, std::max(o.fixed_point_budget, 100000u));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotEscaping) throw;
      return inconclusive(branch::kNoInteriorFixedPoint, e.what());
    }
    v.verdict = Verdict::NotUniformlyMeanErgodic_MeanUnknown;
    v.limit_description = "none";
    for (auto& t : witness_traces(map, v.dw->point, o.witness_count, o.grid))
      v.traces.push_back(std::move(t));
    v.traces.push_back(v.dw->step_trace);
    return v;
  }

  // (2) spectrum of the derivative at the fixed point, moved to the origin
  const HoloMap psi = conjugate_to_origin(map, *a);
  SpectralReport report;
  try {
    report = spectral_report(derivative_at(psi, origin), o.spectral_tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AmbiguousModulus && e.code() != ErrorCode::NonConvergence) throw;
    auto v = inconclusive("spectral-report", e.what());
    v.fixed_point = a;
    return v;
  }

  ErgodicVerdict v;
  v.fixed_point = a;
  v.spectrum = report.eigenvalues;

  if (!report.all_unit_roots_of_unity()) {
    v.verdict = Verdict::NotMeanErgodic;
    v.branch = branch::kNonRootEigenvalue;
    for (const auto& u : report.unity_orders) {
      if (!u.order) {
        std::ostringstream os;
        os << "unit eigenvalue " << u.value.real() << (u.value.imag() < 0 ? "-" : "+")
           << std::abs(u.value.imag()) << "i is not a root of unity of order <= 64";
        v.violated_condition = os.str();
        break;
      }
    }
    return v;
  }
  v.k = limit_period(report);

  // (3) automorphisms
  if (map.is_automorphism()) {
    v.verdict = Verdict::UniformlyMeanErgodic;
    v.branch = branch::kAutomorphism;
    const auto limit = LimitOperator::averaged_projection(
        map, v.k, [](std::span<const Complex> z) { return CVector(z.begin(), z.end()); });
    v.limit_description = limit.describe();
    v.traces.push_back(cesaro_gap_trace(map, limit, dict, o.j_max, o.grid));
    return v;
  }

  // (4) matrices
  if (const auto m = map.as_matrix()) {
    v.verdict = Verdict::UniformlyMeanErgodic;
    v.branch = branch::kLinear;
    if (report.inside_disk()) {
      const auto limit = LimitOperator::point_evaluation(origin);
      v.limit_description = limit.describe();
      const unsigned window = std::min(o.j_max, static_cast<unsigned>(o.grid.radii.size()));
      v.traces.push_back(sup_trace(sup_profile(map, origin, window, o.grid), window));
      v.traces.push_back(cesaro_gap_trace(map, limit, dict, o.j_max, o.grid));
      v.certificate = quasi_compact_certificate(map, o.j_max, o.grid);
    } else {
      const CMatrix rho = linear_retraction(*m, o.spectral_tol);
      const auto limit = LimitOperator::averaged_projection(
          map, v.k, [rho](std::span<const Complex> z) { return rho.apply(z); });
      v.limit_description = limit.describe();
      v.traces.push_back(cesaro_gap_trace(map, limit, dict, o.j_max, o.grid));
    }
    return v;
  }

  // (5) spectrum inside the disk
  if (report.inside_disk()) {
    const unsigned window = std::min(o.j_max, trusted_window(o.j_max, o.grid));
    const auto profile = sup_profile(psi, origin, std::max(window, o.j_max), o.grid);
    v.traces.push_back(sup_trace(profile, o.j_max));
    const auto& trace = v.traces.back();

    bool stays_large = true;
    for (unsigned j = 1; j <= window && stays_large; ++j)
      stays_large = profile.sup(j) >= o.epsilon && profile.approaching_boundary(j);
    if (stays_large) {
      v.verdict = Verdict::NotMeanErgodic;
      v.branch = branch::kInteriorSpectrum;
      v.violated_condition = "grid sup |phi_j - a| >= " + std::to_string(o.epsilon) +
                             " and still rising with the radius for every j <= " +
                             std::to_string(window);
      return v;
    }
    if (trace.last() < o.tol && tail_non_increasing(trace)) {
      v.verdict = Verdict::UniformlyMeanErgodic;
      v.branch = branch::kInteriorSpectrum;
      const auto limit = LimitOperator::point_evaluation(*a);
      v.limit_description = limit.describe();
      v.certificate = quasi_compact_certificate(psi, o.j_max, o.grid);
      v.traces.push_back(cesaro_gap_trace(map, limit, dict, o.j_max, o.grid));
      return v;
    }
    v.verdict = Verdict::Inconclusive;
    v.branch = branch::kInteriorSpectrum;
    v.note = "sup-norm trace neither vanishes nor certifiably stays away from 0";
    return v;
  }

  // (6) mixed spectrum, nonlinear, not an automorphism
  v.branch = branch::kRetractionTrace;
  try {
    const auto est = estimate_retraction(psi, v.k, o.j_max, o.grid, o.tol);
    v.traces.push_back(est.bergman_sup_trace);
    if (est.decreasing && est.bergman_sup_trace.last() < o.tol) {
      v.verdict = Verdict::NumericalEvidenceUME;
      v.limit_description = "(1/k) sum_{i<k} C_{rho o phi_i}, k = " + std::to_string(v.k) +
                            ", rho = phi_{k j_max} (conjugated to the origin)";
    } else {
      v.verdict = Verdict::Inconclusive;
      v.note = "Bergman sup trace does not decrease below tol";
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotConverging) throw;
    v.verdict = Verdict::Inconclusive;
    v.note = e.what();
  }
  return v;
}

}  // namespace ballerg
