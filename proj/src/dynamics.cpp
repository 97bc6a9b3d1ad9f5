#include "ballerg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ballerg {

namespace {

constexpr double kMaxFixedNorm = 1.0 - 1e-6;

double residual_at(const HoloMap& map, std::span<const Complex> z) {
  return norm(sub(evaluate_raw(map, z), z));
}

// Returns the Newton limit from `seed`, or nullopt if the iteration leaves
// the ball or stalls before reaching working precision.
std::optional<CVector> newton(const HoloMap& map, CVector z) {
  const std::size_t n = z.size();
  const CMatrix eye = CMatrix::identity(n);
  double res = residual_at(map, z);
  for (int it = 0; it < 60 && res > 1e-15; ++it) {
    CVector dir;
    try {
      const CVector f = sub(evaluate_raw(map, z), z);
      dir = solve(derivative_at(map, z) - eye, scaled(-1.0, f));
    } catch (const Error&) {
      return std::nullopt;
    }
    double t = 1.0;
    bool moved = false;
    while (t > 1e-10) {
      CVector cand = add(z, scaled(t, dir));
      if (norm2(cand) < 1.0) {
        const double r = residual_at(map, cand);
        if (r < res) {
          z = std::move(cand);
          res = r;
          moved = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!moved) break;
  }
  return z;
}

bool accept_fixed(const HoloMap& map, std::span<const Complex> z, double tol) {
  if (norm(z) > kMaxFixedNorm) return false;
  const CVector w = evaluate_raw(map, z);
  if (norm2(w) >= 1.0) return false;
  return norm(sub(w, z)) <= tol && bergman_distance(w, z) <= tol;
}

}  // namespace

std::optional<CVector> find_fixed_point(const HoloMap& map, double tol, unsigned budget) {
  if (!(tol > 0.0) || tol >= 1.0) throw Error(ErrorCode::InvalidArgument, "tol must be in (0, 1)");
  const std::size_t n = map.dim();
  const CVector origin(n, Complex{0.0, 0.0});
  if (map.as_matrix()) return origin;

  // Orbit of 0, stopped as soon as it escapes the shell.
  std::vector<CVector> orbit{origin};
  bool escaped = false;
  for (unsigned j = 1; j <= budget; ++j) {
    CVector next = evaluate_raw(map, orbit.back());
    const double r = norm(next);
    if (!(r < 1.0) || r > 1.0 - tol) {
      escaped = true;
      break;
    }
    orbit.push_back(std::move(next));
    if (j >= 256) break;  // seeds only need the head of the orbit
  }

  std::vector<CVector> seeds{origin};
  for (std::size_t j = 1; j < orbit.size(); j *= 2) seeds.push_back(orbit[j]);
  for (std::size_t m = 4; m <= orbit.size(); m *= 4) {
    CVector avg(n, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < m; ++j) avg = add(avg, orbit[j]);
    seeds.push_back(scaled(1.0 / static_cast<double>(m), avg));
  }

  for (const auto& seed : seeds) {
    if (accept_fixed(map, seed, 1e-14)) return seed;
    auto z = newton(map, seed);
    if (z && accept_fixed(map, *z, tol)) return z;
  }

  if (!escaped) {
    // Continue the escape test over the full budget.
    CVector w = orbit.back();
    for (unsigned j = static_cast<unsigned>(orbit.size()); j <= budget; ++j) {
      w = evaluate_raw(map, w);
      const double r = norm(w);
      if (!(r < 1.0) || r > 1.0 - tol) {
        escaped = true;
        break;
      }
    }
  }
  if (escaped) return std::nullopt;
  throw Error(ErrorCode::Inconclusive,
              "no fixed point found and the orbit of 0 stays inside |z| <= 1 - tol");
}

unsigned limit_period(const SpectralReport& report) {
  unsigned k = 1;
  for (const auto& u : report.unity_orders) {
    if (!u.order) throw Error(ErrorCode::NonRootEigenvalue, "unit eigenvalue is not a root of unity");
    k = std::lcm(k, static_cast<unsigned>(*u.order));
  }
  return k;
}

// ---- retraction -------------------------------------------------------------

RetractionEstimate::RetractionEstimate(HoloMap map, unsigned period, unsigned j_max)
    : map_(std::move(map)), period_(period), j_max_(j_max) {
  if (period == 0 || j_max == 0) {
    throw Error(ErrorCode::InvalidArgument, "period and j_max must be positive");
  }
  if (auto m = map_.as_matrix()) {
    power_ = matrix_power(*m, static_cast<unsigned long long>(period) * j_max);
  }
}

CVector RetractionEstimate::apply(std::span<const Complex> z) const {
  if (power_) return power_->apply(z);
  CVector w(z.begin(), z.end());
  for (unsigned long long i = 0; i < static_cast<unsigned long long>(period_) * j_max_; ++i)
    w = evaluate_raw(map_, w);
  return w;
}

CMatrix linear_retraction(const CMatrix& a, double tol) {
  const auto split = spectral_split(a, tol);
  const std::size_t n = a.dim();
  const std::size_t s = split.unitary_basis.size();
  if (s == 0) return CMatrix(n);
  if (s == n) return CMatrix::identity(n);
  std::vector<CVector> cols = split.unitary_basis;
  cols.insert(cols.end(), split.attracting_basis.begin(), split.attracting_basis.end());
  const CMatrix basis = CMatrix::from_columns(cols);
  // rho = B diag(I_s, 0) B^{-1}; row i of B^{-1} from solving B^* y = e_i.
  const CMatrix basis_adj = basis.adjoint();
  CMatrix rho(n);
  for (std::size_t i = 0; i < s; ++i) {
    const CVector row = solve(basis_adj, unit_vector(n, i));  // conj of row i of B^{-1}
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) rho(r, c) += cols[i][r] * std::conj(row[c]);
  }
  return rho;
}

RetractionEstimate estimate_retraction(const HoloMap& map, unsigned k, unsigned j_max,
                                       const GridSpec& grid, double tol) {
  grid.validate();
  const std::size_t n = map.dim();
  const CVector origin(n, Complex{0.0, 0.0});
  if (norm(evaluate(map, origin)) > 1e-8) {
    throw Error(ErrorCode::NotFixedPoint, "estimate_retraction expects phi(0) = 0");
  }
  RetractionEstimate est(map, k, j_max);
  const auto points = grid_points(grid, n);

  std::vector<double> sup(j_max, 0.0);
  const auto matrix = map.as_matrix();
  std::optional<CMatrix> step;
  if (matrix) step = matrix_power(*matrix, k);

  for (const auto& z : points) {
    const CVector rho = est.apply(z);
    CVector w = z;
    CVector prev;
    for (unsigned j = 1; j <= j_max; ++j) {
      prev = w;
      if (step) {
        w = step->apply(w);
      } else {
        for (unsigned i = 0; i < k; ++i) w = evaluate_raw(map, w);
      }
      sup[j - 1] = std::max(sup[j - 1], bergman_distance(w, rho));
    }
    est.step_residual = std::max(est.step_residual, norm(sub(w, prev)));

    const CVector rho2 = est.apply(rho);
    est.idempotency_residual = std::max(est.idempotency_residual, bergman_distance(rho2, rho));

    CVector zl = z;
    for (unsigned l = 1; l <= k; ++l) {
      zl = evaluate_raw(map, zl);
      const CVector zkl = iterate(map, k, zl);
      est.period_residual =
          std::max(est.period_residual, norm(sub(est.apply(zl), est.apply(zkl))));
    }
    est.samples.emplace_back(z, rho);
  }

  for (unsigned j = 1; j <= j_max; ++j) est.bergman_sup_trace.push(j, sup[j - 1]);

  const std::size_t tail = std::max<std::size_t>(1, sup.size() / 4);
  bool monotone_tail = true;
  for (std::size_t i = sup.size() - tail; i + 1 < sup.size(); ++i)
    if (sup[i + 1] > sup[i] * (1.0 + 1e-12) + 1e-15) monotone_tail = false;
  est.decreasing = monotone_tail && sup.back() < sup.front();

  if (est.step_residual > tol) {
    throw Error(ErrorCode::NotConverging, "iterates still move by " +
                                              std::to_string(est.step_residual) + " at j_max");
  }
  return est;
}

// ---- boundary behaviour -------------------------------------------------------

DenjoyWolffEstimate denjoy_wolff(const HoloMap& map, double tol, unsigned j_max) {
  if (!(tol > 0.0) || tol >= 1.0) throw Error(ErrorCode::InvalidArgument, "tol must be in (0, 1)");
  const std::size_t n = map.dim();
  ConvergenceTrace trace("dw_step");
  CVector prev(n, Complex{0.0, 0.0});
  for (unsigned j = 1; j <= j_max; ++j) {
    CVector w = evaluate_raw(map, prev);
    const double r = norm(w);
    if (!(r < 1.0)) {
      // Rounded onto the sphere; that is as close as double precision gets.
      const double step = norm(sub(w, prev));
      return {BoundaryPoint::normalized(w), std::max(step, 1.0 - norm(prev)), j, trace};
    }
    trace.push(j - 1, bergman_distance(prev, w));
    const double step = norm(sub(w, prev));
    if (r > 1.0 - tol && step <= tol) {
      return {BoundaryPoint::normalized(w), std::max(1.0 - r, step), j, trace};
    }
    prev = std::move(w);
  }
  throw Error(ErrorCode::NotEscaping,
              "orbit of 0 has not reached the boundary after " + std::to_string(j_max) + " steps");
}

DilationResult boundary_dilation_ratio(const HoloMap& map, const RetractionEstimate& retraction,
                                       double eta, const GridSpec& grid, double margin) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must be in (0, 1)");
  grid.validate();
  const std::size_t n = map.dim();
  if (norm(evaluate(map, CVector(n, Complex{0.0, 0.0}))) > 1e-8) {
    throw Error(ErrorCode::NotFixedPoint, "boundary_dilation_ratio expects phi(0) = 0");
  }
  DilationResult out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (const auto& z : grid_points(grid, n)) {
    if (norm(sub(z, retraction.apply(z))) < eta) continue;
    ++out.region_size;
    const double ratio = (1.0 - norm(evaluate_raw(map, z))) / (1.0 - norm(z));
    if (ratio < out.min_ratio) {
      out.min_ratio = ratio;
      out.arg_min = z;
    }
  }
  if (out.region_size == 0) {
    throw Error(ErrorCode::EmptyRegion, "no grid point with |z - rho(z)| >= eta");
  }
  out.exceeds_one = out.min_ratio > 1.0 + margin;
  return out;
}

FixedBehavior fixed_behavior(const HoloMap& map, double tol, unsigned budget) {
  if (auto a = find_fixed_point(map, tol, budget)) {
    return InteriorFixed{*a, spectral_report(derivative_at(map, *a), tol)};
  }
  return NoInteriorFixed{denjoy_wolff(map, tol, std::max(budget, 100000u))};
}

}  // namespace ballerg
