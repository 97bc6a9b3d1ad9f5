#pragma once

// Random generators and independent oracles shared by the test binaries.
// Nothing here calls into the code paths it is used to check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "ballerg/holo_map.hpp"
#include "ballerg/linalg.hpp"

namespace ballerg::testing {

inline Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  return {gauss(rng), gauss(rng)};
}

inline CMatrix random_matrix(std::mt19937_64& rng, std::size_t n) {
  CMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = random_complex(rng);
  return m;
}

// Gram-Schmidt on Gaussian columns.
inline CMatrix random_unitary(std::mt19937_64& rng, std::size_t n) {
  std::vector<CVector> cols;
  while (cols.size() < n) {
    CVector v(n);
    for (auto& c : v) c = random_complex(rng);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : cols) {
        Complex p{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) p += v[i] * std::conj(b[i]);
        for (std::size_t i = 0; i < n; ++i) v[i] -= p * b[i];
      }
    double len = 0.0;
    for (const auto& c : v) len += std::norm(c);
    len = std::sqrt(len);
    if (len < 1e-8) continue;
    for (auto& c : v) c /= len;
    cols.push_back(v);
  }
  return CMatrix::from_columns(cols);
}

// Uniform direction on the sphere, radius drawn in [0, r_max).
inline CVector random_ball_point(std::mt19937_64& rng, std::size_t n, double r_max = 0.95) {
  CVector v(n);
  double len = 0.0;
  for (auto& c : v) {
    c = random_complex(rng);
    len += std::norm(c);
  }
  len = std::sqrt(len);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double r = r_max * std::pow(unif(rng), 1.0 / static_cast<double>(2 * n));
  for (auto& c : v) c *= r / len;
  return v;
}

// Determinant by Gaussian elimination with partial pivoting.
inline Complex determinant(CMatrix m) {
  const std::size_t n = m.dim();
  Complex det{1.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (m(piv, k) == Complex{0.0, 0.0}) return {0.0, 0.0};
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

inline double euclid(const CVector& a, const CVector& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

// Bergman distance straight from the defining formula for n = 1:
// beta(z, w) = atanh(|z - w| / |1 - conj(z) w|).
inline double disk_bergman(Complex z, Complex w) {
  return std::atanh(std::abs(z - w) / std::abs(1.0 - std::conj(z) * w));
}

// z -> (z_1^2, 0) on B_2.
inline HoloMap square_monomial() {
  return HoloMap::monomial(2, {{MonomialTerm{1.0, {2, 0}}}, {}});
}

// Disk automorphism (z + c)/(1 + c z) extended to the ball automorphism
// -phi_a with a = (-c, 0, ...).
inline HoloMap hyperbolic_slice(double c, std::size_t n = 2) {
  CVector a(n, Complex{0.0, 0.0});
  a[0] = -c;
  return HoloMap::mobius(-1.0 * CMatrix::identity(n), a);
}

// A polynomial self-map of B_n with |phi(z)| <= budget < 1 on the closed ball:
// every monomial is bounded by 1 there, so the coefficient l1 norms control it.
inline HoloMap random_polynomial_map(std::mt19937_64& rng, std::size_t n, double budget = 0.95,
                                     bool fix_origin = false) {
  std::uniform_int_distribution<unsigned> deg(0, 2);
  std::vector<std::vector<MonomialTerm>> comps(n);
  double total = 0.0;
  std::vector<double> l1(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int t = 0; t < 3; ++t) {
      std::vector<unsigned> powers(n);
      unsigned d = 0;
      for (auto& p : powers) d += (p = deg(rng));
      if (d == 0 && fix_origin) powers[t % n] = 1;
      const Complex c = random_complex(rng);
      comps[i].push_back({c, powers});
      l1[i] += std::abs(c);
    }
  }
  for (double v : l1) total += v * v;
  const double scale = budget / std::sqrt(total);
  for (auto& comp : comps)
    for (auto& term : comp) term.coef *= scale;
  return HoloMap::monomial(n, comps);
}

// A = U (D ⊕ T) U^* with D a diagonal of unit-modulus eigenvalues and T
// upper triangular with eigenvalues of modulus <= 0.9 and ||T|| <= 1, so
// ||A|| <= 1. `mean_ergodic` is the planted answer: every unit eigenvalue
// is a root of unity.
struct PlantedMatrix {
  CMatrix a;
  std::vector<Complex> unit_part;
  std::vector<Complex> interior_part;
  bool mean_ergodic = true;
};

inline PlantedMatrix planted_matrix(std::mt19937_64& rng, std::size_t n, std::size_t unit_count,
                                    int non_roots) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> order(1, 8);
  PlantedMatrix out;
  for (std::size_t i = 0; i < unit_count; ++i) {
    if (static_cast<int>(i) < non_roots) {
      // Angles far from every root of unity of order <= 64.
      for (;;) {
        const Complex lambda = std::polar(1.0, 2.0 * std::numbers::pi * unif(rng));
        double closest = 1.0;
        Complex p{1.0, 0.0};
        for (int q = 1; q <= 64; ++q) {
          p *= lambda;
          closest = std::min(closest, std::abs(p - 1.0));
        }
        if (closest > 1e-3) {
          out.unit_part.push_back(lambda);
          out.mean_ergodic = false;
          break;
        }
      }
    } else {
      const int q = order(rng);
      const int k = std::uniform_int_distribution<int>(0, q - 1)(rng);
      out.unit_part.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / q));
    }
  }
  const std::size_t m = n - unit_count;
  CMatrix full(n);
  for (std::size_t i = 0; i < unit_count; ++i) full(i, i) = out.unit_part[i];
  double diag_max = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Complex mu = std::polar(0.9 * unif(rng), 2.0 * std::numbers::pi * unif(rng));
    out.interior_part.push_back(mu);
    full(unit_count + i, unit_count + i) = mu;
    diag_max = std::max(diag_max, std::abs(mu));
  }
  // Strictly upper part with Frobenius norm at most 1 - max|mu|.
  std::vector<Complex> upper;
  double fro = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      upper.push_back(random_complex(rng));
      fro += std::norm(upper.back());
    }
  const double scale = fro > 0.0 ? unif(rng) * (1.0 - diag_max) / std::sqrt(fro) : 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      full(unit_count + i, unit_count + j) = scale * upper[idx++];
  const CMatrix u = random_unitary(rng, n);
  out.a = u * full * u.adjoint();
  return out;
}

}  // namespace ballerg::testing
