#include <algorithm>
#include <cmath>
#include <numbers>

#include "ballerg/linalg.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ballerg;
using ballerg::testing::random_matrix;
using ballerg::testing::random_unitary;

namespace {

bool contains(const std::vector<Complex>& values, Complex target, double tol) {
  return std::any_of(values.begin(), values.end(),
                     [&](Complex v) { return std::abs(v - target) <= tol; });
}

// Residual of u against the orthogonal complement of span(basis).
double off_span(const CVector& u, const std::vector<CVector>& basis) {
  CVector r = u;
  for (const auto& b : basis) {
    const Complex p = inner(r, b);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= p * b[i];
  }
  return norm(r);
}

}  // namespace

TEST_CASE("eigenvalues of small closed-form matrices") {
  auto diag = eigenvalues(CMatrix::diagonal({0.5, 0.25}));
  CHECK(contains(diag, 0.5, 1e-14));
  CHECK(contains(diag, 0.25, 1e-14));

  CMatrix nil(2, {0.0, 1.0, 0.0, 0.0});
  auto zero = eigenvalues(nil);
  REQUIRE(zero.size() == 2);
  CHECK(std::abs(zero[0]) < 1e-14);
  CHECK(std::abs(zero[1]) < 1e-14);

  // Rotation by theta: characteristic polynomial t^2 - 2 cos(theta) t + 1.
  const double theta = 0.7;
  CMatrix rot(2, {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)});
  auto r = eigenvalues(rot);
  CHECK(contains(r, std::polar(1.0, theta), 1e-13));
  CHECK(contains(r, std::polar(1.0, -theta), 1e-13));
}

TEST_CASE("eigenvalue residual and determinant identity on random matrices") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const CMatrix m = random_matrix(rng, n);
    const auto eig = eigenvalues(m);
    REQUIRE(eig.size() == n);
    const double mnorm = singular_values(m).front();
    double prod = 1.0;
    for (const Complex& lambda : eig) {
      const CMatrix shifted = m - lambda * CMatrix::identity(n);
      CHECK(singular_values(shifted).back() <= 1e-8 * (1.0 + mnorm));
      prod *= std::abs(lambda);
    }
    const double det = std::abs(testing::determinant(m));
    CHECK(std::abs(prod - det) <= 1e-8 * std::max(1.0, det));
  }
}

TEST_CASE("eigenvalues handle the supported size ceiling") {
  std::mt19937_64 rng(5);
  const CMatrix m = random_matrix(rng, 16);
  CHECK(eigenvalues(m).size() == 16);
  CHECK_THROWS_AS(CMatrix(17), Error);
}

TEST_CASE("singular values") {
  auto id = singular_values(CMatrix::identity(3));
  for (double s : id) CHECK(s == doctest::Approx(1.0).epsilon(1e-15));

  auto nil = singular_values(CMatrix(2, {0.0, 1.0, 0.0, 0.0}));
  CHECK(nil[0] == doctest::Approx(1.0));
  CHECK(std::abs(nil[1]) < 1e-15);

  auto d = singular_values(CMatrix::diagonal({0.3, 0.5}));
  CHECK(d[0] == doctest::Approx(0.5));
  CHECK(d[1] == doctest::Approx(0.3));

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = random_unitary(rng, 1 + trial % 6);
    for (double s : singular_values(u)) CHECK(std::abs(s - 1.0) <= 1e-10);
  }
}

TEST_CASE("svd reconstructs the matrix") {
  std::mt19937_64 rng(11);
  const CMatrix m = random_matrix(rng, 5);
  const Svd s = svd(m);
  CMatrix sigma(5);
  for (std::size_t i = 0; i < 5; ++i) sigma(i, i) = s.sigma[i];
  CHECK(max_abs_diff(s.u * sigma * s.v.adjoint(), m) < 1e-12);
  CHECK(std::is_sorted(s.sigma.rbegin(), s.sigma.rend()));
}

TEST_CASE("matrix power") {
  CHECK(max_abs_diff(matrix_power(CMatrix::diagonal({0.5}), 3), CMatrix::diagonal({0.125})) == 0.0);
  std::mt19937_64 rng(2);
  const CMatrix m = random_matrix(rng, 3);
  CHECK(matrix_power(m, 0) == CMatrix::identity(3));
  const CMatrix p = matrix_power(CMatrix::diagonal({Complex(0, 1), 0.5}), 4);
  CHECK(max_abs_diff(p, CMatrix::diagonal({1.0, 0.0625})) < 1e-15);

  // Additivity in the exponent.
  for (int trial = 0; trial < 30; ++trial) {
    const CMatrix a = 0.4 * random_matrix(rng, 1 + trial % 5);
    const unsigned x = trial % 7, y = (trial * 3) % 5;
    CHECK(max_abs_diff(matrix_power(a, x + y), matrix_power(a, x) * matrix_power(a, y)) < 1e-10);
  }
}

TEST_CASE("root of unity order") {
  CHECK(root_of_unity_order(Complex(0, 1)) == 4);
  CHECK(root_of_unity_order(1.0) == 1);
  CHECK(root_of_unity_order(-1.0) == 2);

  const Complex irrational = std::polar(1.0, std::numbers::pi * std::numbers::sqrt2);
  // Brute-force oracle: no q <= 64 brings lambda^q within 1e-8 of 1.
  double closest = 1e9;
  for (int q = 1; q <= 64; ++q)
    closest = std::min(closest, std::abs(std::polar(1.0, q * std::numbers::pi * std::numbers::sqrt2) - 1.0));
  REQUIRE(closest > 1e-8);
  CHECK_FALSE(root_of_unity_order(irrational, 1e-8, 64).has_value());

  CHECK_THROWS_AS(root_of_unity_order(0.5), Error);
}

TEST_CASE("spectral split") {
  auto s1 = spectral_split(CMatrix::diagonal({0.5, Complex(0, 1)}));
  REQUIRE(s1.attracting_basis.size() == 1);
  REQUIRE(s1.unitary_basis.size() == 1);
  CHECK(std::abs(std::abs(s1.attracting_basis[0][0]) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(s1.unitary_basis[0][1]) - 1.0) < 1e-12);

  const double t = 1.1;
  auto s2 = spectral_split(CMatrix(2, {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}));
  CHECK(s2.attracting_basis.empty());
  CHECK(s2.unitary_basis.size() == 2);

  auto s3 = spectral_split(CMatrix::diagonal({0.5, 0.3}));
  CHECK(s3.attracting_basis.size() == 2);
  CHECK(s3.unitary_basis.empty());

  CHECK_THROWS_AS(spectral_split(CMatrix::diagonal({1.5, 0.1})), Error);
  try {
    spectral_split(CMatrix::diagonal({1.0 - 1e-7, 0.1}));
    FAIL("expected AmbiguousModulus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AmbiguousModulus);
  }
}

TEST_CASE("spectral split bases are invariant on random contractions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + trial % 4;
    const CMatrix u = random_unitary(rng, n);
    // Upper-triangular block: unit entries first, interior ones after, with
    // couplings only inside the interior block.
    CMatrix t(n);
    const std::size_t unit = 1 + trial % (n - 1);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < unit) {
        t(i, i) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(i + 1) / 5.0);
      } else {
        t(i, i) = 0.6 * testing::random_complex(rng) / (1.0 + std::abs(testing::random_complex(rng)));
        if (std::abs(t(i, i)) > 0.8) t(i, i) *= 0.8 / std::abs(t(i, i));
        for (std::size_t j = i + 1; j < n; ++j) t(i, j) = 0.1 * testing::random_complex(rng);
      }
    }
    const CMatrix m = u * t * u.adjoint();
    const auto split = spectral_split(m);
    CHECK(split.unitary_basis.size() == unit);
    CHECK(split.attracting_basis.size() + split.unitary_basis.size() == n);
    for (const auto& b : split.unitary_basis) CHECK(off_span(m.apply(b), split.unitary_basis) < 1e-8);
    for (const auto& b : split.attracting_basis) CHECK(off_span(m.apply(b), split.attracting_basis) < 1e-8);
  }
}

TEST_CASE("spectral report collects unity orders") {
  const auto report = spectral_report(CMatrix::diagonal({Complex(0, 1), 0.5}));
  REQUIRE(report.unity_orders.size() == 1);
  CHECK(report.unity_orders[0].order == 4);
  CHECK(report.all_unit_roots_of_unity());
  CHECK(report.singular_values[0] == doctest::Approx(1.0));

  const auto bad = spectral_report(
      CMatrix::diagonal({std::polar(1.0, std::numbers::pi * std::numbers::sqrt2), 0.5}));
  CHECK_FALSE(bad.all_unit_roots_of_unity());
}
