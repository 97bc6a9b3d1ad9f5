#include <cmath>
#include <random>

#include "ballerg/dynamics.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ballerg;
using ballerg::testing::euclid;
using ballerg::testing::hyperbolic_slice;
using ballerg::testing::random_ball_point;
using ballerg::testing::square_monomial;

namespace {

const Complex I{0.0, 1.0};

SpectralReport report_of(std::initializer_list<Complex> diag) {
  return spectral_report(CMatrix::diagonal(diag));
}

bool is_zero(const CVector& v) { return norm(v) == 0.0; }

}  // namespace

TEST_CASE("fixed points") {
  auto half = find_fixed_point(HoloMap::linear(CMatrix::diagonal({0.5, 0.5})));
  REQUIRE(half);
  CHECK(is_zero(*half));

  CHECK_FALSE(find_fixed_point(hyperbolic_slice(0.5)).has_value());
  CHECK_FALSE(find_fixed_point(hyperbolic_slice(0.9, 3)).has_value());

  auto sq = find_fixed_point(square_monomial());
  REQUIRE(sq);
  CHECK(norm(*sq) < 1e-12);
}

TEST_CASE("fixed point away from the origin is recovered") {
  // phi_b o (z/2) o phi_b fixes b.
  const CVector b{0.3, Complex{0.1, -0.2}};
  const auto map = HoloMap::composite({HoloMap::involution(b),
                                       HoloMap::linear(CMatrix::diagonal({0.5, 0.5})),
                                       HoloMap::involution(b)});
  auto a = find_fixed_point(map);
  REQUIRE(a);
  CHECK(euclid(*a, b) < 1e-10);

  // A nonlinear one: phi(z) = (0.2 + 0.3 z1^2, 0.5 z1 z2). On the first
  // coordinate the fixed point is the root of 0.3 t^2 - t + 0.2 = 0 in the disk.
  const auto poly = HoloMap::monomial(
      2, {{MonomialTerm{0.2, {0, 0}}, MonomialTerm{0.3, {2, 0}}}, {MonomialTerm{0.5, {1, 1}}}});
  auto p = find_fixed_point(poly);
  REQUIRE(p);
  const double t = (1.0 - std::sqrt(1.0 - 4 * 0.3 * 0.2)) / (2 * 0.3);
  CHECK(std::abs((*p)[0] - t) < 1e-10);
  CHECK(std::abs((*p)[1]) < 1e-10);
}

TEST_CASE("limit period") {
  CHECK(limit_period(report_of({0.5, 0.3})) == 1);
  CHECK(limit_period(report_of({I, 0.5})) == 4);
  CHECK(limit_period(report_of({-1.0, I})) == 4);
  CHECK(limit_period(report_of({-1.0, std::exp(I * (2.0 * M_PI / 3.0))})) == 6);
  CHECK_THROWS_AS(limit_period(report_of({std::exp(I * 1.0), 0.5})), Error);

  // The k-th power has no unit eigenvalue other than 1.
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto u = ballerg::testing::random_unitary(rng, 3);
    const Complex roots[] = {std::exp(I * (2.0 * M_PI * (trial % 5) / 5.0)), -1.0, 0.4};
    CMatrix d = CMatrix::diagonal(roots);
    const CMatrix a = u * d * u.adjoint();
    const unsigned k = limit_period(spectral_report(a));
    for (const auto& lambda : eigenvalues(matrix_power(a, k))) {
      const bool inside = std::abs(lambda) < 1.0 - 1e-8;
      const bool one = std::abs(lambda - 1.0) <= 1e-8;
      CHECK((inside || one));
    }
  }
}

TEST_CASE("retraction estimates") {
  const auto grid = GridSpec::geometric(20, 4);

  const auto rot = estimate_retraction(HoloMap::linear(CMatrix::diagonal({I, 0.5})), 4, 32, grid);
  for (const auto& [z, rho] : rot.samples) {
    CHECK(euclid(rho, CVector{z[0], 0.0}) < 1e-6);
  }
  CHECK(rot.idempotency_residual < 1e-8);
  CHECK(rot.period_residual < 1e-8);
  CHECK(rot.decreasing);

  const auto zero = estimate_retraction(HoloMap::linear(CMatrix::diagonal({0.5, 0.5})), 1, 64, grid);
  for (const auto& [z, rho] : zero.samples) CHECK(norm(rho) < 1e-15);

  const auto id = estimate_retraction(HoloMap::unitary(CMatrix::diagonal({I, I})), 4, 8, grid);
  for (const auto& [z, rho] : id.samples) CHECK(euclid(rho, z) < 1e-12);
  CHECK(id.bergman_sup_trace.last() < 1e-6);

  // diag(0.5, 0.999) is far from converged after 8 steps.
  CHECK_THROWS_AS(
      estimate_retraction(HoloMap::linear(CMatrix::diagonal({0.5, 0.999})), 1, 8, grid), Error);

  // Nonlinear map fixing 0: the retraction is 0 and the trace decays.
  const auto poly = HoloMap::monomial(
      2, {{MonomialTerm{0.5, {1, 0}}, MonomialTerm{0.3, {0, 2}}}, {MonomialTerm{0.4, {0, 1}}}});
  const auto pr = estimate_retraction(poly, 1, 60, GridSpec::geometric(12, 4));
  CHECK(pr.idempotency_residual < 1e-6);
  CHECK(pr.bergman_sup_trace.value_at(10) < pr.bergman_sup_trace.value_at(0));
}

TEST_CASE("retraction image lies in the unitary subspace") {
  // Points with | |phi(z)| - |z| | <= 1e-9 sit on span(unitary_basis).
  const CMatrix a = CMatrix::diagonal({I, 0.5, -1.0});
  const auto report = spectral_report(a);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    CVector z = random_ball_point(rng, 3);
    if (trial % 2 == 0) z[1] = 0.0;
    const bool isometric = std::abs(norm(a.apply(z)) - norm(z)) <= 1e-9;
    CVector proj(3, Complex{0.0, 0.0});
    for (const auto& b : report.unitary_basis) proj = add(proj, scaled(inner(z, b), b));
    const bool on_subspace = euclid(proj, z) <= 1e-6;
    CHECK(isometric == on_subspace);
  }
}

TEST_CASE("Denjoy-Wolff point") {
  const auto dw = denjoy_wolff(hyperbolic_slice(0.5));
  CHECK(euclid(dw.point.coords(), CVector{1.0, 0.0}) < 1e-6);
  CHECK(dw.residual < 1e-6);

  const CMatrix swap(2, {0.0, 1.0, 1.0, 0.0});
  const auto swapped = HoloMap::composite(
      {HoloMap::unitary(swap), hyperbolic_slice(0.5), HoloMap::unitary(swap)});
  CHECK(euclid(denjoy_wolff(swapped).point.coords(), CVector{0.0, 1.0}) < 1e-6);

  CHECK(euclid(denjoy_wolff(hyperbolic_slice(0.9)).point.coords(), CVector{1.0, 0.0}) < 1e-6);

  CHECK_THROWS_AS(denjoy_wolff(HoloMap::linear(CMatrix::diagonal({0.5, 0.5}))), Error);

  // Successive Bergman steps eventually stop growing.
  const auto& pts = dw.step_trace.points();
  REQUIRE(pts.size() > 4);
  for (std::size_t i = pts.size() / 2; i + 1 < pts.size(); ++i)
    CHECK(pts[i + 1].second <= pts[i].second + 1e-6);
}

TEST_CASE("fixed behaviour dispatch") {
  auto inner_fixed = fixed_behavior(HoloMap::linear(CMatrix::diagonal({I, 0.5})));
  REQUIRE(std::holds_alternative<InteriorFixed>(inner_fixed));
  CHECK(limit_period(std::get<InteriorFixed>(inner_fixed).report) == 4);

  auto none = fixed_behavior(hyperbolic_slice(0.5));
  REQUIRE(std::holds_alternative<NoInteriorFixed>(none));
}

TEST_CASE("boundary dilation ratio") {
  const auto grid = GridSpec::geometric(30, 8);

  const auto lin = HoloMap::linear(CMatrix::diagonal({0.5, 0.5}));
  const auto rho0 = estimate_retraction(lin, 1, 64, grid);
  const auto d = boundary_dilation_ratio(lin, rho0, 0.5, grid);
  CHECK(d.min_ratio >= 1.5 - 1e-6);
  CHECK(d.exceeds_one);
  // Closed form (1 - r/2)/(1 - r) at the smallest admissible radius r = 0.5.
  CHECK(d.min_ratio == doctest::Approx(1.5).epsilon(1e-12));

  const auto sq = square_monomial();
  const RetractionEstimate rho_sq(sq, 1, 64);
  const auto ds = boundary_dilation_ratio(sq, rho_sq, 0.5, grid);
  CHECK(ds.min_ratio >= 1.5 - 1e-6);

  const auto rot = HoloMap::unitary(CMatrix::diagonal({I, I}));
  const auto rho_id = estimate_retraction(rot, 4, 8, grid);
  CHECK_THROWS_AS(boundary_dilation_ratio(rot, rho_id, 0.5, grid), Error);
}
