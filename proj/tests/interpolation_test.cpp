#include <cmath>
#include <random>
#include <sstream>

#include "ballerg/interpolation.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace ballerg;
using ballerg::testing::euclid;
using ballerg::testing::square_monomial;

namespace {

NodeSequence disk_nodes(std::initializer_list<double> xs) {
  NodeSequence s;
  for (double x : xs) s.points.push_back(CVector{x, 0.0});
  return s;
}

// 1 - |x_{j+1}| = q_j (1 - |x_j|) with q_j in [0.2, a_max), random directions in B_2.
NodeSequence ratio_sequence(std::mt19937_64& rng, std::size_t count, double a_max) {
  std::uniform_real_distribution<double> q(0.2, a_max);
  NodeSequence s;
  s.provenance = "generated";
  double gap = 0.5;
  for (std::size_t j = 0; j < count; ++j) {
    CVector dir = ballerg::testing::random_ball_point(rng, 2, 1.0);
    dir = scaled(1.0 / norm(dir), dir);
    s.points.push_back(scaled(1.0 - gap, dir));
    gap *= q(rng);
  }
  return s;
}

}  // namespace

TEST_CASE("ratio condition") {
  NodeSequence halving;
  for (int j = 1; j <= 12; ++j) halving.points.push_back(CVector{1.0 - std::ldexp(1.0, -j), 0.0});
  CHECK(ratio_condition(halving, 0.6).holds);

  auto flat = ratio_condition(disk_nodes({0.5, -0.5, 0.5}), 0.9);
  CHECK_FALSE(flat.holds);
  CHECK(flat.first_violation == 1u);

  auto edge = ratio_condition(disk_nodes({0.5, 0.9, 0.99}), 0.2);
  CHECK_FALSE(edge.holds);
  CHECK(edge.first_violation == 1u);

  auto later = ratio_condition(disk_nodes({0.5, 0.9, 0.95}), 0.3);
  CHECK_FALSE(later.holds);
  CHECK(later.first_violation == 2u);
}

TEST_CASE("separation products") {
  auto two = separation_products(disk_nodes({0.5, -0.5}));
  CHECK(two.products[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(two.products[1] == doctest::Approx(0.8).epsilon(1e-14));

  for (double r : {0.1, 0.7, 0.99}) {
    NodeSequence s;
    s.points = {CVector{0.0, r}, CVector{0.0, -r}};
    CHECK(separation_products(s).delta_min == doctest::Approx(2 * r / (1 + r * r)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(separation_products(disk_nodes({0.3, 0.5, 0.3})), Error);
}

TEST_CASE("delta_min is monotone in the truncation and stabilises") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const auto seq = ratio_sequence(rng, 30, 0.5);
    REQUIRE(ratio_condition(seq, 0.5).holds);
    double prev = 1.0;
    std::vector<double> deltas;
    for (std::size_t t = 2; t <= 30; ++t) {
      const double d = separation_products(seq, t).delta_min;
      CHECK(d > 0.0);
      CHECK(d <= prev * (1.0 + 1e-12));
      prev = d;
      deltas.push_back(d);
    }
    // The tail changes by less than 1% once 20 nodes are in.
    CHECK(deltas.back() >= 0.99 * deltas[18]);
  }
}

TEST_CASE("interpolants") {
  const auto fam = build_interpolants(disk_nodes({0.5, -0.5}));
  CHECK(std::abs(fam.eval(0, CVector{0.5, 0.0}) - 1.0) < 1e-14);
  CHECK(std::abs(fam.eval(0, CVector{-0.5, 0.0})) < 1e-14);
  const auto grid = GridSpec::geometric(20, 6);
  CHECK(fam.measured_sum(grid) <= 2.5 + 1e-12);

  const auto single = build_interpolants(disk_nodes({0.3}));
  CHECK(single.eval(0, CVector{-0.9, 0.2}) == Complex{1.0, 0.0});

  NodeSequence close = disk_nodes({0.5, 0.5 + 1e-8, -0.2});
  CHECK_THROWS_AS(build_interpolants(close), Error);

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto seq = ratio_sequence(rng, 12, 0.5);
    const auto f = build_interpolants(seq);
    for (std::size_t l = 0; l < seq.points.size(); ++l) {
      for (std::size_t j = 0; j < seq.points.size(); ++j) {
        const Complex v = f.eval(l, seq.points[j]);
        CHECK(std::abs(v - (l == j ? 1.0 : 0.0)) <= 1e-10);
      }
      CHECK(f.measured_sup(l, grid) <= 1.0 / f.delta_min() + 1e-6);
    }
  }
}

TEST_CASE("triangular array for the squaring map") {
  const auto grid = GridSpec::geometric();
  const auto map = square_monomial();
  const auto arr = build_triangular_array(map, 0.9, 20, grid);
  REQUIRE(arr.anchors.size() == 20);
  for (unsigned j = 1; j <= 20; ++j) {
    const double closed = std::pow(0.9, std::ldexp(1.0, -static_cast<int>(j)));
    CHECK(std::abs(arr.anchors[j - 1][0] - closed) < 1e-12);
    CHECK(std::abs(arr.anchors[j - 1][1]) == 0.0);
    for (unsigned l = 1; l <= j; ++l) {
      const double node = std::pow(0.9, std::ldexp(1.0, static_cast<int>(l) - static_cast<int>(j)));
      CHECK(std::abs(arr.rows[j - 1][l - 1][0] - node) < 1e-9);
    }
  }
  CHECK(arr.schwarz_chain);
  CHECK(arr.nodes.points.size() == 20);
  CHECK(arr.ratio_a < 1.0);
  CHECK(ratio_condition(arr.nodes, arr.ratio_a).holds);
  // (1 - 0.9^{1/2}) / (1 - 0.9) is the largest consecutive ratio.
  CHECK(arr.ratio_a == doctest::Approx((1 - std::sqrt(0.9)) / 0.1).epsilon(1e-2));
  CHECK(arr.dilation_a < 1.0);

  CHECK_THROWS_AS(build_triangular_array(HoloMap::linear(CMatrix::diagonal({0.5, 0.5})), 0.9, 5, grid),
                  Error);
  try {
    build_triangular_array(HoloMap::linear(CMatrix::diagonal({0.5, 0.5})), 0.9, 5, grid);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MapContracts);
  }
}

TEST_CASE("witness function") {
  const auto grid = GridSpec::geometric();
  const auto map = square_monomial();
  const auto arr = build_triangular_array(map, 0.9, 12, grid);
  const auto f = witness_function(map, arr);
  CHECK(f.eval(CVector{0.0, 0.0}) == Complex{0.0, 0.0});
  for (const auto& x : arr.nodes.points) CHECK(std::abs(f.eval(x) - norm2(x)) < 1e-8);
  CHECK(std::abs(f.eval(CVector{0.9, 0.0}) - 0.81) < 1e-8);
  const double sup = f.sup_grid(grid);
  CHECK(sup >= 0.81);
  for (unsigned j = 1; j <= 12; ++j) {
    const Complex avg = f.row_cesaro(j);
    CHECK(avg.real() >= 0.81 - 1e-6);
    CHECK(std::abs(avg) / sup >= 0.81 / sup - 1e-3);
  }
}

TEST_CASE("node CSV round trip") {
  NodeSequence s;
  s.points = {CVector{Complex{0.1, -0.2}, 0.3}, CVector{Complex{-0.5, 1e-17}, Complex{0.0, 0.25}}};
  std::stringstream ss;
  write_nodes_csv(ss, s);
  const auto back = read_nodes_csv(ss);
  REQUIRE(back.points.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(back.points[i] == s.points[i]);

  std::stringstream bad("0.1,0.2,0.3\n");
  CHECK_THROWS_AS(read_nodes_csv(bad), Error);
  std::stringstream junk("0.1,abc\n");
  CHECK_THROWS_AS(read_nodes_csv(junk), Error);
  std::stringstream outside("1.5,0\n");
  CHECK_THROWS_AS(read_nodes_csv(outside), Error);
}
