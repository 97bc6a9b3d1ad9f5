#include "ballerg/geometry.hpp"

#include <cmath>
#include <string>

namespace ballerg {

bool is_interior(std::span<const Complex> z) { return norm2(z) < 1.0; }

void require_interior(std::span<const Complex> z, const char* what) {
  if (!is_interior(z)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " must lie in the open unit ball (|z| = " +
                    std::to_string(norm(z)) + ")");
  }
}

BoundaryPoint::BoundaryPoint(CVector coords) : coords_(std::move(coords)) {
  if (coords_.empty() || std::abs(norm(coords_) - 1.0) > kBoundaryTol) {
    throw Error(ErrorCode::InvalidArgument, "boundary point must have unit norm");
  }
}

BoundaryPoint BoundaryPoint::normalized(std::span<const Complex> v) {
  const double len = norm(v);
  if (len == 0.0) throw Error(ErrorCode::InvalidArgument, "cannot normalize the zero vector");
  return BoundaryPoint(scaled(1.0 / len, v));
}

Involution::Involution(CVector a) : a_(std::move(a)), a_norm2_(norm2(a_)) {
  require_interior(a_, "involution center");
  s_ = std::sqrt(1.0 - a_norm2_);
}

CVector Involution::project(std::span<const Complex> z) const {
  if (a_norm2_ == 0.0) return CVector(z.size(), Complex{0.0, 0.0});
  return scaled(inner(z, a_) / a_norm2_, a_);
}

CVector Involution::project_perp(std::span<const Complex> z) const {
  return sub(z, project(z));
}

CVector Involution::apply(std::span<const Complex> z) const {
  if (a_norm2_ == 0.0) return scaled(-1.0, z);
  const Complex denom = 1.0 - inner(z, a_);
  if (std::abs(denom) < 1e-14) {
    throw Error(ErrorCode::DenominatorVanishes, "1 - <z, a> vanishes");
  }
  const CVector pz = project(z);
  CVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const Complex qz = z[i] - pz[i];
    out[i] = (a_[i] - pz[i] - s_ * qz) / denom;
  }
  return out;
}

CMatrix Involution::derivative(std::span<const Complex> z) const {
  const std::size_t n = z.size();
  if (a_norm2_ == 0.0) return -1.0 * CMatrix::identity(n);
  // phi = N / D with N(z) = a - (P + s Q) z and D(z) = 1 - <z, a>:
  // d phi = -(P + s Q) / D + N conj(a)^T / D^2.
  const Complex denom = 1.0 - inner(z, a_);
  if (std::abs(denom) < 1e-14) {
    throw Error(ErrorCode::DenominatorVanishes, "1 - <z, a> vanishes");
  }
  const CVector numer = scaled(denom, apply(z));
  CMatrix d(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex p = a_[i] * std::conj(a_[j]) / a_norm2_;
      const Complex q = (i == j ? 1.0 : 0.0) - p;
      d(i, j) = -(p + s_ * q) / denom + numer[i] * std::conj(a_[j]) / (denom * denom);
    }
  }
  return d;
}

CVector involution_apply(std::span<const Complex> a, std::span<const Complex> z) {
  require_interior(z, "z");
  return Involution(CVector(a.begin(), a.end())).apply(z);
}

double pseudo_hyperbolic(std::span<const Complex> z, std::span<const Complex> w) {
  require_interior(z, "z");
  require_interior(w, "w");
  return std::min(1.0, norm(Involution(CVector(z.begin(), z.end())).apply(w)));
}

double bergman_distance(std::span<const Complex> z, std::span<const Complex> w) {
  const double t = pseudo_hyperbolic(z, w);
  if (t < 0.5) return std::atanh(t);
  // Far apart: 1 - t^2 from the product identity keeps the logarithm accurate.
  const double one_minus_t2 =
      (1.0 - norm2(z)) * (1.0 - norm2(w)) / std::norm(1.0 - inner(w, z));
  return std::log1p(t) - 0.5 * std::log(one_minus_t2);
}

bool in_bergman_ball(std::span<const Complex> center, double radius, std::span<const Complex> w) {
  return bergman_distance(center, w) < radius;
}

bool ellipsoid_contains(double k, const BoundaryPoint& zeta, std::span<const Complex> z) {
  if (!(k > 0.0)) throw Error(ErrorCode::InvalidArgument, "ellipsoid parameter must be positive");
  require_interior(z, "z");
  return std::norm(1.0 - inner(z, zeta.coords())) <= k * (1.0 - norm2(z));
}

double poincare_omega(double t) {
  if (!(t >= 0.0) || t >= 1.0) {
    throw Error(ErrorCode::OutOfRange, "Poincare argument must lie in [0, 1)");
  }
  return std::atanh(t);
}

}  // namespace ballerg
