#pragma once

#include <span>

#include "ballerg/linalg.hpp"

namespace ballerg {

// Tolerance on |zeta| for points of the unit sphere.
inline constexpr double kBoundaryTol = 1e-12;

bool is_interior(std::span<const Complex> z);
// Throws InvalidArgument naming `what` unless |z| < 1.
void require_interior(std::span<const Complex> z, const char* what);

// A point of the unit sphere. Kept apart from interior points so that code
// working at the boundary cannot be handed a near-boundary interior point.
class BoundaryPoint {
 public:
  explicit BoundaryPoint(CVector coords);
  // Rescales any nonzero vector onto the sphere.
  static BoundaryPoint normalized(std::span<const Complex> v);

  const CVector& coords() const { return coords_; }
  std::size_t dim() const { return coords_.size(); }

 private:
  CVector coords_;
};

// The involutive automorphism swapping 0 and a. For a = 0 we use -identity.
class Involution {
 public:
  explicit Involution(CVector a);

  const CVector& center() const { return a_; }
  double s() const { return s_; }

  CVector project(std::span<const Complex> z) const;        // P_a
  CVector project_perp(std::span<const Complex> z) const;   // Q_a = I - P_a
  CVector apply(std::span<const Complex> z) const;
  CMatrix derivative(std::span<const Complex> z) const;

 private:
  CVector a_;
  double a_norm2_ = 0.0;
  double s_ = 1.0;
};

CVector involution_apply(std::span<const Complex> a, std::span<const Complex> z);

// |phi_z(w)|, the pseudo-hyperbolic distance.
double pseudo_hyperbolic(std::span<const Complex> z, std::span<const Complex> w);

// beta(z, w) = 1/2 log((1 + |phi_z(w)|) / (1 - |phi_z(w)|)).
double bergman_distance(std::span<const Complex> z, std::span<const Complex> w);

bool in_bergman_ball(std::span<const Complex> center, double radius, std::span<const Complex> w);

// |1 - <z, zeta>|^2 <= k (1 - |z|^2)
bool ellipsoid_contains(double k, const BoundaryPoint& zeta, std::span<const Complex> z);

// Poincare distance from 0 to t in the disk: 1/2 log((1 + t)/(1 - t)).
double poincare_omega(double t);

}  // namespace ballerg
