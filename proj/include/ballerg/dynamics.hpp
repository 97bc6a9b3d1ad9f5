#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ballerg/geometry.hpp"
#include "ballerg/holo_map.hpp"
#include "ballerg/linalg.hpp"
#include "ballerg/trace.hpp"

namespace ballerg {

// Damped Newton on phi(z) - z, seeded from 0, from orbit points of 0 and
// from Cesaro averages of that orbit. Returns nullopt ("none") when no seed
// converges and the orbit of 0 leaves the shell |z| <= 1 - tol within
// `budget` steps; throws Inconclusive when neither happens.
std::optional<CVector> find_fixed_point(const HoloMap& map, double tol = 1e-8,
                                        unsigned budget = 10000);

// lcm of the unity orders of the unit-modulus eigenvalues (1 when none).
unsigned limit_period(const SpectralReport& report);

class RetractionEstimate {
 public:
  RetractionEstimate(HoloMap map, unsigned period, unsigned j_max);

  unsigned period() const { return period_; }
  unsigned j_max() const { return j_max_; }
  // rho(z) ~ phi_{k j_max}(z)
  CVector apply(std::span<const Complex> z) const;

  std::vector<std::pair<CVector, CVector>> samples;
  ConvergenceTrace bergman_sup_trace{"bergman_sup"};
  bool decreasing = false;
  double idempotency_residual = 0.0;  // max beta(rho(rho(z)), rho(z))
  double period_residual = 0.0;       // max |rho(phi_l z) - rho(phi_{k+l} z)|, l = 1..k
  double step_residual = 0.0;         // max |phi_{k j_max}(z) - phi_{k (j_max-1)}(z)|

 private:
  HoloMap map_;
  unsigned period_;
  unsigned j_max_;
  std::optional<CMatrix> power_;  // cached A^{k j_max} for matrix maps
};

// Projection onto L_U along L_N; the limit of A^{kj} when A is power bounded.
CMatrix linear_retraction(const CMatrix& a, double tol = 1e-8);

// Requires phi(0) = 0. Throws NotConverging when step_residual > tol.
RetractionEstimate estimate_retraction(const HoloMap& map, unsigned k, unsigned j_max,
                                       const GridSpec& grid, double tol = 1e-6);

struct DenjoyWolffEstimate {
  BoundaryPoint point;
  double residual = 0.0;  // max(1 - |w_j|, |w_j - w_{j-1}|) at the stopping index
  unsigned iterations = 0;
  ConvergenceTrace step_trace{"dw_step"};  // beta(phi_j(0), phi_{j+1}(0))
};

DenjoyWolffEstimate denjoy_wolff(const HoloMap& map, double tol = 1e-8, unsigned j_max = 100000);

struct DilationResult {
  double min_ratio = 0.0;
  CVector arg_min;
  std::size_t region_size = 0;
  bool exceeds_one = false;  // min_ratio > 1 + margin
};

// Minimum of (1 - |phi(z)|) / (1 - |z|) over grid points with |z - rho(z)| >= eta.
DilationResult boundary_dilation_ratio(const HoloMap& map, const RetractionEstimate& retraction,
                                       double eta, const GridSpec& grid, double margin = 1e-6);

struct InteriorFixed {
  CVector point;
  SpectralReport report;
};

struct NoInteriorFixed {
  DenjoyWolffEstimate dw;
};

using FixedBehavior = std::variant<InteriorFixed, NoInteriorFixed>;

FixedBehavior fixed_behavior(const HoloMap& map, double tol = 1e-8, unsigned budget = 10000);

}  // namespace ballerg
