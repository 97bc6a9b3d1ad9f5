#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballerg/dynamics.hpp"
#include "ballerg/holo_map.hpp"
#include "ballerg/trace.hpp"

namespace ballerg {

// ---- test functions ------------------------------------------------------------

struct TestFunction {
  std::string name;
  std::function<Complex(std::span<const Complex>)> eval;
  double sup_bound = 1.0;  // an upper bound for sup over the ball of |f|
};

class FunctionDictionary {
 public:
  FunctionDictionary() = default;
  explicit FunctionDictionary(std::vector<TestFunction> entries);

  // 1, z_k, z_k^2, z_k z_m (k < m), and <z, u> for two fixed unit vectors u.
  static FunctionDictionary standard(std::size_t dim);

  void add(TestFunction f);
  const std::vector<TestFunction>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<TestFunction> entries_;
};

TestFunction constant_function(Complex c);
TestFunction coordinate_functional(CVector u);  // z -> <z, u>, bound |u|
TestFunction monomial_function(std::vector<unsigned> powers);
// Product of <phi_{b_i}(z), u_i> over the given centers, bound 1 for unit u_i.
TestFunction involutive_product(std::vector<CVector> centers, std::vector<CVector> directions);
// g(z)^m with g(z) = <(z0 + z)/2, z0>; z0 on the sphere.
TestFunction witness_power(const BoundaryPoint& z0, double m);

// ---- limit operators ---------------------------------------------------------------

class LimitOperator {
 public:
  enum class Kind { Identity, PointEvaluation, AveragedProjection };

  static LimitOperator identity();
  // f -> f(a), as a constant function.
  static LimitOperator point_evaluation(CVector a);
  // f -> (1/k) sum_{i<k} f(rho(phi_i(z))).
  static LimitOperator averaged_projection(HoloMap map, unsigned k,
                                           std::function<CVector(std::span<const Complex>)> rho);

  Kind kind() const { return kind_; }
  unsigned period() const { return k_; }
  Complex apply(const TestFunction& f, std::span<const Complex> z) const;
  std::string describe() const;

 private:
  LimitOperator(Kind kind) : kind_(kind) {}
  Kind kind_;
  CVector a_;
  std::optional<HoloMap> map_;
  unsigned k_ = 1;
  std::function<CVector(std::span<const Complex>)> rho_;
};

// ---- Cesaro means --------------------------------------------------------------------

// (1/j) sum_{i=1}^j f(phi_i(z)) for every grid point.
std::vector<Complex> cesaro_apply(const HoloMap& map, const TestFunction& f, unsigned j,
                                  const GridSpec& grid);

// max over f of sup_grid |M_j f - P f| / bound(f); a lower bound for ||M_j - P||.
double cesaro_gap(const HoloMap& map, const LimitOperator& limit, const FunctionDictionary& dict,
                  unsigned j, const GridSpec& grid);

// The same quantity for j = 1..j_max in one pass over the orbits.
ConvergenceTrace cesaro_gap_trace(const HoloMap& map, const LimitOperator& limit,
                                  const FunctionDictionary& dict, unsigned j_max,
                                  const GridSpec& grid);

// ---- quasi-compactness -----------------------------------------------------------------

struct QuasiCompactCertificate {
  unsigned n0 = 0;
  double sup_estimate = 0.0;
};

// Smallest j0 <= j_max whose grid sup |phi_j0| is below 1 - margin and is not
// still climbing as the rungs refine. Only indices j <= levels - 2 are
// trusted: beyond that the finest rung cannot separate r^{2^j} from 0.
std::optional<QuasiCompactCertificate> quasi_compact_certificate(const HoloMap& map,
                                                                 unsigned j_max,
                                                                 const GridSpec& grid,
                                                                 double margin = 0.05);

// ---- classifier -------------------------------------------------------------------------

enum class Verdict {
  UniformlyMeanErgodic,
  NotMeanErgodic,
  NotUniformlyMeanErgodic_MeanUnknown,
  NumericalEvidenceUME,
  Inconclusive,
};

const char* to_string(Verdict v);

namespace branch {
inline constexpr const char* kNoInteriorFixedPoint = "no-interior-fixed-point";
inline constexpr const char* kNonRootEigenvalue = "non-root-unimodular-eigenvalue";
inline constexpr const char* kAutomorphism = "automorphism-roots-of-unity";
inline constexpr const char* kLinear = "linear-spectral-rule";
inline constexpr const char* kInteriorSpectrum = "interior-spectrum-sup-norm";
inline constexpr const char* kRetractionTrace = "retraction-bergman-trace";
inline constexpr const char* kFixedPointSearch = "fixed-point-search";
}  // namespace branch

struct ErgodicVerdict {
  Verdict verdict = Verdict::Inconclusive;
  std::string branch;
  std::string limit_description = "none";
  std::string violated_condition;  // set for NotMeanErgodic
  std::string note;
  unsigned k = 0;
  std::optional<CVector> fixed_point;
  std::vector<Complex> spectrum;
  std::optional<QuasiCompactCertificate> certificate;
  std::optional<DenjoyWolffEstimate> dw;
  std::vector<ConvergenceTrace> traces;

  const ConvergenceTrace* trace(const std::string& name) const;
};

struct ClassifyOptions {
  double tol = 1e-3;              // "tends to 0" threshold for traces
  double spectral_tol = 1e-8;     // modulus / root-of-unity tolerance
  double fixed_point_tol = 1e-8;
  unsigned fixed_point_budget = 10000;
  unsigned j_max = 64;
  double epsilon = 0.5;           // "stays >= epsilon" threshold
  GridSpec grid = GridSpec::geometric();
  unsigned witness_count = 10;
};

ErgodicVerdict classify_mean_ergodic(const HoloMap& map, const ClassifyOptions& options = {});
ErgodicVerdict classify_mean_ergodic(const HoloMap& map, double tol, const GridSpec& grid,
                                     unsigned j_max);

// Functions g_j = g^{k_j} built from the Denjoy-Wolff point z0. Row j of the
// returned traces: witness_gap = |g_j(z0) - (1/j) sum_{l<=j} g_j(phi_l(0))|
// (||g_j|| = 1, so this bounds ||M_j - K_z0|| from below), and witness_k = k_j.
std::vector<ConvergenceTrace> witness_traces(const HoloMap& map, const BoundaryPoint& z0,
                                             unsigned count, const GridSpec& grid);

}  // namespace ballerg
