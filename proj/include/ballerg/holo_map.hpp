#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ballerg/geometry.hpp"
#include "ballerg/linalg.hpp"

namespace ballerg {

class HoloMap;

struct LinearMap {
  CMatrix matrix;
};

struct UnitaryMap {
  CMatrix matrix;
};

struct InvolutionMap {
  CVector center;
};

// U o phi_a
struct MobiusMap {
  CMatrix unitary;
  CVector center;
};

struct MonomialTerm {
  Complex coef;
  std::vector<unsigned> powers;  // one exponent per input coordinate
};

// Output coordinate i is the sum of components[i]; an empty sum is zero.
struct MonomialMap {
  std::size_t dim = 0;
  std::vector<std::vector<MonomialTerm>> components;
};

// factors.front() is applied last: evaluate(f, g) = f(g(z)).
struct CompositeMap {
  std::vector<HoloMap> factors;
};

class HoloMap {
 public:
  using Variant =
      std::variant<LinearMap, UnitaryMap, InvolutionMap, MobiusMap, MonomialMap, CompositeMap>;

  static HoloMap linear(CMatrix a);
  static HoloMap unitary(CMatrix u);
  static HoloMap involution(CVector a);
  static HoloMap mobius(CMatrix u, CVector a);
  static HoloMap monomial(std::size_t dim, std::vector<std::vector<MonomialTerm>> components);
  static HoloMap composite(std::vector<HoloMap> factors);

  const Variant& variant() const { return v_; }
  std::size_t dim() const;
  std::string kind() const;

  // Unitary, involution, Mobius, and composites built only from those.
  bool is_automorphism() const;
  // The matrix of a linear/unitary map or of a composite of such maps.
  std::optional<CMatrix> as_matrix() const;

 private:
  explicit HoloMap(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Evaluation without domain checks. Only for maps already validated.
CVector evaluate_raw(const HoloMap& map, std::span<const Complex> z);

// Throws NotSelfMap when the image leaves the ball.
CVector evaluate(const HoloMap& map, std::span<const Complex> z);

// Exact for linear, unitary, involution and Mobius factors; chain rule for
// composites; central differences with step 1e-5 (1 - |z|) for monomials.
CMatrix derivative_at(const HoloMap& map, std::span<const Complex> z);

CVector iterate(const HoloMap& map, unsigned j, std::span<const Complex> z);

// Lazily extended orbit z, phi(z), phi_2(z), ... of one starting point.
// Holds mutable cache state; use one instance per worker.
class Orbit {
 public:
  Orbit(const HoloMap& map, CVector start);
  const CVector& at(std::size_t j);
  std::size_t computed() const { return points_.size() - 1; }

 private:
  HoloMap map_;
  std::vector<CVector> points_;
};

// ---- grids -------------------------------------------------------------------

struct GridSpec {
  std::vector<double> radii;             // increasing, in (0, 1)
  unsigned directions_per_radius = 8;   // random directions added to the n axes
  std::uint64_t seed = 1;

  // radii 1 - 2^-m, m = 1..levels
  static GridSpec geometric(unsigned levels = 40, unsigned directions = 8, std::uint64_t seed = 1);
  void validate() const;
};

// Sample points grouped by radius rung. Every rung uses the same directions:
// the n coordinate axes followed by seeded random unit vectors.
std::vector<std::vector<CVector>> grid_rungs(const GridSpec& grid, std::size_t dim);
std::vector<CVector> grid_points(const GridSpec& grid, std::size_t dim);

// Grid sup of |phi_j(z) - a|, a lower bound for the true sup-norm.
double sup_norm_deviation(const HoloMap& map, std::span<const Complex> a, unsigned j,
                          const GridSpec& grid);

// by_rung[j-1][m] = max of |phi_j(z) - a| over rungs 0..m.
struct SupProfile {
  std::vector<double> radii;
  std::vector<std::vector<double>> by_rung;

  double sup(unsigned j) const { return by_rung.at(j - 1).back(); }
  // Whether the estimate at iterate j is still climbing to 1 as the rungs
  // refine: the deficit 1 - sup shrinks by at least `ratio` over the last rung.
  bool approaching_boundary(unsigned j, double ratio = 0.75) const;
};

SupProfile sup_profile(const HoloMap& map, std::span<const Complex> a, unsigned j_max,
                       const GridSpec& grid);

// ---- validation / conjugation --------------------------------------------------

struct SelfMapCheck {
  bool valid = false;
  bool exact = false;      // decided from the top singular value, not sampled
  double max_norm = 0.0;   // delta_1, or the largest sampled |phi(z)|
  CVector worst_point;     // sample attaining max_norm (empty when exact)
};

SelfMapCheck validate_self_map(const HoloMap& map, const GridSpec& grid);
// Throws NotSelfMap with the violating sample when validation fails.
void require_self_map(const HoloMap& map, const GridSpec& grid);

// phi_a o map o phi_a; returns the map unchanged when a = 0.
HoloMap conjugate_to_origin(const HoloMap& map, std::span<const Complex> a);

}  // namespace ballerg
