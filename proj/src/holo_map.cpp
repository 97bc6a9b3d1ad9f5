#include "ballerg/holo_map.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace ballerg {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_unitary(const CMatrix& u) {
  if (max_abs_diff(u.adjoint() * u, CMatrix::identity(u.dim())) > 1e-10) {
    throw Error(ErrorCode::InvalidArgument, "matrix is not unitary within 1e-10");
  }
}

Complex eval_term(const MonomialTerm& term, std::span<const Complex> z) {
  Complex acc = term.coef;
  for (std::size_t k = 0; k < term.powers.size(); ++k) {
    for (unsigned p = 0; p < term.powers[k]; ++p) acc *= z[k];
  }
  return acc;
}

CVector eval_monomial(const MonomialMap& m, std::span<const Complex> z) {
  CVector out(m.dim, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < m.dim; ++i)
    for (const auto& term : m.components[i]) out[i] += eval_term(term, z);
  return out;
}

void require_dim(const HoloMap& map, std::span<const Complex> z) {
  if (z.size() != map.dim()) {
    throw Error(ErrorCode::InvalidArgument, "point dimension " + std::to_string(z.size()) +
                                                " does not match map dimension " +
                                                std::to_string(map.dim()));
  }
}

CMatrix monomial_jacobian(const MonomialMap& m, std::span<const Complex> z) {
  const double gap = 1.0 - norm(z);
  if (gap < 1e-10) throw Error(ErrorCode::StepUnderflow, "point too close to the boundary");
  const double h = 1e-5 * gap;
  const std::size_t n = m.dim;
  CMatrix jac(n);
  for (std::size_t k = 0; k < n; ++k) {
    // Holomorphic: d/dz_k = 1/2 (d/dx_k - i d/dy_k).
    CVector xp(z.begin(), z.end()), xm = xp, yp = xp, ym = xp;
    xp[k] += h;
    xm[k] -= h;
    yp[k] += Complex(0.0, h);
    ym[k] -= Complex(0.0, h);
    const CVector fxp = eval_monomial(m, xp), fxm = eval_monomial(m, xm);
    const CVector fyp = eval_monomial(m, yp), fym = eval_monomial(m, ym);
    for (std::size_t i = 0; i < n; ++i) {
      const Complex dx = (fxp[i] - fxm[i]) / (2.0 * h);
      const Complex dy = (fyp[i] - fym[i]) / (2.0 * h);
      jac(i, k) = 0.5 * (dx - Complex(0.0, 1.0) * dy);
    }
  }
  return jac;
}

}  // namespace

// ---- construction ----------------------------------------------------------

HoloMap HoloMap::linear(CMatrix a) { return HoloMap(LinearMap{std::move(a)}); }

HoloMap HoloMap::unitary(CMatrix u) {
  require_unitary(u);
  return HoloMap(UnitaryMap{std::move(u)});
}

HoloMap HoloMap::involution(CVector a) {
  require_interior(a, "involution center");
  return HoloMap(InvolutionMap{std::move(a)});
}

HoloMap HoloMap::mobius(CMatrix u, CVector a) {
  require_unitary(u);
  require_interior(a, "Mobius center");
  if (u.dim() != a.size()) throw Error(ErrorCode::InvalidArgument, "Mobius dimension mismatch");
  return HoloMap(MobiusMap{std::move(u), std::move(a)});
}

HoloMap HoloMap::monomial(std::size_t dim, std::vector<std::vector<MonomialTerm>> components) {
  if (dim == 0 || components.size() != dim) {
    throw Error(ErrorCode::InvalidArgument, "monomial map needs one component per coordinate");
  }
  for (const auto& comp : components)
    for (const auto& term : comp) {
      if (term.powers.size() != dim) {
        throw Error(ErrorCode::InvalidArgument, "monomial exponent list has wrong length");
      }
      if (!std::isfinite(term.coef.real()) || !std::isfinite(term.coef.imag())) {
        throw Error(ErrorCode::InvalidArgument, "monomial coefficient must be finite");
      }
    }
  return HoloMap(MonomialMap{dim, std::move(components)});
}

HoloMap HoloMap::composite(std::vector<HoloMap> factors) {
  if (factors.empty()) throw Error(ErrorCode::InvalidArgument, "composite needs a factor");
  const std::size_t n = factors.front().dim();
  for (const auto& f : factors)
    if (f.dim() != n) throw Error(ErrorCode::InvalidArgument, "composite factor dimensions differ");
  return HoloMap(CompositeMap{std::move(factors)});
}

std::size_t HoloMap::dim() const {
  return std::visit(overloaded{
                        [](const LinearMap& m) { return m.matrix.dim(); },
                        [](const UnitaryMap& m) { return m.matrix.dim(); },
                        [](const InvolutionMap& m) { return m.center.size(); },
                        [](const MobiusMap& m) { return m.center.size(); },
                        [](const MonomialMap& m) { return m.dim; },
                        [](const CompositeMap& m) { return m.factors.front().dim(); },
                    },
                    v_);
}

std::string HoloMap::kind() const {
  static const char* names[] = {"linear", "unitary", "involution", "mobius", "monomial", "composite"};
  return names[v_.index()];
}

bool HoloMap::is_automorphism() const {
  return std::visit(overloaded{
                        [](const LinearMap&) { return false; },
                        [](const UnitaryMap&) { return true; },
                        [](const InvolutionMap&) { return true; },
                        [](const MobiusMap&) { return true; },
                        [](const MonomialMap&) { return false; },
                        [](const CompositeMap& m) {
                          return std::all_of(m.factors.begin(), m.factors.end(),
                                             [](const HoloMap& f) { return f.is_automorphism(); });
                        },
                    },
                    v_);
}

std::optional<CMatrix> HoloMap::as_matrix() const {
  return std::visit(overloaded{
                        [](const LinearMap& m) -> std::optional<CMatrix> { return m.matrix; },
                        [](const UnitaryMap& m) -> std::optional<CMatrix> { return m.matrix; },
                        [](const CompositeMap& m) -> std::optional<CMatrix> {
                          CMatrix acc = CMatrix::identity(m.factors.front().dim());
                          for (const auto& f : m.factors) {
                            auto fm = f.as_matrix();
                            if (!fm) return std::nullopt;
                            acc = acc * *fm;
                          }
                          return acc;
                        },
                        [](const auto&) -> std::optional<CMatrix> { return std::nullopt; },
                    },
                    v_);
}

// ---- evaluation ------------------------------------------------------------

CVector evaluate_raw(const HoloMap& map, std::span<const Complex> z) {
  return std::visit(overloaded{
                        [&](const LinearMap& m) { return m.matrix.apply(z); },
                        [&](const UnitaryMap& m) { return m.matrix.apply(z); },
                        [&](const InvolutionMap& m) { return Involution(m.center).apply(z); },
                        [&](const MobiusMap& m) {
                          return m.unitary.apply(Involution(m.center).apply(z));
                        },
                        [&](const MonomialMap& m) { return eval_monomial(m, z); },
                        [&](const CompositeMap& m) {
                          CVector w(z.begin(), z.end());
                          for (auto it = m.factors.rbegin(); it != m.factors.rend(); ++it)
                            w = evaluate_raw(*it, w);
                          return w;
                        },
                    },
                    map.variant());
}

CVector evaluate(const HoloMap& map, std::span<const Complex> z) {
  require_dim(map, z);
  require_interior(z, "evaluation point");
  CVector w = evaluate_raw(map, z);
  if (norm2(w) >= 1.0) {
    std::ostringstream msg;
    msg << map.kind() << " map sends a point of norm " << norm(z) << " to norm " << norm(w);
    throw Error(ErrorCode::NotSelfMap, msg.str());
  }
  return w;
}

CMatrix derivative_at(const HoloMap& map, std::span<const Complex> z) {
  require_dim(map, z);
  require_interior(z, "derivative point");
  return std::visit(overloaded{
                        [&](const LinearMap& m) { return m.matrix; },
                        [&](const UnitaryMap& m) { return m.matrix; },
                        [&](const InvolutionMap& m) { return Involution(m.center).derivative(z); },
                        [&](const MobiusMap& m) {
                          return m.unitary * Involution(m.center).derivative(z);
                        },
                        [&](const MonomialMap& m) { return monomial_jacobian(m, z); },
                        [&](const CompositeMap& m) {
                          CMatrix acc = CMatrix::identity(z.size());
                          CVector w(z.begin(), z.end());
                          for (auto it = m.factors.rbegin(); it != m.factors.rend(); ++it) {
                            acc = derivative_at(*it, w) * acc;
                            w = evaluate_raw(*it, w);
                          }
                          return acc;
                        },
                    },
                    map.variant());
}

CVector iterate(const HoloMap& map, unsigned j, std::span<const Complex> z) {
  if (j == 0) throw Error(ErrorCode::InvalidArgument, "iterate index must be positive");
  require_dim(map, z);
  require_interior(z, "iterate start");
  if (auto m = map.as_matrix()) return matrix_power(*m, j).apply(z);
  CVector w(z.begin(), z.end());
  for (unsigned i = 0; i < j; ++i) w = evaluate(map, w);
  return w;
}

Orbit::Orbit(const HoloMap& map, CVector start) : map_(map) {
  require_dim(map, start);
  points_.push_back(std::move(start));
}

const CVector& Orbit::at(std::size_t j) {
  while (points_.size() <= j) points_.push_back(evaluate_raw(map_, points_.back()));
  return points_[j];
}

// ---- grids -----------------------------------------------------------------

GridSpec GridSpec::geometric(unsigned levels, unsigned directions, std::uint64_t seed) {
  GridSpec g;
  g.directions_per_radius = directions;
  g.seed = seed;
  for (unsigned m = 1; m <= levels; ++m) g.radii.push_back(1.0 - std::ldexp(1.0, -static_cast<int>(m)));
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (radii.empty()) throw Error(ErrorCode::InvalidArgument, "grid needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0 && radii[i] < 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "grid radii must lie in (0, 1)");
    }
    if (i > 0 && radii[i] <= radii[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "grid radii must be increasing");
    }
  }
}

std::vector<std::vector<CVector>> grid_rungs(const GridSpec& grid, std::size_t dim) {
  grid.validate();
  std::vector<CVector> directions;
  for (std::size_t k = 0; k < dim; ++k) directions.push_back(unit_vector(dim, k));
  std::mt19937_64 rng(grid.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (unsigned d = 0; d < grid.directions_per_radius; ++d) {
    CVector v(dim);
    for (auto& c : v) c = Complex(gauss(rng), gauss(rng));
    directions.push_back(scaled(1.0 / norm(v), v));
  }
  std::vector<std::vector<CVector>> rungs;
  for (double r : grid.radii) {
    std::vector<CVector> rung;
    for (const auto& d : directions) rung.push_back(scaled(r, d));
    rungs.push_back(std::move(rung));
  }
  return rungs;
}

std::vector<CVector> grid_points(const GridSpec& grid, std::size_t dim) {
  std::vector<CVector> pts;
  for (auto& rung : grid_rungs(grid, dim))
    for (auto& p : rung) pts.push_back(std::move(p));
  return pts;
}

SupProfile sup_profile(const HoloMap& map, std::span<const Complex> a, unsigned j_max,
                       const GridSpec& grid) {
  if (j_max == 0) throw Error(ErrorCode::InvalidArgument, "j_max must be positive");
  const auto rungs = grid_rungs(grid, map.dim());
  SupProfile profile;
  profile.radii = grid.radii;
  profile.by_rung.assign(j_max, std::vector<double>(rungs.size(), 0.0));
  const auto linear = map.as_matrix();
  for (std::size_t m = 0; m < rungs.size(); ++m) {
    for (const auto& z : rungs[m]) {
      CVector w = z;
      for (unsigned j = 1; j <= j_max; ++j) {
        w = linear ? linear->apply(w) : evaluate_raw(map, w);
        double& slot = profile.by_rung[j - 1][m];
        slot = std::max(slot, norm(sub(w, a)));
      }
    }
  }
  for (auto& row : profile.by_rung)
    for (std::size_t m = 1; m < row.size(); ++m) row[m] = std::max(row[m], row[m - 1]);
  return profile;
}

bool SupProfile::approaching_boundary(unsigned j, double ratio) const {
  const auto& row = by_rung.at(j - 1);
  if (row.size() < 2) return row.back() >= 1.0;
  const double last = 1.0 - row[row.size() - 1];
  const double prev = 1.0 - row[row.size() - 2];
  if (last <= 0.0) return true;
  if (prev <= 0.0) return false;
  return last <= ratio * prev;
}

double sup_norm_deviation(const HoloMap& map, std::span<const Complex> a, unsigned j,
                          const GridSpec& grid) {
  require_dim(map, a);
  return sup_profile(map, a, j, grid).sup(j);
}

// ---- validation / conjugation ----------------------------------------------

SelfMapCheck validate_self_map(const HoloMap& map, const GridSpec& grid) {
  SelfMapCheck check;
  if (auto m = map.as_matrix()) {
    check.exact = true;
    check.max_norm = singular_values(*m).front();
    check.valid = check.max_norm <= 1.0 + 1e-12;
    return check;
  }
  for (const auto& z : grid_points(grid, map.dim())) {
    const CVector w = evaluate_raw(map, z);
    double r = norm(w);
    if (!std::isfinite(r)) r = HUGE_VAL;
    if (check.worst_point.empty() || r > check.max_norm) {
      check.max_norm = r;
      check.worst_point = z;
    }
  }
  check.valid = check.max_norm < 1.0;
  return check;
}

void require_self_map(const HoloMap& map, const GridSpec& grid) {
  const SelfMapCheck check = validate_self_map(map, grid);
  if (check.valid) return;
  std::ostringstream msg;
  msg << map.kind() << " map is not a self-map of the ball: |phi(z)| = " << check.max_norm;
  if (!check.worst_point.empty()) {
    msg << " at z = (";
    for (std::size_t i = 0; i < check.worst_point.size(); ++i) {
      msg << (i ? ", " : "") << check.worst_point[i].real();
      if (check.worst_point[i].imag() != 0.0) msg << (check.worst_point[i].imag() > 0 ? "+" : "") << check.worst_point[i].imag() << "i";
    }
    msg << ")";
  }
  throw Error(ErrorCode::NotSelfMap, msg.str());
}

HoloMap conjugate_to_origin(const HoloMap& map, std::span<const Complex> a) {
  require_dim(map, a);
  const CVector image = evaluate(map, a);
  if (norm(sub(image, a)) > 1e-8) {
    throw Error(ErrorCode::NotFixedPoint, "|phi(a) - a| = " + std::to_string(norm(sub(image, a))));
  }
  if (norm(a) == 0.0) return map;
  CVector center(a.begin(), a.end());
  return HoloMap::composite({HoloMap::involution(center), map, HoloMap::involution(center)});
}

}  // namespace ballerg
