#include "ballerg/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ballerg/ergodicity.hpp"

namespace ballerg {

namespace {

// Iterates closer than this (pseudo-hyperbolically) are the same node.
constexpr double kSameNode = 1e-6;

}  // namespace

void NodeSequence::validate() const {
  if (points.empty()) throw Error(ErrorCode::InvalidArgument, "node sequence is empty");
  const std::size_t n = points.front().size();
  for (const auto& p : points) {
    if (p.size() != n) throw Error(ErrorCode::InvalidArgument, "nodes have mixed dimensions");
    require_interior(p, "node");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (norm(sub(points[i], points[j])) <= 1e-12) {
        throw Error(ErrorCode::DegenerateNodes,
                    "nodes " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
      }
}

RatioCheck ratio_condition(const NodeSequence& seq, double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "a must be in (0, 1)");
  if (seq.points.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nodes");
  RatioCheck out;
  for (std::size_t j = 0; j + 1 < seq.points.size(); ++j) {
    const double ratio = (1.0 - norm(seq.points[j + 1])) / (1.0 - norm(seq.points[j]));
    out.max_ratio = std::max(out.max_ratio, ratio);
    // Relative slack so that a ratio equal to a up to rounding counts as a violation.
    if (out.holds && ratio >= a * (1.0 - 1e-12)) {
      out.holds = false;
      out.first_violation = j + 1;
    }
  }
  return out;
}

SeparationProducts separation_products(const NodeSequence& seq, std::size_t truncation) {
  const std::size_t m =
      (truncation == 0 || truncation > seq.points.size()) ? seq.points.size() : truncation;
  SeparationProducts out;
  out.products.assign(m, 1.0);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) continue;
      const double d = pseudo_hyperbolic(seq.points[k], seq.points[j]);
      if (d <= 1e-15) {
        throw Error(ErrorCode::DegenerateNodes,
                    "nodes " + std::to_string(k) + " and " + std::to_string(j) + " coincide");
      }
      out.products[k] *= d;
    }
  out.delta_min = m ? *std::min_element(out.products.begin(), out.products.end()) : 1.0;
  return out;
}

// ---- interpolants --------------------------------------------------------------------

InterpolantFamily::InterpolantFamily(NodeSequence seq) : nodes_(std::move(seq.points)) {
  const std::size_t m = nodes_.size();
  for (const auto& x : nodes_) involutions_.emplace_back(x);
  directions_.assign(m, std::vector<CVector>(m));
  scale_.assign(m, std::vector<double>(m, 1.0));
  delta_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < m; ++l) {
    double product = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == l) continue;
      const CVector w = involutions_[j].apply(nodes_[l]);
      const double len = norm(w);
      if (len <= 1e-15) {
        throw Error(ErrorCode::DegenerateNodes,
                    "nodes " + std::to_string(l) + " and " + std::to_string(j) + " coincide");
      }
      directions_[l][j] = scaled(1.0 / len, w);
      scale_[l][j] = len;
      product *= len;
    }
    delta_min_ = std::min(delta_min_, product);
  }
  if (m == 0) delta_min_ = 1.0;
}

std::vector<Complex> InterpolantFamily::eval_all(std::span<const Complex> z) const {
  const std::size_t m = nodes_.size();
  std::vector<CVector> images(m);
  for (std::size_t j = 0; j < m; ++j) images[j] = involutions_[j].apply(z);
  std::vector<Complex> out(m, Complex{1.0, 0.0});
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t j = 0; j < m; ++j)
      if (j != l) out[l] *= inner(images[j], directions_[l][j]) / scale_[l][j];
  return out;
}

Complex InterpolantFamily::eval(std::size_t l, std::span<const Complex> z) const {
  if (l >= nodes_.size()) throw Error(ErrorCode::OutOfRange, "interpolant index out of range");
  Complex acc{1.0, 0.0};
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    if (j != l) acc *= inner(involutions_[j].apply(z), directions_[l][j]) / scale_[l][j];
  return acc;
}

namespace {

std::vector<CVector> probe_points(const GridSpec& grid, const std::vector<CVector>& nodes,
                                  std::size_t dim) {
  auto pts = grid_points(grid, dim);
  pts.insert(pts.end(), nodes.begin(), nodes.end());
  return pts;
}

}  // namespace

double InterpolantFamily::measured_sum(const GridSpec& grid) const {
  if (nodes_.empty()) return 0.0;
  double best = 0.0;
  for (const auto& z : probe_points(grid, nodes_, nodes_.front().size())) {
    double s = 0.0;
    for (const Complex& v : eval_all(z)) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

double InterpolantFamily::measured_sup(std::size_t l, const GridSpec& grid) const {
  double best = 0.0;
  for (const auto& z : probe_points(grid, nodes_, nodes_.front().size()))
    best = std::max(best, std::abs(eval(l, z)));
  return best;
}

InterpolantFamily build_interpolants(const NodeSequence& seq) {
  seq.validate();
  InterpolantFamily family(seq);
  if (family.delta_min() < 1e-6) {
    throw Error(ErrorCode::SeparationTooSmall,
                "separation product " + std::to_string(family.delta_min()) + " below 1e-6");
  }
  return family;
}

// ---- triangular array -----------------------------------------------------------------

TriangularArray build_triangular_array(const HoloMap& map, double epsilon, unsigned rows,
                                       const GridSpec& grid) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be in (0, 1)");
  if (rows == 0) throw Error(ErrorCode::InvalidArgument, "rows must be positive");
  grid.validate();
  const std::size_t n = map.dim();
  if (norm(evaluate(map, CVector(n, Complex{0.0, 0.0}))) > 1e-8) {
    throw Error(ErrorCode::NotFixedPoint, "triangular arrays need phi(0) = 0");
  }
  if (auto cert = quasi_compact_certificate(map, rows, grid)) {
    throw Error(ErrorCode::MapContracts, "grid sup of |phi_" + std::to_string(cert->n0) +
                                             "| is " + std::to_string(cert->sup_estimate));
  }

  const auto rungs = grid_rungs(grid, n);
  std::vector<CVector> directions;
  for (const auto& z : rungs.back()) directions.push_back(scaled(1.0 / norm(z), z));
  const double r_max = grid.radii.back();

  TriangularArray out;
  out.epsilon = epsilon;
  for (unsigned j = 1; j <= rows; ++j) {
    const CVector* best = nullptr;
    double best_mod = -1.0;
    for (const auto& u : directions) {
      const double mod = norm(iterate(map, j, scaled(r_max, u)));
      if (mod > best_mod) {
        best_mod = mod;
        best = &u;
      }
    }
    if (best_mod < epsilon) {
      throw Error(ErrorCode::SearchExhausted,
                  "row " + std::to_string(j) + ": grid sup " + std::to_string(best_mod) +
                      " is below epsilon");
    }
    // Invariant: |phi_j(hi u)| >= epsilon > |phi_j(lo u)|.
    double lo = 0.0, hi = r_max;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (norm(iterate(map, j, scaled(mid, *best))) >= epsilon ? hi : lo) = mid;
    }
    out.anchors.push_back(scaled(hi, *best));
    std::vector<CVector> row;
    CVector w = out.anchors.back();
    for (unsigned l = 1; l <= j; ++l) {
      w = evaluate_raw(map, w);
      row.push_back(w);
    }
    out.rows.push_back(std::move(row));
  }

  out.schwarz_chain = true;
  for (const auto& row : out.rows) {
    const double last = norm(row.back());
    if (last < epsilon) out.schwarz_chain = false;
    for (const auto& x : row)
      if (norm(x) < last * (1.0 - 1e-12)) out.schwarz_chain = false;
  }

  std::vector<CVector> distinct;
  for (const auto& row : out.rows)
    for (const auto& x : row) {
      const bool seen = std::any_of(distinct.begin(), distinct.end(), [&](const CVector& y) {
        return pseudo_hyperbolic(x, y) < kSameNode;
      });
      if (!seen) distinct.push_back(x);
    }
  std::sort(distinct.begin(), distinct.end(),
            [](const CVector& a, const CVector& b) { return norm(a) < norm(b); });
  out.nodes.points = std::move(distinct);
  out.nodes.provenance = "generated-by-map";

  if (out.nodes.points.size() >= 2) {
    double worst = 0.0;
    for (std::size_t j = 0; j + 1 < out.nodes.points.size(); ++j)
      worst = std::max(worst, (1.0 - norm(out.nodes.points[j + 1])) /
                                  (1.0 - norm(out.nodes.points[j])));
    if (!(worst < 1.0)) {
      throw Error(ErrorCode::SearchExhausted, "array nodes do not satisfy a ratio condition");
    }
    out.ratio_a = worst + 1e-3 * (1.0 - worst);
  }

  double min_dilation = std::numeric_limits<double>::infinity();
  for (const auto& z : grid_points(grid, n)) {
    if (norm(z) < epsilon) continue;
    min_dilation = std::min(min_dilation, (1.0 - norm(evaluate_raw(map, z))) / (1.0 - norm(z)));
  }
  out.dilation_a = std::isfinite(min_dilation) ? 1.0 / min_dilation : 0.0;
  return out;
}

// ---- witness -------------------------------------------------------------------------------

WitnessFunction::WitnessFunction(const HoloMap& map, const TriangularArray& array)
    : map_(map), anchors_(array.anchors), family_(build_interpolants(array.nodes)) {}

Complex WitnessFunction::eval(std::span<const Complex> z) const {
  const auto values = family_.eval_all(z);
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < values.size(); ++i) acc += inner(z, family_.nodes()[i]) * values[i];
  return acc;
}

double WitnessFunction::sup_grid(const GridSpec& grid) const {
  double best = 0.0;
  for (const auto& z : probe_points(grid, family_.nodes(), map_.dim()))
    best = std::max(best, std::abs(eval(z)));
  return best;
}

Complex WitnessFunction::row_cesaro(unsigned j) const {
  if (j == 0 || j > anchors_.size()) throw Error(ErrorCode::OutOfRange, "row index out of range");
  CVector w = anchors_[j - 1];
  Complex acc{0.0, 0.0};
  for (unsigned l = 1; l <= j; ++l) {
    w = evaluate_raw(map_, w);
    acc += eval(w);
  }
  return acc / static_cast<double>(j);
}

WitnessFunction witness_function(const HoloMap& map, const TriangularArray& array) {
  return WitnessFunction(map, array);
}

// ---- CSV -------------------------------------------------------------------------------------

void write_nodes_csv(std::ostream& os, const NodeSequence& seq) {
  os << std::setprecision(17);
  for (const auto& p : seq.points) {
    for (std::size_t i = 0; i < p.size(); ++i)
      os << (i ? "," : "") << p[i].real() << "," << p[i].imag();
    os << "\n";
  }
}

NodeSequence read_nodes_csv(std::istream& is) {
  NodeSequence seq;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorCode::ParseError,
                    "line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (values.empty() || values.size() % 2 != 0) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": expected re,im pairs");
    }
    CVector p;
    for (std::size_t i = 0; i < values.size(); i += 2) p.emplace_back(values[i], values[i + 1]);
    seq.points.push_back(std::move(p));
  }
  seq.validate();
  return seq;
}

}  // namespace ballerg
