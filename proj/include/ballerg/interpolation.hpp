#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ballerg/holo_map.hpp"

namespace ballerg {

struct NodeSequence {
  std::vector<CVector> points;
  std::string provenance = "user";

  // Interior, common dimension, pairwise distinct within 1e-12.
  void validate() const;
};

struct RatioCheck {
  bool holds = true;
  // j (1-based) of the first pair with (1 - |x_{j+1}|) / (1 - |x_j|) >= a.
  std::optional<std::size_t> first_violation;
  double max_ratio = 0.0;
};

RatioCheck ratio_condition(const NodeSequence& seq, double a);

struct SeparationProducts {
  std::vector<double> products;  // prod_{j != k} |phi_{x_k}(x_j)|, j < truncation
  double delta_min = 0.0;
};

// Uses the first `truncation` nodes (all when truncation is 0 or too large).
SeparationProducts separation_products(const NodeSequence& seq, std::size_t truncation = 0);

// f_l(z) = prod_{j != l} <phi_{x_j}(z), v_{jl}> / |phi_{x_j}(x_l)| with
// v_{jl} = phi_{x_j}(x_l) / |phi_{x_j}(x_l)|, so f_l(x_l) = 1 and f_l(x_j) = 0.
class InterpolantFamily {
 public:
  explicit InterpolantFamily(NodeSequence seq);

  std::size_t size() const { return nodes_.size(); }
  const std::vector<CVector>& nodes() const { return nodes_; }
  double delta_min() const { return delta_min_; }

  Complex eval(std::size_t l, std::span<const Complex> z) const;
  std::vector<Complex> eval_all(std::span<const Complex> z) const;
  // sup over grid points (and the nodes) of sum_l |f_l(z)|.
  double measured_sum(const GridSpec& grid) const;
  // sup over grid points (and the nodes) of |f_l(z)|.
  double measured_sup(std::size_t l, const GridSpec& grid) const;

 private:
  std::vector<CVector> nodes_;
  std::vector<Involution> involutions_;
  // directions_[l][j] = v_{jl}, scale_[l][j] = |phi_{x_j}(x_l)|
  std::vector<std::vector<CVector>> directions_;
  std::vector<std::vector<double>> scale_;
  double delta_min_ = 0.0;
};

// Throws SeparationTooSmall when delta_min < 1e-6.
InterpolantFamily build_interpolants(const NodeSequence& seq);

struct TriangularArray {
  double epsilon = 0.0;
  std::vector<CVector> anchors;            // a_j, j = 1..rows
  std::vector<std::vector<CVector>> rows;  // rows[j-1][l-1] = phi_l(a_j)
  NodeSequence nodes;                      // distinct nodes, increasing modulus
  double ratio_a = 0.0;                    // recorded a < 1 for the ratio condition
  double dilation_a = 0.0;                 // 1 / min (1-|phi(z)|)/(1-|z|) over |z| >= epsilon
  bool schwarz_chain = false;              // |phi_l(a_j)| >= |phi_j(a_j)| >= epsilon, l <= j
};

// Anchors by bisection along the grid direction that maximises |phi_j|,
// keeping |phi_j(a_j)| >= epsilon and as close to it as doubles allow.
// Throws MapContracts when a quasi-compact certificate exists and
// SearchExhausted when the grid cannot reach epsilon.
TriangularArray build_triangular_array(const HoloMap& map, double epsilon, unsigned rows,
                                       const GridSpec& grid);

// f(z) = sum_x <z, x> f_x(z) over the distinct nodes, so f(0) = 0 and f(x) = |x|^2.
class WitnessFunction {
 public:
  WitnessFunction(const HoloMap& map, const TriangularArray& array);

  Complex eval(std::span<const Complex> z) const;
  double sup_grid(const GridSpec& grid) const;  // nodes included
  // (1/j) sum_{l<=j} f(phi_l(a_j)), recomputing the iterates from the map.
  Complex row_cesaro(unsigned j) const;
  const InterpolantFamily& interpolants() const { return family_; }

 private:
  HoloMap map_;
  std::vector<CVector> anchors_;
  InterpolantFamily family_;
};

WitnessFunction witness_function(const HoloMap& map, const TriangularArray& array);

// One node per line: re_1,im_1,re_2,im_2,...
void write_nodes_csv(std::ostream& os, const NodeSequence& seq);
NodeSequence read_nodes_csv(std::istream& is);

}  // namespace ballerg
