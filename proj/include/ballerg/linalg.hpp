#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "ballerg/error.hpp"

namespace ballerg {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

// ---- vector helpers -------------------------------------------------------

// <z, w> = sum z_i conj(w_i), linear in the first slot.
Complex inner(std::span<const Complex> z, std::span<const Complex> w);
double norm2(std::span<const Complex> z);
double norm(std::span<const Complex> z);
CVector add(std::span<const Complex> z, std::span<const Complex> w);
CVector sub(std::span<const Complex> z, std::span<const Complex> w);
CVector scaled(Complex c, std::span<const Complex> z);
CVector unit_vector(std::size_t dim, std::size_t k);

// ---- dense square complex matrix ------------------------------------------

class CMatrix {
 public:
  static constexpr std::size_t kMaxDim = 16;

  CMatrix() = default;
  explicit CMatrix(std::size_t dim);
  CMatrix(std::size_t dim, std::vector<Complex> row_major);

  static CMatrix identity(std::size_t dim);
  static CMatrix diagonal(std::initializer_list<Complex> diag);
  static CMatrix diagonal(std::span<const Complex> diag);
  // Columns of the result are the given vectors (all of length dim).
  static CMatrix from_columns(std::span<const CVector> columns);

  std::size_t dim() const { return dim_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  const std::vector<Complex>& data() const { return data_; }

  CVector column(std::size_t j) const;
  CMatrix adjoint() const;
  CVector apply(std::span<const Complex> z) const;
  double frobenius_norm() const;
  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& other);
  CMatrix& operator-=(const CMatrix& other);
  CMatrix& operator*=(Complex c);

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);
  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(Complex c, CMatrix a) { return a *= c; }
  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

double max_abs_diff(const CMatrix& a, const CMatrix& b);

// ---- decompositions -------------------------------------------------------

// A = U diag(sigma) V^*, sigma descending. Computed by one-sided Jacobi,
// which keeps small singular values accurate to working precision.
struct Svd {
  std::vector<double> sigma;
  CMatrix u;
  CMatrix v;
};

Svd svd(const CMatrix& m);

// Hessenberg reduction followed by single-shift complex QR. `tol` is the
// relative subdiagonal deflation threshold. Throws NonConvergence when the
// iteration budget (30 sweeps per eigenvalue) runs out.
std::vector<Complex> eigenvalues(const CMatrix& m, double tol = 1e-15);

std::vector<double> singular_values(const CMatrix& m);

// Gaussian elimination with partial pivoting; throws InvalidArgument when
// the matrix is numerically singular.
CVector solve(const CMatrix& m, std::span<const Complex> rhs);

// Binary exponentiation; power 0 gives the identity.
CMatrix matrix_power(const CMatrix& m, unsigned long long power);

// Orthonormal basis of the subspace spanned by the columns of `m` that
// belongs to its `rank` largest singular values.
std::vector<CVector> dominant_range(const CMatrix& m, std::size_t rank);
// Orthonormal basis spanned by the `dim` right singular vectors with the
// smallest singular values.
std::vector<CVector> near_kernel(const CMatrix& m, std::size_t dim);

// ---- spectral bookkeeping -------------------------------------------------

struct EigenCluster {
  Complex value;
  std::size_t multiplicity = 0;
};

// Groups eigenvalues lying within `rel_tol * max(1, |lambda|)` of each other.
std::vector<EigenCluster> cluster_eigenvalues(std::span<const Complex> values,
                                              double rel_tol = 1e-6);

// Smallest q <= q_max with |lambda^q - 1| <= tol; nullopt means "none".
std::optional<int> root_of_unity_order(Complex lambda, double tol = 1e-8, int q_max = 64);

struct SpectralSplit {
  std::vector<CVector> attracting_basis;  // L_N: eigenvalues inside the disk
  std::vector<CVector> unitary_basis;     // L_U: unit-modulus eigenvalues
};

SpectralSplit spectral_split(const CMatrix& m, double tol = 1e-8);

struct UnitEigenvalue {
  Complex value;
  std::size_t multiplicity = 0;
  std::optional<int> order;
};

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  std::vector<double> singular_values;
  std::vector<CVector> attracting_basis;
  std::vector<CVector> unitary_basis;
  std::vector<UnitEigenvalue> unity_orders;

  bool inside_disk() const { return unitary_basis.empty(); }
  bool all_unit_roots_of_unity() const;
};

SpectralReport spectral_report(const CMatrix& m, double tol = 1e-8, int q_max = 64);

}  // namespace ballerg
