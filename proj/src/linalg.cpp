#include "ballerg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ballerg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::AmbiguousModulus: return "AmbiguousModulus";
    case ErrorCode::SpectrumOutsideDisk: return "SpectrumOutsideDisk";
    case ErrorCode::NotUnitModulus: return "NotUnitModulus";
    case ErrorCode::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NotSelfMap: return "NotSelfMap";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotFixedPoint: return "NotFixedPoint";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::NonRootEigenvalue: return "NonRootEigenvalue";
    case ErrorCode::NotConverging: return "NotConverging";
    case ErrorCode::NotEscaping: return "NotEscaping";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::DegenerateNodes: return "DegenerateNodes";
    case ErrorCode::SeparationTooSmall: return "SeparationTooSmall";
    case ErrorCode::MapContracts: return "MapContracts";
    case ErrorCode::SearchExhausted: return "SearchExhausted";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

// ---- vectors ----------------------------------------------------------------

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::InvalidArgument,
                "dimension mismatch " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

Complex inner(std::span<const Complex> z, std::span<const Complex> w) {
  require_same_size(z.size(), w.size());
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < z.size(); ++i) acc += z[i] * std::conj(w[i]);
  return acc;
}

double norm2(std::span<const Complex> z) {
  double acc = 0.0;
  for (const auto& c : z) acc += std::norm(c);
  return acc;
}

double norm(std::span<const Complex> z) {
  // Scaled accumulation so that tiny vectors near an eigenvector do not underflow.
  double scale = 0.0;
  for (const auto& c : z) scale = std::max(scale, std::abs(c));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (const auto& c : z) acc += std::norm(c / scale);
  return scale * std::sqrt(acc);
}

CVector add(std::span<const Complex> z, std::span<const Complex> w) {
  require_same_size(z.size(), w.size());
  CVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] + w[i];
  return out;
}

CVector sub(std::span<const Complex> z, std::span<const Complex> w) {
  require_same_size(z.size(), w.size());
  CVector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] - w[i];
  return out;
}

CVector scaled(Complex c, std::span<const Complex> z) {
  CVector out(z.begin(), z.end());
  for (auto& x : out) x *= c;
  return out;
}

CVector unit_vector(std::size_t dim, std::size_t k) {
  CVector e(dim, Complex{0.0, 0.0});
  e.at(k) = 1.0;
  return e;
}

// ---- CMatrix --------------------------------------------------------------

CMatrix::CMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, Complex{0.0, 0.0}) {
  if (dim == 0 || dim > kMaxDim) {
    throw Error(ErrorCode::InvalidArgument, "matrix dimension must be in [1, 16]");
  }
}

CMatrix::CMatrix(std::size_t dim, std::vector<Complex> row_major) : CMatrix(dim) {
  if (row_major.size() != dim * dim) {
    throw Error(ErrorCode::InvalidArgument, "matrix payload has wrong number of entries");
  }
  data_ = std::move(row_major);
  if (!all_finite()) throw Error(ErrorCode::InvalidArgument, "matrix entries must be finite");
}

CMatrix CMatrix::identity(std::size_t dim) {
  CMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix CMatrix::diagonal(std::initializer_list<Complex> diag) {
  return diagonal(std::span<const Complex>(diag.begin(), diag.size()));
}

CMatrix CMatrix::diagonal(std::span<const Complex> diag) {
  CMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

CMatrix CMatrix::from_columns(std::span<const CVector> columns) {
  if (columns.empty()) throw Error(ErrorCode::InvalidArgument, "no columns");
  const std::size_t n = columns.front().size();
  if (columns.size() != n) throw Error(ErrorCode::InvalidArgument, "column count must equal dim");
  CMatrix m(n);
  for (std::size_t j = 0; j < n; ++j) {
    require_same_size(columns[j].size(), n);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

CVector CMatrix::column(std::size_t j) const {
  CVector c(dim_);
  for (std::size_t i = 0; i < dim_; ++i) c[i] = (*this)(i, j);
  return c;
}

CMatrix CMatrix::adjoint() const {
  CMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

CVector CMatrix::apply(std::span<const Complex> z) const {
  require_same_size(z.size(), dim_);
  CVector out(dim_, Complex{0.0, 0.0});
  for (std::size_t i = 0; i < dim_; ++i) {
    Complex acc{0.0, 0.0};
    for (std::size_t j = 0; j < dim_; ++j) acc += (*this)(i, j) * z[j];
    out[i] = acc;
  }
  return out;
}

double CMatrix::frobenius_norm() const { return norm(data_); }

bool CMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

CMatrix& CMatrix::operator+=(const CMatrix& other) {
  require_same_size(dim_, other.dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& other) {
  require_same_size(dim_, other.dim_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(Complex c) {
  for (auto& x : data_) x *= c;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  require_same_size(a.dim_, b.dim_);
  const std::size_t n = a.dim_;
  CMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  require_same_size(a.dim(), b.dim());
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  return worst;
}

// ---- SVD ------------------------------------------------------------------

Svd svd(const CMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<CVector> a(n), v(n);
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = m.column(j);
    v[j] = unit_vector(n, j);
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  bool rotated = true;
  for (int sweep = 0; sweep < 80 && rotated; ++sweep) {
    rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double alpha = norm2(a[p]);
        const double beta = norm2(a[q]);
        const Complex gamma = inner(a[q], a[p]);  // a_p^* a_q
        const double g = std::abs(gamma);
        if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        // Rotate column q by the phase of gamma so the 2x2 Gram block is real.
        const Complex phase = std::conj(gamma) / g;
        for (std::size_t i = 0; i < n; ++i) {
          a[q][i] *= phase;
          v[q][i] *= phase;
        }
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const Complex ap = a[p][i], aq = a[q][i];
          a[p][i] = c * ap - s * aq;
          a[q][i] = s * ap + c * aq;
          const Complex vp = v[p][i], vq = v[q][i];
          v[p][i] = c * vp - s * vq;
          v[q][i] = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
    if (sweep == 79) throw Error(ErrorCode::NonConvergence, "one-sided Jacobi SVD did not converge");
  }

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) sigma[j] = norm(a[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  Svd out{std::vector<double>(n), CMatrix(n), CMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.sigma[k] = sigma[j];
    for (std::size_t i = 0; i < n; ++i) {
      out.v(i, k) = v[j][i];
      out.u(i, k) = sigma[j] > 0.0 ? a[j][i] / sigma[j] : Complex{0.0, 0.0};
    }
  }
  return out;
}

std::vector<double> singular_values(const CMatrix& m) { return svd(m).sigma; }

std::vector<CVector> dominant_range(const CMatrix& m, std::size_t rank) {
  const Svd s = svd(m);
  std::vector<CVector> basis;
  for (std::size_t k = 0; k < rank && k < m.dim(); ++k) basis.push_back(s.u.column(k));
  return basis;
}

std::vector<CVector> near_kernel(const CMatrix& m, std::size_t dim) {
  const Svd s = svd(m);
  std::vector<CVector> basis;
  const std::size_t n = m.dim();
  for (std::size_t k = 0; k < dim && k < n; ++k) basis.push_back(s.v.column(n - 1 - k));
  return basis;
}

// ---- eigenvalues ----------------------------------------------------------

namespace {

CMatrix hessenberg(CMatrix h) {
  const std::size_t n = h.dim();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    CVector x(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) x[i - k - 1] = h(i, k);
    const double xnorm = norm(x);
    if (xnorm == 0.0) continue;
    const Complex phase = std::abs(x[0]) > 0.0 ? x[0] / std::abs(x[0]) : Complex{1.0, 0.0};
    x[0] += phase * xnorm;
    const double vnorm = norm(x);
    for (auto& c : x) c /= vnorm;
    // H <- (I - 2vv^*) H
    for (std::size_t j = 0; j < n; ++j) {
      Complex dot{0.0, 0.0};
      for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(x[i - k - 1]) * h(i, j);
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= 2.0 * x[i - k - 1] * dot;
    }
    // H <- H (I - 2vv^*)
    for (std::size_t i = 0; i < n; ++i) {
      Complex dot{0.0, 0.0};
      for (std::size_t j = k + 1; j < n; ++j) dot += h(i, j) * x[j - k - 1];
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= 2.0 * dot * std::conj(x[j - k - 1]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }
  return h;
}

struct Givens {
  double c;
  Complex s;
};

// Rotation G = [[c, s], [-conj(s), c]] with G [a; b] = [r; 0].
Givens make_givens(Complex a, Complex b) {
  const double aa = std::abs(a), bb = std::abs(b);
  if (bb == 0.0) return {1.0, Complex{0.0, 0.0}};
  if (aa == 0.0) return {0.0, Complex{1.0, 0.0}};
  const double r = std::hypot(aa, bb);
  return {aa / r, (a / aa) * std::conj(b) / r};
}

Complex wilkinson_shift(const CMatrix& h, std::size_t hi) {
  const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
  const Complex half_diff = 0.5 * (a - d);
  const Complex disc = std::sqrt(half_diff * half_diff + b * c);
  const Complex mid = 0.5 * (a + d);
  const Complex mu1 = mid + disc, mu2 = mid - disc;
  return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

}  // namespace

std::vector<Complex> eigenvalues(const CMatrix& m, double tol) {
  if (!m.all_finite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entries");
  const std::size_t n = m.dim();
  CMatrix h = hessenberg(m);
  const double scale = std::max(h.frobenius_norm(), std::numeric_limits<double>::min());
  const double deflate = std::max(tol, std::numeric_limits<double>::epsilon());

  std::vector<Complex> eig;
  eig.reserve(n);
  long hi = static_cast<long>(n) - 1;
  int iter = 0;
  int total = 0;
  const int budget = 30 * static_cast<int>(n);
  std::vector<Givens> rot(n);

  while (hi >= 0) {
    long lo = hi;
    while (lo > 0) {
      double s = std::abs(h(lo - 1, lo - 1)) + std::abs(h(lo, lo));
      if (s == 0.0) s = scale;
      if (std::abs(h(lo, lo - 1)) <= deflate * s) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi) {
      eig.push_back(h(hi, hi));
      --hi;
      iter = 0;
      continue;
    }
    if (++total > budget) {
      throw Error(ErrorCode::NonConvergence,
                  "shifted QR exceeded " + std::to_string(budget) + " iterations");
    }
    ++iter;
    Complex mu = wilkinson_shift(h, static_cast<std::size_t>(hi));
    if (iter % 10 == 0) {
      // Exceptional shift to break cycles.
      mu = h(hi, hi) + 0.75 * std::abs(h(hi, hi - 1));
    }

    const auto l = static_cast<std::size_t>(lo), u = static_cast<std::size_t>(hi);
    for (std::size_t k = l; k <= u; ++k) h(k, k) -= mu;
    for (std::size_t k = l; k < u; ++k) {
      const Givens g = make_givens(h(k, k), h(k + 1, k));
      rot[k] = g;
      for (std::size_t j = k; j <= u; ++j) {
        const Complex x = h(k, j), y = h(k + 1, j);
        h(k, j) = g.c * x + g.s * y;
        h(k + 1, j) = -std::conj(g.s) * x + g.c * y;
      }
    }
    for (std::size_t k = l; k < u; ++k) {
      const Givens g = rot[k];
      for (std::size_t i = l; i <= k + 1; ++i) {
        const Complex x = h(i, k), y = h(i, k + 1);
        h(i, k) = x * g.c + y * std::conj(g.s);
        h(i, k + 1) = -x * g.s + y * g.c;
      }
    }
    for (std::size_t k = l; k <= u; ++k) h(k, k) += mu;
  }
  std::reverse(eig.begin(), eig.end());
  return eig;
}

CVector solve(const CMatrix& m, std::span<const Complex> rhs) {
  const std::size_t n = m.dim();
  require_same_size(rhs.size(), n);
  CMatrix a = m;
  CVector b(rhs.begin(), rhs.end());
  const double scale = std::max(a.frobenius_norm(), std::numeric_limits<double>::min());
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    if (std::abs(a(piv, k)) <= 1e-14 * scale) {
      throw Error(ErrorCode::InvalidArgument, "singular linear system");
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const Complex f = a(i, k) / a(k, k);
      if (f == Complex{0.0, 0.0}) continue;
      for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
      b[i] -= f * b[k];
    }
  }
  CVector x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex acc = b[i];
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
    x[i] = acc / a(i, i);
  }
  return x;
}

CMatrix matrix_power(const CMatrix& m, unsigned long long power) {
  CMatrix result = CMatrix::identity(m.dim());
  CMatrix base = m;
  while (power > 0) {
    if (power & 1ULL) result = result * base;
    power >>= 1ULL;
    if (power > 0) base = base * base;
  }
  return result;
}

// ---- spectral bookkeeping -------------------------------------------------

std::vector<EigenCluster> cluster_eigenvalues(std::span<const Complex> values, double rel_tol) {
  std::vector<EigenCluster> clusters;
  std::vector<Complex> sums;
  for (const Complex& lambda : values) {
    bool placed = false;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      const double radius = rel_tol * std::max(1.0, std::abs(clusters[c].value));
      if (std::abs(lambda - clusters[c].value) <= radius) {
        sums[c] += lambda;
        clusters[c].multiplicity += 1;
        clusters[c].value = sums[c] / static_cast<double>(clusters[c].multiplicity);
        placed = true;
        break;
      }
    }
    if (!placed) {
      clusters.push_back({lambda, 1});
      sums.push_back(lambda);
    }
  }
  return clusters;
}

std::optional<int> root_of_unity_order(Complex lambda, double tol, int q_max) {
  if (std::abs(std::abs(lambda) - 1.0) > tol) {
    throw Error(ErrorCode::NotUnitModulus,
                "|lambda| = " + std::to_string(std::abs(lambda)) + " is not 1 within tolerance");
  }
  const Complex unit = lambda / std::abs(lambda);
  Complex power{1.0, 0.0};
  for (int q = 1; q <= q_max; ++q) {
    power *= unit;
    if (std::abs(power - 1.0) <= tol) return q;
  }
  return std::nullopt;
}

namespace {

std::vector<CVector> orthonormalize(const std::vector<CVector>& vectors) {
  std::vector<CVector> basis;
  for (CVector v : vectors) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const Complex proj = inner(v, b);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * b[i];
      }
    }
    const double len = norm(v);
    if (len > 1e-12) basis.push_back(scaled(1.0 / len, v));
  }
  return basis;
}

struct ClassifiedSpectrum {
  std::vector<Complex> eigenvalues;
  std::vector<EigenCluster> unit_clusters;
};

ClassifiedSpectrum classify_spectrum(const CMatrix& m, double tol) {
  ClassifiedSpectrum out{eigenvalues(m), {}};
  std::vector<Complex> unit;
  for (const Complex& lambda : out.eigenvalues) {
    const double r = std::abs(lambda);
    if (r > 1.0 + tol) {
      throw Error(ErrorCode::SpectrumOutsideDisk,
                  "eigenvalue modulus " + std::to_string(r) + " exceeds 1 + tol");
    }
    if (r >= 1.0 - tol) {
      unit.push_back(lambda);
    } else if (r > 1.0 - 100.0 * tol) {
      throw Error(ErrorCode::AmbiguousModulus,
                  "eigenvalue modulus " + std::to_string(r) + " straddles the unit threshold");
    }
  }
  out.unit_clusters = cluster_eigenvalues(unit);
  return out;
}

SpectralSplit split_from(const CMatrix& m, const std::vector<EigenCluster>& unit_clusters) {
  const std::size_t n = m.dim();
  SpectralSplit split;
  std::vector<CVector> unit_vectors;
  CMatrix annihilator = CMatrix::identity(n);
  std::size_t unit_dim = 0;
  for (const auto& cluster : unit_clusters) {
    const CMatrix shifted = m - cluster.value * CMatrix::identity(n);
    const CMatrix power = matrix_power(shifted, cluster.multiplicity);
    for (auto& v : near_kernel(power, cluster.multiplicity)) unit_vectors.push_back(std::move(v));
    annihilator = annihilator * power;
    unit_dim += cluster.multiplicity;
  }
  split.unitary_basis = orthonormalize(unit_vectors);
  if (unit_dim == 0) {
    for (std::size_t k = 0; k < n; ++k) split.attracting_basis.push_back(unit_vector(n, k));
  } else {
    split.attracting_basis = dominant_range(annihilator, n - unit_dim);
  }
  return split;
}

}  // namespace

SpectralSplit spectral_split(const CMatrix& m, double tol) {
  const ClassifiedSpectrum spectrum = classify_spectrum(m, tol);
  return split_from(m, spectrum.unit_clusters);
}

bool SpectralReport::all_unit_roots_of_unity() const {
  return std::all_of(unity_orders.begin(), unity_orders.end(),
                     [](const UnitEigenvalue& u) { return u.order.has_value(); });
}

SpectralReport spectral_report(const CMatrix& m, double tol, int q_max) {
  const ClassifiedSpectrum spectrum = classify_spectrum(m, tol);
  SpectralSplit split = split_from(m, spectrum.unit_clusters);
  SpectralReport report;
  report.eigenvalues = spectrum.eigenvalues;
  report.singular_values = singular_values(m);
  report.attracting_basis = std::move(split.attracting_basis);
  report.unitary_basis = std::move(split.unitary_basis);
  for (const auto& cluster : spectrum.unit_clusters) {
    report.unity_orders.push_back(
        {cluster.value, cluster.multiplicity, root_of_unity_order(cluster.value, tol, q_max)});
  }
  return report;
}

}  // namespace ballerg
