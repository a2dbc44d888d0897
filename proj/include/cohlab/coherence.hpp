#pragma once

#include <cmath>
#include <vector>

#include "cohlab/density.hpp"

namespace cohlab {

/// Hermitian observable used by the K-coherence.
class Observable {
 public:
  explicit Observable(CMatrix k) : k_(std::move(k)) {
    if (k_.rows() != k_.cols() || k_.rows() == 0)
      throw Error(ErrorKind::NotSquare, "observable must be square");
    if (hermiticity_defect(k_) > tol::validation)
      throw Error(ErrorKind::NotHermitian, "observable is not Hermitian");
    k_ = 0.5 * (k_ + k_.adjoint());
  }

  static Observable diagonal(const std::vector<double>& values) {
    RVector v = Eigen::Map<const RVector>(values.data(), static_cast<Index>(values.size()));
    return Observable(v.cast<Complex>().asDiagonal().toDenseMatrix());
  }

  int dim() const { return static_cast<int>(k_.rows()); }
  const CMatrix& matrix() const { return k_; }

 private:
  CMatrix k_;
};

/// Diagonal of sqrt(rho) in the computational basis (real for a Hermitian root).
inline RVector sqrt_diagonal(const DensityMatrix& rho) {
  return sqrtm(rho).diagonal().real();
}

/// Wigner-Yanase skew information with respect to |k><k|, closed form
/// <k|rho|k> - <k|sqrt(rho)|k>^2.
inline double skew_info(const DensityMatrix& rho, int k) {
  if (k < 0 || k >= rho.dim()) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  const double s = sqrtm(rho)(k, k).real();
  return rho(k, k).real() - s * s;
}

/// Skew information for every basis projector.
inline RVector skew_info_all(const DensityMatrix& rho) {
  const RVector s = sqrt_diagonal(rho);
  return rho.matrix().diagonal().real() - s.cwiseAbs2();
}

/// Skew-information coherence 1 - sum_k <k|sqrt(rho)|k>^2.
inline double c_skew(const DensityMatrix& rho) {
  return 1.0 - sqrt_diagonal(rho).squaredNorm();
}

/// Diagonal state with populations proportional to <k|sqrt(rho)|k>^2; the incoherent
/// state of maximal affinity with rho.
inline DensityMatrix optimal_incoherent_state(const DensityMatrix& rho) {
  const RVector w = sqrt_diagonal(rho).cwiseAbs2();
  const double total = w.sum();
  if (total <= 0.0) throw Error(ErrorKind::DegenerateState, "sqrt(rho) has an all-zero diagonal");
  return validate_density((w / total).cast<Complex>().asDiagonal().toDenseMatrix());
}

/// f(rho, sigma) = Tr sqrt(rho) sqrt(sigma).
inline double affinity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error(ErrorKind::DimensionMismatch, "affinity of states of different dimension");
  return (sqrtm(rho) * sqrtm(sigma)).trace().real();
}

namespace detail {
inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }
}  // namespace detail

/// Relative-entropy coherence S(diag rho) - S(rho) in bits.
inline double c_rel_entropy(const DensityMatrix& rho) {
  double value = 0.0;
  for (Index i = 0; i < rho.dim(); ++i) value += detail::xlog2x(rho.spectrum().eigenvalues(i));
  for (Index k = 0; k < rho.dim(); ++k) value -= detail::xlog2x(rho(k, k).real());
  return value;
}

/// sum_{i != j} |rho_ij|
inline double c_l1(const DensityMatrix& rho) {
  const CMatrix& m = rho.matrix();
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

/// sum_{i != j} |rho_ij|^2  (= Tr rho^2 - sum_k rho_kk^2)
inline double c_l2(const DensityMatrix& rho) {
  const CMatrix& m = rho.matrix();
  return m.cwiseAbs2().sum() - m.diagonal().cwiseAbs2().sum();
}

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// C_l2 / 2 <= c_skew <= 1 - Tr rho^2 + C_l2.
inline Bounds skew_bounds(const DensityMatrix& rho) {
  const double l2 = c_l2(rho);
  return {0.5 * l2, 1.0 - rho.purity() + l2};
}

/// C_l2 <= C_l1 <= sqrt(N (N - 1) C_l2).
inline Bounds l1_bounds(const DensityMatrix& rho) {
  const double l2 = c_l2(rho);
  const double n = rho.dim();
  return {l2, std::sqrt(n * (n - 1.0) * std::max(l2, 0.0))};
}

/// K-coherence -1/2 Tr [sqrt(rho), K]^2, evaluated as ||[sqrt(rho), K]||_F^2 / 2
/// since the commutator is anti-Hermitian.
inline double k_coherence(const DensityMatrix& rho, const Observable& k) {
  if (rho.dim() != k.dim()) throw Error(ErrorKind::DimensionMismatch, "observable and state dimensions differ");
  const CMatrix s = sqrtm(rho);
  const CMatrix comm = s * k.matrix() - k.matrix() * s;
  return 0.5 * comm.squaredNorm();
}

struct CoherenceReport {
  int dim = 0;
  double c_skew = 0.0;
  double c_rel = 0.0;
  double c_l1 = 0.0;
  double c_l2 = 0.0;
  double purity = 0.0;
  std::vector<double> skew_per_k;
  Bounds skew_bounds;
  Bounds l1_bounds;
};

inline CoherenceReport coherence_report(const DensityMatrix& rho) {
  CoherenceReport r;
  r.dim = rho.dim();
  const RVector per_k = skew_info_all(rho);
  r.skew_per_k.assign(per_k.data(), per_k.data() + per_k.size());
  r.c_skew = c_skew(rho);
  r.c_rel = c_rel_entropy(rho);
  r.c_l1 = c_l1(rho);
  r.c_l2 = c_l2(rho);
  r.purity = rho.purity();
  r.skew_bounds = skew_bounds(rho);
  r.l1_bounds = l1_bounds(rho);
  return r;
}

}  // namespace cohlab
