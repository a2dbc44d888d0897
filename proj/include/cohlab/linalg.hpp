#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cohlab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Subsystem dimensions of a composite space, first factor most significant.
using Dims = std::vector<int>;

namespace tol {
/// Hermiticity, trace and PSD slack accepted by validation.
inline constexpr double validation = 1e-9;
/// Eigenvalues at or below this are numerical zeros (rank, lambda_min, sqrt).
inline constexpr double rank = 1e-10;
/// Entries below this modulus count as structural zeros in Kraus operators.
inline constexpr double support = 1e-12;
/// Selective outcomes below this probability are dropped.
inline constexpr double outcome = 1e-12;
}  // namespace tol

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const CMatrix& m) { return max_abs(m - m.adjoint()); }

inline long long product(const Dims& dims) {
  long long p = 1;
  for (int d : dims) p *= d;
  return p;
}

/// Kronecker product.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// exp(iH) for a Hermitian H, via its spectrum.
inline CMatrix expi_hermitian(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(h.rows());
  for (Index i = 0; i < h.rows(); ++i) phases(i) = std::polar(1.0, es.eigenvalues()(i));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Hermitian matrix built from n*n reals: diagonal first, then (re, im) pairs of the upper triangle.
inline CMatrix hermitian_from_params(const double* params, int n) {
  CMatrix h = CMatrix::Zero(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i) h(i, i) = params[p++];
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      h(i, j) = Complex(params[p], params[p + 1]);
      h(j, i) = std::conj(h(i, j));
      p += 2;
    }
  return h;
}

inline double unitarity_defect(const CMatrix& u) {
  return max_abs(u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols()));
}

}  // namespace cohlab
