#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "cohlab/error.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/random.hpp"

namespace cohlab {

/// Eigen-decomposition of a density matrix, eigenvalues in descending order.
struct Spectrum {
  RVector eigenvalues;
  CMatrix eigenvectors;  // column i belongs to eigenvalues(i)

  /// Number of eigenvalues above tol::rank.
  int rank() const {
    return static_cast<int>((eigenvalues.array() > tol::rank).count());
  }

  /// Smallest eigenvalue above tol::rank.
  double lambda_min() const {
    return eigenvalues(rank() - 1);
  }
};

namespace detail {

inline Spectrum eigh_raw(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
  const Index n = hermitian.rows();
  Spectrum s{RVector(n), CMatrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    s.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    s.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return s;
}

}  // namespace detail

/// Hermitian, unit-trace, positive semidefinite matrix. Only obtainable through
/// validate_density() and the constructors built on it, so every instance satisfies
/// the invariants. Immutable; safe to share across threads.
class DensityMatrix {
 public:
  int dim() const { return static_cast<int>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }
  const Spectrum& spectrum() const { return spectrum_; }
  Complex operator()(Index i, Index j) const { return matrix_(i, j); }

  double purity() const { return matrix_.cwiseAbs2().sum(); }
  bool is_pure(double tolerance = 1e-8) const { return purity() >= 1.0 - tolerance; }

  friend DensityMatrix validate_density(const CMatrix& entries);

 private:
  DensityMatrix(CMatrix m, Spectrum s) : matrix_(std::move(m)), spectrum_(std::move(s)) {}

  CMatrix matrix_;
  Spectrum spectrum_;
};

/// Checks Hermiticity, unit trace and positivity to tol::validation. Roundoff-level
/// negative eigenvalues are clipped to zero and the spectrum renormalized.
inline DensityMatrix validate_density(const CMatrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0)
    throw Error(ErrorKind::NotSquare, "density matrix must be square and non-empty");
  const double herm = hermiticity_defect(entries);
  if (herm > tol::validation)
    throw Error(ErrorKind::NotHermitian, "max |a_ij - conj(a_ji)| = " + std::to_string(herm));

  CMatrix sym = 0.5 * (entries + entries.adjoint());
  const double trace = sym.trace().real();
  if (std::abs(trace - 1.0) > tol::validation)
    throw Error(ErrorKind::NotUnitTrace, "trace = " + std::to_string(trace));

  Spectrum s = detail::eigh_raw(sym);
  const double min_eig = s.eigenvalues.minCoeff();
  if (min_eig < -tol::validation)
    throw Error(ErrorKind::NotPSD, "min eigenvalue = " + std::to_string(min_eig));

  if (min_eig < 0.0) {
    s.eigenvalues = s.eigenvalues.cwiseMax(0.0);
    s.eigenvalues /= s.eigenvalues.sum();
    sym = s.eigenvectors * s.eigenvalues.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
  } else {
    s.eigenvalues /= trace;
    sym /= trace;
  }
  return DensityMatrix(std::move(sym), std::move(s));
}

inline const Spectrum& eigh(const DensityMatrix& rho) { return rho.spectrum(); }

/// Principal square root V diag(sqrt(lambda)) V^dagger; eigenvalues at or below
/// tol::rank are treated as exact zeros.
inline CMatrix sqrtm(const DensityMatrix& rho) {
  const Spectrum& s = rho.spectrum();
  RVector root = s.eigenvalues.unaryExpr([](double l) { return l > tol::rank ? std::sqrt(l) : 0.0; });
  return s.eigenvectors * root.cast<Complex>().asDiagonal() * s.eigenvectors.adjoint();
}

/// |psi><psi| / <psi|psi>.
inline DensityMatrix pure_density(const CVector& psi) {
  const double norm = psi.norm();
  if (norm == 0.0) throw Error(ErrorKind::InvalidArgument, "zero state vector");
  const CVector unit = psi / norm;
  return validate_density(unit * unit.adjoint());
}

/// Diagonal state with the given populations (must sum to one).
inline DensityMatrix diagonal_density(const std::vector<double>& populations) {
  RVector p = Eigen::Map<const RVector>(populations.data(), static_cast<Index>(populations.size()));
  return validate_density(p.cast<Complex>().asDiagonal().toDenseMatrix());
}

/// (1/d) sum_ij |i><j|, the maximally coherent state in dimension d.
inline DensityMatrix maximally_coherent(int d) {
  return validate_density(CMatrix::Constant(d, d, Complex(1.0 / d, 0.0)));
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return validate_density(kron(a.matrix(), b.matrix()));
}

/// U rho U^dagger.
inline DensityMatrix conjugate(const DensityMatrix& rho, const CMatrix& u) {
  if (u.cols() != rho.dim())
    throw Error(ErrorKind::DimensionMismatch, "unitary does not act on the state space");
  return validate_density(u * rho.matrix() * u.adjoint());
}

/// Partial trace of a raw matrix over every subsystem not listed in `keep`. Kept
/// subsystems retain their original relative order.
inline CMatrix partial_trace_matrix(const CMatrix& m, const Dims& dims, std::vector<int> keep) {
  if (dims.empty() || product(dims) != m.rows() || m.rows() != m.cols())
    throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not match the matrix");
  std::sort(keep.begin(), keep.end());
  if (std::adjacent_find(keep.begin(), keep.end()) != keep.end() ||
      (!keep.empty() && (keep.front() < 0 || keep.back() >= static_cast<int>(dims.size()))))
    throw Error(ErrorKind::InvalidArgument, "keep set must list distinct subsystem indices");

  const int n = static_cast<int>(dims.size());
  std::vector<long long> stride(n, 1);
  for (int k = n - 2; k >= 0; --k) stride[k] = stride[k + 1] * dims[k + 1];

  std::vector<bool> kept(n, false);
  for (int k : keep) kept[k] = true;

  // Offsets of every multi-index restricted to the kept / traced subsystems.
  auto offsets = [&](bool want_kept) {
    std::vector<long long> out{0};
    for (int k = 0; k < n; ++k) {
      if (kept[k] != want_kept) continue;
      std::vector<long long> next;
      next.reserve(out.size() * dims[k]);
      for (long long base : out)
        for (int digit = 0; digit < dims[k]; ++digit) next.push_back(base + digit * stride[k]);
      out = std::move(next);
    }
    return out;
  };
  const auto keep_off = offsets(true);
  const auto trace_off = offsets(false);

  const Index dk = static_cast<Index>(keep_off.size());
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Index a = 0; a < dk; ++a)
    for (Index b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (long long t : trace_off) acc += m(keep_off[a] + t, keep_off[b] + t);
      out(a, b) = acc;
    }
  return out;
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const Dims& dims, const std::vector<int>& keep) {
  return validate_density(partial_trace_matrix(rho.matrix(), dims, keep));
}

/// Reduced states (rho_A, rho_B) of a bipartite state.
inline std::pair<DensityMatrix, DensityMatrix> marginals(const DensityMatrix& rho, int dim_a, int dim_b) {
  const Dims dims{dim_a, dim_b};
  return {partial_trace(rho, dims, {0}), partial_trace(rho, dims, {1})};
}

struct RandomStateSpec {
  enum class Kind { MixedGinibre, PureHaar };

  Dims dims;
  std::uint64_t seed = 0;
  Kind kind = Kind::MixedGinibre;
};

inline CMatrix complex_gaussian(Index rows, Index cols, Rng& rng) {
  CMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(re, im);
    }
  return g;
}

/// Ginibre mixed state G G^dagger / Tr, or a normalized complex Gaussian pure state.
inline DensityMatrix random_state(const RandomStateSpec& spec) {
  const long long n = product(spec.dims);
  if (spec.dims.empty() || n < 2)
    throw Error(ErrorKind::InvalidArgument, "random state needs total dimension >= 2");
  Rng rng(spec.seed);
  if (spec.kind == RandomStateSpec::Kind::PureHaar) return pure_density(complex_gaussian(n, 1, rng).col(0));
  const CMatrix g = complex_gaussian(n, n, rng);
  const CMatrix w = g * g.adjoint();
  return validate_density(w / w.trace().real());
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix (phase-corrected).
inline CMatrix random_unitary(int dim, Rng& rng) {
  const CMatrix g = complex_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline CMatrix random_unitary(int dim, std::uint64_t seed) {
  Rng rng(seed);
  return random_unitary(dim, rng);
}

}  // namespace cohlab
