#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/SVD>

#include "cohlab/cohlab.hpp"

namespace testing {

using namespace cohlab;

/// Hand-rolled generator for property tests. Case i of a property draws from
/// child_seed(master, i) so a failure is replayable from (master, i) alone.
class Gen {
 public:
  Gen(std::uint64_t master, std::uint64_t index) : seed_(child_seed(master, index)), rng_(seed_) {}

  std::uint64_t seed() const { return seed_; }
  Rng& rng() { return rng_; }

  int dim(int lo, int hi) { return rng_.uniform_int(lo, hi); }
  double unit() { return rng_.uniform(); }

  DensityMatrix mixed(Dims dims) { return random_state({std::move(dims), next(), RandomStateSpec::Kind::MixedGinibre}); }
  DensityMatrix mixed(int d) { return mixed(Dims{d}); }
  DensityMatrix pure(Dims dims) { return random_state({std::move(dims), next(), RandomStateSpec::Kind::PureHaar}); }
  DensityMatrix pure(int d) { return pure(Dims{d}); }

  /// Mixed state of random rank in [1, d].
  DensityMatrix low_rank(int d) {
    const int r = rng_.uniform_int(1, d);
    const CMatrix g = complex_gaussian(d, r, rng_);
    const CMatrix w = g * g.adjoint();
    return validate_density(w / w.trace().real());
  }

  DensityMatrix diagonal(int d) {
    std::vector<double> p(d);
    double total = 0.0;
    for (double& x : p) total += (x = rng_.uniform() + 1e-3);
    for (double& x : p) x /= total;
    return diagonal_density(p);
  }

  CMatrix unitary(int d) { return random_unitary(d, rng_); }

  CMatrix hermitian(int d) {
    const CMatrix g = complex_gaussian(d, d, rng_);
    return 0.5 * (g + g.adjoint());
  }

  /// General CPTP map C^din -> C^dout: blocks of an isometry C^din -> C^(dout * n).
  KrausChannel channel(int din, int dout, int n_kraus) {
    n_kraus = std::max(n_kraus, (din + dout - 1) / dout);
    const CMatrix u = random_unitary(dout * n_kraus, rng_);
    std::vector<CMatrix> ops;
    for (int n = 0; n < n_kraus; ++n) ops.push_back(u.block(n * dout, 0, dout, din));
    return KrausChannel(std::move(ops));
  }

  KrausChannel incoherent_channel(int d, int n_kraus) { return random_incoherent_channel(d, n_kraus, next()); }

 private:
  std::uint64_t next() { return rng_(); }

  std::uint64_t seed_;
  Rng rng_;
};

inline double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

inline CMatrix projector(int d, int k) {
  CMatrix p = CMatrix::Zero(d, d);
  p(k, k) = 1.0;
  return p;
}

// ---------------------------------------------------------------------------
// Oracles. Each computes its quantity along a route that shares no formula with
// the library function it checks.

/// -1/2 Tr [sqrt(rho), K]^2 with the commutator built explicitly.
inline double skew_by_commutator(const DensityMatrix& rho, const CMatrix& k) {
  const CMatrix s = sqrtm(rho);
  const CMatrix c = s * k - k * s;
  return -0.5 * (c * c).trace().real();
}

/// Trace norm of sqrt(rho) sqrt(sigma): the root fidelity Tr|sqrt(rho) sqrt(sigma)|.
inline double root_fidelity(const CMatrix& a, const CMatrix& b) {
  Eigen::JacobiSVD<CMatrix> svd(sqrtm(validate_density(a)) * sqrtm(validate_density(b)));
  return svd.singularValues().sum();
}

/// Quantum Fisher information from the Bures distance between rho and its phase
/// shift by d_phi: F = 8 (1 - Tr|sqrt(rho) sqrt(rho')|) / d_phi^2.
inline double qfi_finite_difference(const DensityMatrix& rho, int k, double d_phi = 1e-4) {
  const int d = rho.dim();
  CMatrix u = CMatrix::Identity(d, d);
  u(k, k) = std::exp(Complex(0.0, -d_phi));
  const CMatrix shifted = u * rho.matrix() * u.adjoint();
  return 8.0 * (1.0 - root_fidelity(rho.matrix(), shifted)) / (d_phi * d_phi);
}

/// Incoherence by propagation: every basis projector must map to a diagonal matrix.
inline bool incoherent_by_propagation(const KrausChannel& ch, double tol = 1e-12) {
  for (int j = 0; j < ch.dim_in(); ++j) {
    CMatrix out = CMatrix::Zero(ch.dim_out(), ch.dim_out());
    for (const auto& m : ch.operators()) out += m * projector(ch.dim_in(), j) * m.adjoint();
    out.diagonal().setZero();
    if (out.cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

/// Orthonormal qubit basis from Bloch angles: columns |u0>, |u1>.
inline CMatrix bloch_basis(double theta, double phi) {
  CMatrix u(2, 2);
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  const Complex e = std::exp(Complex(0.0, phi));
  u << c, -std::conj(e) * s, e * s, c;
  return u;
}

/// Product-basis coherence of a two-qubit state from the diagonal of
/// (U x V)^dagger sqrt(rho) (U x V), computed entrywise.
inline double product_coherence_bruteforce(const CMatrix& root, const CMatrix& u, const CMatrix& v) {
  double kept = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      CVector w(4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) w(2 * i + j) = u(i, a) * v(j, b);
      const double diag = (w.adjoint() * root * w)(0, 0).real();
      kept += diag * diag;
    }
  return 1.0 - kept;
}

/// Exhaustive search of the symmetric discord of a two-qubit state over Bloch angles:
/// a coarse grid of step pi/12 on all four angles, then grids of step pi/60 around
/// the best few coarse points, then two further tenfold refinements.
inline double discord_sym_grid_2x2(const DensityMatrix& rho) {
  const CMatrix root = sqrtm(rho);
  const double pi = std::acos(-1.0);
  struct Point {
    double v;
    double a[4];
  };
  auto eval = [&](const double* a) {
    return product_coherence_bruteforce(root, bloch_basis(a[0], a[1]), bloch_basis(a[2], a[3]));
  };

  std::vector<Point> coarse;
  const double h = pi / 12;
  for (int i0 = 0; i0 <= 12; ++i0)
    for (int i1 = 0; i1 < 24; ++i1)
      for (int i2 = 0; i2 <= 12; ++i2)
        for (int i3 = 0; i3 < 24; ++i3) {
          Point p{0.0, {i0 * h, i1 * h, i2 * h, i3 * h}};
          p.v = eval(p.a);
          coarse.push_back(p);
        }
  std::partial_sort(coarse.begin(), coarse.begin() + 8, coarse.end(),
                    [](const Point& x, const Point& y) { return x.v < y.v; });

  double best = coarse.front().v;
  for (int c = 0; c < 8; ++c) {
    Point centre = coarse[c];
    for (double step : {pi / 60, pi / 600, pi / 6000}) {
      Point local = centre;
      const int half = 5;
      double a[4];
      for (int i0 = -half; i0 <= half; ++i0)
        for (int i1 = -half; i1 <= half; ++i1)
          for (int i2 = -half; i2 <= half; ++i2)
            for (int i3 = -half; i3 <= half; ++i3) {
              a[0] = centre.a[0] + i0 * step;
              a[1] = centre.a[1] + i1 * step;
              a[2] = centre.a[2] + i2 * step;
              a[3] = centre.a[3] + i3 * step;
              const double v = eval(a);
              if (v < local.v) local = Point{v, {a[0], a[1], a[2], a[3]}};
            }
      centre = local;
    }
    best = std::min(best, centre.v);
  }
  return best;
}

/// Asymmetric discord of a 2 x d state by a one-sided Bloch-angle grid with zoom.
inline double discord_asym_grid_2xd(const DensityMatrix& rho, int dim_b) {
  const CMatrix root = sqrtm(rho);
  const double pi = std::acos(-1.0);
  auto eval = [&](double t, double p) {
    const CMatrix w = kron(bloch_basis(t, p), CMatrix::Identity(dim_b, dim_b));
    const CMatrix m = w.adjoint() * root * w;
    return 1.0 - m.topLeftCorner(dim_b, dim_b).squaredNorm() - m.bottomRightCorner(dim_b, dim_b).squaredNorm();
  };
  double bt = 0, bp = 0, best = eval(0, 0);
  const double h = pi / 60;
  for (int i = 0; i <= 60; ++i)
    for (int j = 0; j < 120; ++j)
      if (const double v = eval(i * h, j * h); v < best) best = v, bt = i * h, bp = j * h;
  for (double step : {pi / 600, pi / 6000, pi / 60000}) {
    const double ct = bt, cp = bp;
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        if (const double v = eval(ct + i * step, cp + j * step); v < best) best = v, bt = ct + i * step, bp = cp + j * step;
  }
  return best;
}

inline double sample_std(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size() - 1));
}

}  // namespace testing
