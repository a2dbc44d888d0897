#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"
#include "cohlab/random.hpp"

namespace cohlab {

/// Tr rho^n for n = 1..max_n (entry n-1), from the spectrum.
inline std::vector<double> exact_trace_powers(const DensityMatrix& rho, int max_n) {
  if (max_n < 2) throw Error(ErrorKind::InvalidArgument, "need max_n >= 2");
  std::vector<double> p(max_n, 0.0);
  const RVector& l = rho.spectrum().eigenvalues;
  for (int n = 1; n <= max_n; ++n) p[n - 1] = l.array().pow(n).sum();
  p[0] = 1.0;
  return p;
}

/// Outcome counts of the probe-qubit sigma_x measurement after a controlled cyclic
/// shift of n copies: +1 with probability (1 + Tr rho^n) / 2.
struct ShotRecord {
  int power = 2;
  long long shots = 0;
  long long plus_count = 0;
  double p_plus_hat = 0.0;
  double trace_power_hat = 0.0;
};

inline double swap_test_plus_probability(double trace_power) {
  return std::clamp(0.5 * (1.0 + trace_power), 0.0, 1.0);
}

/// Samples the outcome distribution directly (no gate-level simulation).
inline ShotRecord simulate_shots(const DensityMatrix& rho, int n, long long shots, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "swap test needs n >= 2 copies");
  if (shots < 1) throw Error(ErrorKind::InvalidArgument, "need at least one shot");
  const double tp = rho.spectrum().eigenvalues.array().pow(n).sum();
  Rng rng(seed);
  std::binomial_distribution<long long> binom(shots, swap_test_plus_probability(tp));
  ShotRecord r;
  r.power = n;
  r.shots = shots;
  r.plus_count = binom(rng);
  r.p_plus_hat = static_cast<double>(r.plus_count) / static_cast<double>(shots);
  r.trace_power_hat = 2.0 * r.p_plus_hat - 1.0;
  return r;
}

struct SpectrumEstimate {
  std::vector<double> eigenvalues;           // descending, clipped to [0, 1], summing to 1
  std::vector<Complex> roots;                // raw characteristic-polynomial roots
  std::vector<double> elementary;            // e_0..e_N from Newton's identities
  std::vector<double> power_residuals;       // sum_i lambda_i^n - p_n, n = 1..N
  double max_imag = 0.0;
  bool ill_conditioned = false;
};

/// Threshold on |Im root| above which the recovery is flagged.
inline constexpr double kImagTolerance = 1e-6;
/// Largest dimension for which recovery is trusted without a flag.
inline constexpr int kMaxWellConditionedDim = 6;
/// Trailing elementary symmetric polynomials at or below this are zero eigenvalues.
inline constexpr double kZeroRootTolerance = 1e-14;

/// Eigenvalues from power sums p_1..p_N (p_1 is forced to 1): Newton's identities
/// give the elementary symmetric polynomials, whose characteristic polynomial is
/// solved through its companion matrix and polished by Newton iteration.
inline SpectrumEstimate recover_spectrum(const std::vector<double>& trace_powers) {
  const int n = static_cast<int>(trace_powers.size());
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "need at least one power sum");
  std::vector<double> p(trace_powers);
  p[0] = 1.0;

  SpectrumEstimate est;
  est.elementary.assign(n + 1, 0.0);
  est.elementary[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double acc = 0.0;
    for (int i = 1; i <= k; ++i) acc += ((i % 2 == 1) ? 1.0 : -1.0) * est.elementary[k - i] * p[i - 1];
    est.elementary[k] = acc / k;
  }

  // A rank-r state has e_k = 0 for k > r. Splitting off that multiple root at zero
  // keeps it from spreading into a cluster of size eps^(1/multiplicity).
  int degree = n;
  while (degree > 1 && std::abs(est.elementary[degree]) <= kZeroRootTolerance) --degree;

  // x^degree + a_1 x^{degree-1} + ... + a_degree with a_j = (-1)^j e_j.
  std::vector<double> a(degree + 1);
  for (int j = 0; j <= degree; ++j) a[j] = ((j % 2 == 0) ? 1.0 : -1.0) * est.elementary[j];
  auto poly = [&](Complex z) {
    Complex v = 1.0, dv = 0.0;
    for (int j = 1; j <= degree; ++j) {
      dv = dv * z + v;
      v = v * z + a[j];
    }
    return std::pair{v, dv};
  };

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int j = 0; j < degree; ++j) companion(0, j) = -a[j + 1];
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "companion eigensolver failed");

  for (Index i = 0; i < degree; ++i) {
    Complex z = es.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      const auto [v, dv] = poly(z);
      if (std::abs(dv) == 0.0) break;
      const Complex next = z - v / dv;
      if (std::abs(poly(next).first) >= std::abs(v)) break;
      z = next;
    }
    est.roots.push_back(z);
    est.max_imag = std::max(est.max_imag, std::abs(z.imag()));
  }
  est.roots.resize(n, Complex(0.0));
  est.ill_conditioned = est.max_imag > kImagTolerance || n > kMaxWellConditionedDim;

  for (const auto& z : est.roots) est.eigenvalues.push_back(std::clamp(z.real(), 0.0, 1.0));
  double total = 0.0;
  for (double l : est.eigenvalues) total += l;
  if (total > 0.0)
    for (double& l : est.eigenvalues) l /= total;
  std::sort(est.eigenvalues.begin(), est.eigenvalues.end(), std::greater<>());

  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (double l : est.eigenvalues) s += std::pow(l, k);
    est.power_residuals.push_back(s - p[k - 1]);
  }
  return est;
}

struct MeasurementOptions {
  bool exact_powers = false;     // use Tr rho^n instead of simulated swap tests
  bool sample_diagonal = false;  // multinomial sampling of rho_kk instead of exact values
};

struct MeasuredEstimates {
  std::vector<ShotRecord> shot_records;
  std::vector<double> trace_powers;  // p_1..p_N used for the recovery
  SpectrumEstimate spectrum;
  std::vector<double> diagonal;
  double c_rel_hat = 0.0;
  double c_l2_hat = 0.0;
  Bounds skew_bounds_hat;
  int swap_test_settings = 0;       // controlled cyclic shifts for n = 2..N
  int projector_measurements = 0;   // independent |k><k| probabilities
};

/// Estimates C_r, C_l2 and the skew-coherence bounds from simulated swap tests
/// (spectrum) and projective measurements (diagonal). Power n uses
/// child_seed(seed, n); the diagonal uses child_seed(seed, 0).
inline MeasuredEstimates estimate_measures(const DensityMatrix& rho, long long shots_per_power, std::uint64_t seed,
                                           const MeasurementOptions& opts = {}) {
  if (shots_per_power < 1) throw Error(ErrorKind::InvalidArgument, "need at least one shot");
  const int dim = rho.dim();
  MeasuredEstimates m;
  m.swap_test_settings = dim - 1;
  m.projector_measurements = dim - 1;

  if (dim == 1) {
    m.trace_powers = {1.0};
  } else if (opts.exact_powers) {
    m.trace_powers = exact_trace_powers(rho, dim);
  } else {
    m.trace_powers.push_back(1.0);
    for (int n = 2; n <= dim; ++n) {
      m.shot_records.push_back(simulate_shots(rho, n, shots_per_power, child_seed(seed, n)));
      m.trace_powers.push_back(m.shot_records.back().trace_power_hat);
    }
  }
  m.spectrum = recover_spectrum(m.trace_powers);

  const RVector diag = rho.matrix().diagonal().real().cwiseMax(0.0);
  m.diagonal.assign(diag.data(), diag.data() + dim);
  if (opts.sample_diagonal) {
    Rng rng(child_seed(seed, 0));
    long long remaining = shots_per_power;
    double mass = 1.0;
    for (int k = 0; k < dim; ++k) {
      const double q = mass > 0.0 ? std::clamp(diag(k) / mass, 0.0, 1.0) : 0.0;
      const long long count = k == dim - 1 ? remaining : std::binomial_distribution<long long>(remaining, q)(rng);
      m.diagonal[k] = static_cast<double>(count) / static_cast<double>(shots_per_power);
      remaining -= count;
      mass -= diag(k);
    }
  }

  double sum_sq_eig = 0.0, sum_sq_diag = 0.0;
  m.c_rel_hat = 0.0;
  for (double l : m.spectrum.eigenvalues) {
    m.c_rel_hat += detail::xlog2x(l);
    sum_sq_eig += l * l;
  }
  for (double d : m.diagonal) {
    m.c_rel_hat -= detail::xlog2x(d);
    sum_sq_diag += d * d;
  }
  m.c_l2_hat = sum_sq_eig - sum_sq_diag;
  m.skew_bounds_hat = {0.5 * m.c_l2_hat, 1.0 - sum_sq_eig + m.c_l2_hat};
  return m;
}

}  // namespace cohlab
