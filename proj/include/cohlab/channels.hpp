#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"
#include "cohlab/random.hpp"

namespace cohlab {

/// max |sum_n M_n^dagger M_n - I|
inline double completeness_residual(const std::vector<CMatrix>& ops) {
  if (ops.empty()) return 1.0;
  CMatrix sum = CMatrix::Zero(ops.front().cols(), ops.front().cols());
  for (const auto& m : ops) sum += m.adjoint() * m;
  return max_abs(sum - CMatrix::Identity(sum.rows(), sum.cols()));
}

/// Trace-preserving channel in Kraus form, operators dim_out x dim_in.
class KrausChannel {
 public:
  explicit KrausChannel(std::vector<CMatrix> ops) : ops_(std::move(ops)) {
    check_shapes();
    const double residual = completeness_residual(ops_);
    if (residual > tol::validation)
      throw Error(ErrorKind::IncompleteChannel, "sum M^dagger M deviates from I by " + std::to_string(residual));
  }

  /// Skips the completeness check; for printed data that is complete only to rounding.
  static KrausChannel unchecked(std::vector<CMatrix> ops) {
    KrausChannel ch;
    ch.ops_ = std::move(ops);
    ch.check_shapes();
    return ch;
  }

  int dim_in() const { return static_cast<int>(ops_.front().cols()); }
  int dim_out() const { return static_cast<int>(ops_.front().rows()); }
  const std::vector<CMatrix>& operators() const { return ops_; }
  std::size_t size() const { return ops_.size(); }

 private:
  KrausChannel() = default;

  void check_shapes() const {
    if (ops_.empty()) throw Error(ErrorKind::InvalidArgument, "channel needs at least one Kraus operator");
    for (const auto& m : ops_)
      if (m.rows() != ops_.front().rows() || m.cols() != ops_.front().cols())
        throw Error(ErrorKind::DimensionMismatch, "Kraus operators of different shapes");
  }

  std::vector<CMatrix> ops_;
};

/// A channel is incoherent iff every column of every Kraus operator has at most one
/// entry above tol::support: each basis state is sent into a single basis ray.
inline bool is_incoherent(const KrausChannel& ch) {
  for (const auto& m : ch.operators())
    for (Index j = 0; j < m.cols(); ++j)
      if ((m.col(j).cwiseAbs().array() > tol::support).count() > 1) return false;
  return true;
}

inline DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.dim_in() != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "channel input dimension differs from state");
  CMatrix out = CMatrix::Zero(ch.dim_out(), ch.dim_out());
  for (const auto& m : ch.operators()) out += m * rho.matrix() * m.adjoint();
  return validate_density(out);
}

struct SelectiveOutcome {
  int index = 0;  // position of the Kraus operator that produced it
  double probability = 0.0;
  DensityMatrix state;
};

/// Post-measurement ensemble {p_n, M_n rho M_n^dagger / p_n}; outcomes with
/// p_n < tol::outcome are dropped.
inline std::vector<SelectiveOutcome> apply_selective(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.dim_in() != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "channel input dimension differs from state");
  std::vector<SelectiveOutcome> out;
  for (std::size_t n = 0; n < ch.size(); ++n) {
    const CMatrix& m = ch.operators()[n];
    const CMatrix branch = m * rho.matrix() * m.adjoint();
    const double p = branch.trace().real();
    if (p < tol::outcome) continue;
    out.push_back({static_cast<int>(n), p, validate_density(branch / p)});
  }
  return out;
}

struct MonotonicityVerdict {
  double c_before = 0.0;
  double c_avg_after = 0.0;  // sum_n p_n C(rho_n)
  double c_after = 0.0;      // C(sum_n p_n rho_n)
  bool strong_ok = false;
  bool weak_ok = false;
};

/// Evaluates the strong and weak monotonicity conditions of `measure` under `ch`.
/// Records the verdict whether or not the channel is incoherent.
template <class Measure>
MonotonicityVerdict monotonicity_check(const KrausChannel& ch, const DensityMatrix& rho, Measure&& measure,
                                       double slack = 1e-9) {
  MonotonicityVerdict v;
  v.c_before = measure(rho);
  for (const auto& o : apply_selective(ch, rho)) v.c_avg_after += o.probability * measure(o.state);
  v.c_after = measure(apply(ch, rho));
  v.strong_ok = v.c_avg_after <= v.c_before + slack;
  v.weak_ok = v.c_after <= v.c_before + slack;
  return v;
}

inline MonotonicityVerdict monotonicity_check_skew(const KrausChannel& ch, const DensityMatrix& rho) {
  return monotonicity_check(ch, rho, [](const DensityMatrix& r) { return c_skew(r); });
}

inline MonotonicityVerdict monotonicity_check_k(const KrausChannel& ch, const DensityMatrix& rho, const Observable& k) {
  return monotonicity_check(ch, rho, [&k](const DensityMatrix& r) { return k_coherence(r, k); });
}

inline KrausChannel identity_channel(int dim) { return KrausChannel({CMatrix::Identity(dim, dim)}); }

/// Complete dephasing {|k><k|}.
inline KrausChannel dephasing_channel(int dim) {
  std::vector<CMatrix> ops;
  for (int k = 0; k < dim; ++k) {
    CMatrix p = CMatrix::Zero(dim, dim);
    p(k, k) = 1.0;
    ops.push_back(p);
  }
  return KrausChannel(std::move(ops));
}

/// Random incoherent channel with exactly n_kraus square operators.
///
/// Every operator gets a random column -> row map f_n. Writing a_j in C^n for the
/// amplitudes of column j across operators, sum_n M_n^dagger M_n = I holds iff
/// sum_{n : f_n(j) = f_n(k)} conj(a_j[n]) a_k[n] = delta_jk. The a_j are drawn one at a
/// time and projected onto the complement of the constraints from earlier columns,
/// then normalized. A map set whose constraints leave no room is redrawn.
inline KrausChannel random_incoherent_channel(int dim, int n_kraus, std::uint64_t seed, int retry_budget = 1000) {
  if (dim < 1 || n_kraus < 1) throw Error(ErrorKind::InvalidArgument, "need dim >= 1 and n_kraus >= 1");
  Rng rng(seed);
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    std::vector<std::vector<int>> row_of(n_kraus, std::vector<int>(dim));
    for (auto& f : row_of)
      for (int& r : f) r = rng.uniform_int(0, dim - 1);

    std::vector<CVector> amps;
    bool feasible = true;
    for (int k = 0; k < dim && feasible; ++k) {
      CMatrix constraints(n_kraus, k);
      for (int j = 0; j < k; ++j)
        for (int n = 0; n < n_kraus; ++n)
          constraints(n, j) = row_of[n][j] == row_of[n][k] ? amps[j](n) : Complex(0.0);

      CVector a = complex_gaussian(n_kraus, 1, rng).col(0);
      if (k > 0) {
        // Orthonormal basis of the constraint span, then remove it from a.
        Eigen::ColPivHouseholderQR<CMatrix> qr(constraints);
        const Index r = qr.rank();
        if (r > 0) {
          const CMatrix q = CMatrix(qr.householderQ()).leftCols(r);
          a -= q * (q.adjoint() * a);
        }
      }
      const double norm = a.norm();
      if (norm < 1e-8) feasible = false;
      else amps.push_back(a / norm);
    }
    if (!feasible) continue;

    std::vector<CMatrix> ops(n_kraus, CMatrix::Zero(dim, dim));
    for (int n = 0; n < n_kraus; ++n)
      for (int j = 0; j < dim; ++j) ops[n](row_of[n][j], j) = amps[j](n);
    return KrausChannel(std::move(ops));
  }
  throw Error(ErrorKind::InfeasiblePattern, "no feasible incoherent Kraus pattern within the retry budget");
}

/// Counterexample data for the K-coherence under an incoherent channel.
struct AppendixAFixture {
  DensityMatrix rho;
  std::vector<CMatrix> printed_ops;  // four-digit entries as printed
  KrausChannel channel;              // printed ops after the joint completeness repair
  Observable k;
  double residual_before = 0.0;
  double residual_after = 0.0;

  // Published values.
  static constexpr double c_k_before = 0.2277;
  static constexpr double c_k_avg_after = 1.2928;
  static constexpr double c_k_after = 0.3350;
};

/// M_n <- M_n (sum_m M_m^dagger M_m)^{-1/2}. For incoherent operators whose
/// completeness sum is diagonal this preserves the zero pattern.
inline std::vector<CMatrix> repair_completeness(const std::vector<CMatrix>& ops) {
  CMatrix sum = CMatrix::Zero(ops.front().cols(), ops.front().cols());
  for (const auto& m : ops) sum += m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(sum);
  const RVector inv_root = es.eigenvalues().cwiseSqrt().cwiseInverse();
  const CMatrix s_inv_half = es.eigenvectors() * inv_root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<CMatrix> out;
  out.reserve(ops.size());
  for (const auto& m : ops) out.push_back(m * s_inv_half);
  return out;
}

/// The 3x3 state, two-operator incoherent channel and K = diag(1, 7, 5) of the
/// K-coherence counterexample. The printed operators satisfy completeness only to
/// about 1e-4 (e.g. 0.9539^2 + 0.3^2 = 1.0001), so the channel is the jointly
/// repaired version; the printed matrices are kept alongside.
inline AppendixAFixture appendix_a_fixture() {
  CMatrix rho(3, 3);
  rho << 0.6309, 0.0359, 0.0858,
         0.0359, 0.0441, 0.1189,
         0.0858, 0.1189, 0.3250;
  CMatrix m1 = CMatrix::Zero(3, 3);
  m1(0, 1) = 0.3;
  m1(1, 2) = 0.5;
  m1(2, 0) = 0.7;
  CMatrix m2 = CMatrix::Zero(3, 3);
  m2(0, 2) = 0.8660;
  m2(1, 1) = 0.9539;
  m2(2, 0) = 0.7141;
  std::vector<CMatrix> printed{m1, m2};
  auto repaired = repair_completeness(printed);
  const double before = completeness_residual(printed);
  const double after = completeness_residual(repaired);
  return AppendixAFixture{validate_density(rho), printed, KrausChannel(std::move(repaired)),
                          Observable::diagonal({1.0, 7.0, 5.0}), before, after};
}

}  // namespace cohlab
