#pragma once

#include <limits>
#include <vector>

#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"

namespace cohlab {

/// Pairs of eigenvalues with lambda_i + lambda_j at or below this are skipped in the
/// Fisher-information sum.
inline constexpr double kQfiCutoff = 1e-12;

/// Quantum Fisher information of rho for the phase generated by |k><k|:
/// 2 sum_{ij} (l_i - l_j)^2 / (l_i + l_j) |<i|k>|^2 |<k|j>|^2.
inline double qfi_projector(const DensityMatrix& rho, int k) {
  if (k < 0 || k >= rho.dim()) throw Error(ErrorKind::InvalidArgument, "basis index out of range");
  const Spectrum& s = rho.spectrum();
  const RVector w = s.eigenvectors.row(k).cwiseAbs2().transpose();
  double f = 0.0;
  for (Index i = 0; i < rho.dim(); ++i)
    for (Index j = 0; j < rho.dim(); ++j) {
      const double sum = s.eigenvalues(i) + s.eigenvalues(j);
      if (sum <= kQfiCutoff) continue;
      const double diff = s.eigenvalues(i) - s.eigenvalues(j);
      f += diff * diff / sum * w(i) * w(j);
    }
  return 2.0 * f;
}

struct LuoSandwich {
  double skew = 0.0;    // I(rho, |k><k|)
  double fisher = 0.0;  // F_Qk
  bool ok = false;      // I <= F/4 <= 2I
};

inline LuoSandwich luo_sandwich(const DensityMatrix& rho, int k, double slack = 1e-9) {
  LuoSandwich l{skew_info(rho, k), qfi_projector(rho, k), false};
  const double quarter = 0.25 * l.fisher;
  l.ok = l.skew <= quarter + slack && quarter <= 2.0 * l.skew + slack;
  return l;
}

struct PhaseEstimate {
  double skew = 0.0;
  double fisher = 0.0;
  double optimal_variance = std::numeric_limits<double>::infinity();  // 1 / (N F_Qk)
  double variance_lower = std::numeric_limits<double>::infinity();    // 1 / (8 N I)
  double variance_upper = std::numeric_limits<double>::infinity();    // 1 / (4 N I)
  bool within = true;      // lower <= optimal <= upper
  bool excluded = false;   // F_Qk = 0: no information on this phase
};

struct MetrologyReport {
  int n_runs = 1;
  double coherence = 0.0;
  std::vector<PhaseEstimate> per_k;
  double sum_inverse_variance = 0.0;  // sum over included k of N F_Qk
  double aggregate_lower = 0.0;       // 4 N C
  double aggregate_upper = 0.0;       // 8 N C
  bool aggregate_ok = false;
  double average_variance = std::numeric_limits<double>::infinity();  // 1 / sum_inverse_variance
  double average_variance_lower = std::numeric_limits<double>::infinity();  // 1 / (8 N C)
  double average_variance_upper = std::numeric_limits<double>::infinity();  // 1 / (4 N C)
  int excluded_count = 0;
};

/// Cramer-Rao optimal variances of the projector-generated phases and their
/// aggregate against the coherence. Phases with zero Fisher information are
/// excluded from the aggregate and counted in excluded_count.
inline MetrologyReport metrology_report(const DensityMatrix& rho, int n_runs, double slack = 1e-9) {
  if (n_runs < 1) throw Error(ErrorKind::InvalidArgument, "need at least one run");
  MetrologyReport rep;
  rep.n_runs = n_runs;
  rep.coherence = c_skew(rho);
  const double n = n_runs;
  for (int k = 0; k < rho.dim(); ++k) {
    PhaseEstimate e;
    e.skew = skew_info(rho, k);
    e.fisher = qfi_projector(rho, k);
    e.excluded = e.fisher <= kQfiCutoff;
    if (!e.excluded) {
      e.optimal_variance = 1.0 / (n * e.fisher);
      rep.sum_inverse_variance += n * e.fisher;
    } else {
      ++rep.excluded_count;
    }
    if (e.skew > kQfiCutoff) {
      e.variance_lower = 1.0 / (8.0 * n * e.skew);
      e.variance_upper = 1.0 / (4.0 * n * e.skew);
      e.within = e.optimal_variance >= e.variance_lower * (1.0 - slack) &&
                 e.optimal_variance <= e.variance_upper * (1.0 + slack);
    }
    rep.per_k.push_back(e);
  }
  rep.aggregate_lower = 4.0 * n * rep.coherence;
  rep.aggregate_upper = 8.0 * n * rep.coherence;
  rep.aggregate_ok = rep.sum_inverse_variance >= rep.aggregate_lower - slack * n &&
                     rep.sum_inverse_variance <= rep.aggregate_upper + slack * n;
  if (rep.sum_inverse_variance > 0.0) rep.average_variance = 1.0 / rep.sum_inverse_variance;
  if (rep.coherence > 0.0) {
    rep.average_variance_lower = 1.0 / (8.0 * n * rep.coherence);
    rep.average_variance_upper = 1.0 / (4.0 * n * rep.coherence);
  }
  return rep;
}

}  // namespace cohlab
