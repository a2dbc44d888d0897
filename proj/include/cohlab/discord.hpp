#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "cohlab/channels.hpp"
#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"
#include "cohlab/optimize.hpp"
#include "cohlab/parallel.hpp"

namespace cohlab {

/// Local bases as unitaries whose columns are the basis vectors of A and B.
struct LocalBasis {
  CMatrix u_a;
  CMatrix u_b;

  static LocalBasis identity(int dim_a, int dim_b) {
    return {CMatrix::Identity(dim_a, dim_a), CMatrix::Identity(dim_b, dim_b)};
  }
};

namespace detail {

inline void check_bipartite(const DensityMatrix& rho, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho.dim())
    throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not match the state");
}

inline void check_unitary(const CMatrix& u, int dim) {
  if (u.rows() != dim || u.cols() != dim) throw Error(ErrorKind::DimensionMismatch, "local unitary has the wrong size");
  if (unitarity_defect(u) > tol::validation) throw Error(ErrorKind::InvalidArgument, "local basis matrix is not unitary");
}

// 1 - sum_k ||(<u_k| x I) S (|u_k> x I)||_F^2 for a precomputed S = sqrt(rho).
inline double subspace_coherence_from_root(const CMatrix& root, int dim_a, int dim_b, const CMatrix& u) {
  const CMatrix w = kron(u, CMatrix::Identity(dim_b, dim_b));
  const CMatrix t = w.adjoint() * root * w;
  double kept = 0.0;
  for (int k = 0; k < dim_a; ++k) kept += t.block(k * dim_b, k * dim_b, dim_b, dim_b).squaredNorm();
  return 1.0 - kept;
}

// 1 - sum_{kk'} <kk'|(U x V)^dagger S (U x V)|kk'>^2.
inline double product_coherence_from_root(const CMatrix& root, const CMatrix& u, const CMatrix& v) {
  const CMatrix w = kron(u, v);
  return 1.0 - (w.adjoint() * root * w).diagonal().real().squaredNorm();
}

inline CMatrix root_of(const DensityMatrix& rho) { return rho.spectrum().rank() == 1 ? rho.matrix() : sqrtm(rho); }

}  // namespace detail

/// Coherence of the A subspace in the basis given by the columns of u:
/// sum_k I(rho_AB, u|k><k|u^dagger x I_B).
inline double local_coherence_a(const DensityMatrix& rho, int dim_a, int dim_b, const CMatrix& u) {
  detail::check_bipartite(rho, dim_a, dim_b);
  detail::check_unitary(u, dim_a);
  return detail::subspace_coherence_from_root(detail::root_of(rho), dim_a, dim_b, u);
}

/// Coherence of rho_AB in the product basis {U|k> x V|k'>}.
inline double product_basis_coherence(const DensityMatrix& rho, int dim_a, int dim_b, const LocalBasis& basis) {
  detail::check_bipartite(rho, dim_a, dim_b);
  detail::check_unitary(basis.u_a, dim_a);
  detail::check_unitary(basis.u_b, dim_b);
  return detail::product_coherence_from_root(detail::root_of(rho), basis.u_a, basis.u_b);
}

struct DiscordOptions {
  int restarts = 32;
  int max_iters = 2000;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  /// Restarts whose best values differ by more than this flag the result unconverged.
  double agreement = 1e-5;
};

struct DiscordResult {
  double value = 0.0;
  LocalBasis basis;
  int restarts_used = 0;
  bool converged = false;
  /// Coherence in the computational (product) basis; the minimum cannot exceed it.
  double upper_bound = 0.0;
  /// Asymmetric discord only: C(rho_A) in the optimal A basis.
  std::optional<double> lower_bound;
  bool sandwich_ok = false;
  std::vector<double> restart_values;
};

namespace detail {

struct RestartOutcome {
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

template <class Objective>
DiscordResult minimize_over_bases(Objective&& objective, int n_params, const DiscordOptions& opts) {
  if (opts.restarts < 1) throw Error(ErrorKind::InvalidArgument, "need at least one restart");
  const SimplexOptions simplex{opts.max_iters, opts.tol, 0.5};
  // Restart i draws its starting generator from child_seed(seed, i); the minimum is
  // reduced in index order, so ties go to the lowest restart.
  auto outcomes = parallel_map(static_cast<std::size_t>(opts.restarts), opts.threads, [&](std::size_t i) {
    Rng rng(child_seed(opts.seed, i));
    std::vector<double> x0(n_params);
    for (double& v : x0) v = rng.normal();
    auto r = nelder_mead(objective, x0, simplex);
    return RestartOutcome{r.value, r.x};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < outcomes.size(); ++i)
    if (outcomes[i].value < outcomes[best].value) best = i;

  // Local polish from the best restart with a small simplex.
  const auto polished = nelder_mead(objective, outcomes[best].x, SimplexOptions{opts.max_iters, opts.tol * 1e-2, 0.02});
  if (polished.value < outcomes[best].value) outcomes[best] = {polished.value, polished.x};

  DiscordResult res;
  res.restarts_used = opts.restarts;
  for (const auto& o : outcomes) res.restart_values.push_back(o.value);
  std::vector<double> sorted = res.restart_values;
  std::sort(sorted.begin(), sorted.end());
  res.converged = sorted.size() < 2 || sorted[1] - sorted[0] <= opts.agreement;
  res.value = std::max(0.0, outcomes[best].value);
  objective.store_basis(outcomes[best].x, res.basis);
  return res;
}

struct AsymObjective {
  CMatrix root;
  int dim_a;
  int dim_b;
  double operator()(const std::vector<double>& x) const {
    return subspace_coherence_from_root(root, dim_a, dim_b, expi_hermitian(hermitian_from_params(x.data(), dim_a)));
  }
  void store_basis(const std::vector<double>& x, LocalBasis& b) const {
    b.u_a = expi_hermitian(hermitian_from_params(x.data(), dim_a));
    b.u_b = CMatrix::Identity(dim_b, dim_b);
  }
};

struct SymObjective {
  CMatrix root;
  int dim_a;
  int dim_b;
  double operator()(const std::vector<double>& x) const {
    return product_coherence_from_root(root, expi_hermitian(hermitian_from_params(x.data(), dim_a)),
                                       expi_hermitian(hermitian_from_params(x.data() + dim_a * dim_a, dim_b)));
  }
  void store_basis(const std::vector<double>& x, LocalBasis& b) const {
    b.u_a = expi_hermitian(hermitian_from_params(x.data(), dim_a));
    b.u_b = expi_hermitian(hermitian_from_params(x.data() + dim_a * dim_a, dim_b));
  }
};

}  // namespace detail

/// Skew-information discord: min over A bases of the A-subspace coherence, found by
/// multi-start Nelder-Mead over Hermitian generators of the local unitary.
inline DiscordResult discord_asym(const DensityMatrix& rho, int dim_a, int dim_b, const DiscordOptions& opts = {}) {
  detail::check_bipartite(rho, dim_a, dim_b);
  detail::AsymObjective obj{detail::root_of(rho), dim_a, dim_b};
  auto res = detail::minimize_over_bases(obj, dim_a * dim_a, opts);
  res.upper_bound = detail::subspace_coherence_from_root(obj.root, dim_a, dim_b, CMatrix::Identity(dim_a, dim_a));
  const auto rho_a = partial_trace(rho, {dim_a, dim_b}, {0});
  res.lower_bound = c_skew(conjugate(rho_a, res.basis.u_a.adjoint()));
  res.sandwich_ok = res.value <= res.upper_bound + 1e-9 && res.value >= *res.lower_bound - 1e-6;
  return res;
}

/// Symmetric discord: min over local product bases of the coherence of rho_AB.
inline DiscordResult discord_sym(const DensityMatrix& rho, int dim_a, int dim_b, const DiscordOptions& opts = {}) {
  detail::check_bipartite(rho, dim_a, dim_b);
  detail::SymObjective obj{detail::root_of(rho), dim_a, dim_b};
  auto res = detail::minimize_over_bases(obj, dim_a * dim_a + dim_b * dim_b, opts);
  res.upper_bound = c_skew(rho);
  res.sandwich_ok = res.value <= res.upper_bound + 1e-9;
  return res;
}

/// U|i, j> = |i, i + j mod d>.
inline KrausChannel generalized_cnot(int dim) {
  if (dim < 2) throw Error(ErrorKind::InvalidArgument, "generalized CNOT needs dim >= 2");
  CMatrix u = CMatrix::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) u(i * dim + (i + j) % dim, i * dim + j) = 1.0;
  return KrausChannel({u});
}

/// I_2 (+) i sigma_y on two qubits.
inline KrausChannel identity_plus_i_sigma_y() {
  CMatrix u = CMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = -1.0;
  return KrausChannel({u});
}

struct Theorem3Verdict {
  double coherence_before = 0.0;  // C(sigma_A x sigma_B)
  double bound = 0.0;             // 1 - (1 - C(sigma_A))(1 - C(sigma_B))
  DiscordResult discord_after;
  bool ok = false;
};

/// Symmetric discord created by an incoherent operation on a product state, against
/// the coherence bound of the inputs.
inline Theorem3Verdict theorem3_check(const DensityMatrix& sigma_a, const DensityMatrix& sigma_b,
                                      const KrausChannel& channel, const DiscordOptions& opts = {}) {
  if (!is_incoherent(channel)) throw Error(ErrorKind::NotIncoherentChannel, "bound only applies to incoherent channels");
  Theorem3Verdict v;
  const auto product_state = tensor(sigma_a, sigma_b);
  v.coherence_before = c_skew(product_state);
  v.bound = 1.0 - (1.0 - c_skew(sigma_a)) * (1.0 - c_skew(sigma_b));
  v.discord_after = discord_sym(apply(channel, product_state), sigma_a.dim(), sigma_b.dim(), opts);
  v.ok = v.discord_after.value <= v.bound + 1e-6;
  return v;
}

}  // namespace cohlab
