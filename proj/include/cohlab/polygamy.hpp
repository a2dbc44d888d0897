#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "cohlab/coherence.hpp"
#include "cohlab/density.hpp"
#include "cohlab/parallel.hpp"

namespace cohlab {

/// Sums over the rank-r eigenstates |psi_i> of rho of C(Tr_rest |psi_i><psi_i|),
/// once for the subsystems in `left` and once for those in `right`.
struct EigenstateMarginals {
  double sum_left = 0.0;
  double sum_right = 0.0;
};

inline EigenstateMarginals eigenstate_marginal_sums(const DensityMatrix& rho, const Dims& dims,
                                                    const std::vector<int>& left, const std::vector<int>& right) {
  const Spectrum& s = rho.spectrum();
  EigenstateMarginals out;
  for (int i = 0; i < s.rank(); ++i) {
    const CVector v = s.eigenvectors.col(i);
    const CMatrix proj = v * v.adjoint();
    out.sum_left += c_skew(validate_density(partial_trace_matrix(proj, dims, left)));
    out.sum_right += c_skew(validate_density(partial_trace_matrix(proj, dims, right)));
  }
  return out;
}

/// Marginal and joint coherences of one bipartite state together with every
/// quantity entering the mixed-state polygamy inequalities.
struct PolygamyRecord {
  int dim_a = 0;
  int dim_b = 0;
  double c_joint = 0.0;
  double c_a = 0.0;
  double c_b = 0.0;
  double gap_pure_form = 0.0;  // (1 - c_a)(1 - c_b) - (1 - c_joint)
  double lambda_min = 0.0;
  int rank = 0;
  double eig_marginal_sum_a = 0.0;
  double eig_marginal_sum_b = 0.0;
  double c_s = 0.0;
  double diag_sq_sum = 0.0;      // sum_{kk'} <kk'|rho|kk'>^2
  double purity = 0.0;
  double c_l2 = 0.0;
  std::vector<double> eigenvalues;

  // Mixed-state gaps, each non-negative when the inequality holds.
  double gap_marginals_vs_diag = 0.0;   // (1-c_a)(1-c_b) - diag_sq_sum
  double gap_diag_vs_lambda = 0.0;      // diag_sq_sum - lambda_min (1 - c_joint)
  double gap_rank_form_a = 0.0;         // (1-c_a)(r - sum_i C(rho_Bi)) - (1 - c_joint)
  double gap_rank_form_b = 0.0;         // (r - sum_i C(rho_Ai))(1-c_b) - (1 - c_joint)
  double gap_symmetric = 0.0;           // (1-c_a)(1-c_b) - (1 - c_joint)^2 / c_s

  double min_corollary1_gap() const {
    return std::min({gap_marginals_vs_diag, gap_diag_vs_lambda, gap_rank_form_a, gap_rank_form_b, gap_symmetric});
  }
  bool corollary1_holds(double slack = 1e-9) const { return min_corollary1_gap() >= -slack; }
  bool pure_form_violated(double slack = 0.0) const { return gap_pure_form < -slack; }
};

inline PolygamyRecord corollary1_record(const DensityMatrix& rho, int dim_a, int dim_b) {
  if (dim_a < 1 || dim_b < 1 || dim_a * dim_b != rho.dim())
    throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not match the state");
  const Dims dims{dim_a, dim_b};
  const auto [rho_a, rho_b] = marginals(rho, dim_a, dim_b);

  PolygamyRecord r;
  r.dim_a = dim_a;
  r.dim_b = dim_b;
  r.c_joint = c_skew(rho);
  r.c_a = c_skew(rho_a);
  r.c_b = c_skew(rho_b);
  r.gap_pure_form = (1.0 - r.c_a) * (1.0 - r.c_b) - (1.0 - r.c_joint);
  r.rank = rho.spectrum().rank();
  r.lambda_min = rho.spectrum().lambda_min();
  const RVector& ev = rho.spectrum().eigenvalues;
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());

  const auto sums = eigenstate_marginal_sums(rho, dims, {0}, {1});
  r.eig_marginal_sum_a = sums.sum_left;
  r.eig_marginal_sum_b = sums.sum_right;
  r.c_s = (r.rank - r.eig_marginal_sum_a) * (r.rank - r.eig_marginal_sum_b);

  r.diag_sq_sum = rho.matrix().diagonal().cwiseAbs2().sum();
  r.purity = rho.purity();
  r.c_l2 = c_l2(rho);

  const double one_minus = 1.0 - r.c_joint;
  const double marg = (1.0 - r.c_a) * (1.0 - r.c_b);
  r.gap_marginals_vs_diag = marg - r.diag_sq_sum;
  r.gap_diag_vs_lambda = r.diag_sq_sum - r.lambda_min * one_minus;
  r.gap_rank_form_a = (1.0 - r.c_a) * (r.rank - r.eig_marginal_sum_b) - one_minus;
  r.gap_rank_form_b = (r.rank - r.eig_marginal_sum_a) * (1.0 - r.c_b) - one_minus;
  r.gap_symmetric = marg - one_minus * one_minus / r.c_s;
  return r;
}

/// [1 - C(rho_A)][1 - C(rho_B)] - [1 - C(|Psi>)] for a pure bipartite state.
inline double theorem2_gap(const DensityMatrix& psi, int dim_a, int dim_b) {
  if (!psi.is_pure()) throw Error(ErrorKind::NotPure, "pure-state polygamy needs a rank-one state");
  if (dim_a * dim_b != psi.dim()) throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not match the state");
  const auto [rho_a, rho_b] = marginals(psi, dim_a, dim_b);
  return (1.0 - c_skew(rho_a)) * (1.0 - c_skew(rho_b)) - (1.0 - c_skew(psi));
}

// ---------------------------------------------------------------------------
// Multipartite composition

/// Binary tree of bipartitions. A node lists the subsystems it covers; an internal
/// node has exactly two children whose subsystem sets partition it.
struct PartitionTree {
  std::vector<int> parties;
  std::vector<PartitionTree> children;

  static PartitionTree leaf(std::vector<int> parties) { return {std::move(parties), {}}; }
  static PartitionTree split(PartitionTree left, PartitionTree right) {
    PartitionTree t;
    t.parties = left.parties;
    t.parties.insert(t.parties.end(), right.parties.begin(), right.parties.end());
    std::sort(t.parties.begin(), t.parties.end());
    t.children.push_back(std::move(left));
    t.children.push_back(std::move(right));
    return t;
  }

  bool is_leaf() const { return children.empty(); }
};

inline void validate_partition(const PartitionTree& node) {
  if (node.parties.empty()) throw Error(ErrorKind::BadPartition, "empty partition node");
  if (node.is_leaf()) return;
  if (node.children.size() != 2) throw Error(ErrorKind::BadPartition, "internal nodes must split in two");
  std::vector<int> joined = node.children[0].parties;
  joined.insert(joined.end(), node.children[1].parties.begin(), node.children[1].parties.end());
  std::sort(joined.begin(), joined.end());
  std::vector<int> own = node.parties;
  std::sort(own.begin(), own.end());
  if (joined != own || std::adjacent_find(joined.begin(), joined.end()) != joined.end())
    throw Error(ErrorKind::BadPartition, "children do not partition their parent");
  for (const auto& c : node.children) validate_partition(c);
}

struct Corollary2Leaf {
  std::vector<int> parties;
  double coherence = 0.0;
  double exponent = 1.0;  // n_i
};

struct Corollary2Result {
  double one_minus_c_total = 0.0;
  double lhs_product = 0.0;   // prod_i [1 - C(rho_alpha_i)]
  double lhs_weighted = 0.0;  // prod_i [1 - C(rho_alpha_i)]^{n_i}
  double lambda_m = 1.0;
  double c_st = 1.0;
  std::vector<Corollary2Leaf> leaves;
  bool ok_lambda_form = false;
  bool ok_symmetric_form = false;

  double gap_lambda_form() const { return lhs_product - lambda_m * one_minus_c_total; }
  double gap_symmetric_form() const { return lhs_weighted - one_minus_c_total * one_minus_c_total / c_st; }
};

namespace detail {

inline std::vector<int> positions_in(const std::vector<int>& subset, const std::vector<int>& sorted_parent) {
  std::vector<int> pos;
  for (int p : subset)
    pos.push_back(static_cast<int>(std::lower_bound(sorted_parent.begin(), sorted_parent.end(), p) - sorted_parent.begin()));
  return pos;
}

// Walks the tree. Every internal node contributes its lambda_min to lambda_M
// and c_s^{weight} to c_sT; weight halves per level because substituting a child's
// symmetric inequality replaces [1 - C(child)] by sqrt(c_s * product of grandchildren).
inline void corollary2_walk(const DensityMatrix& rho, const Dims& dims, const PartitionTree& node, double weight,
                            Corollary2Result& out) {
  std::vector<int> parties = node.parties;
  std::sort(parties.begin(), parties.end());
  const DensityMatrix local = parties.size() == dims.size() ? rho : partial_trace(rho, dims, parties);

  if (node.is_leaf()) {
    out.leaves.push_back({parties, c_skew(local), weight * 2.0 > 1.0 ? 1.0 : weight * 2.0});
    return;
  }
  Dims local_dims;
  for (int p : parties) local_dims.push_back(dims[p]);
  const auto left = positions_in(node.children[0].parties, parties);
  const auto right = positions_in(node.children[1].parties, parties);

  const int r = local.spectrum().rank();
  out.lambda_m *= local.spectrum().lambda_min();
  const auto sums = eigenstate_marginal_sums(local, local_dims, left, right);
  const double c_s = (r - sums.sum_left) * (r - sums.sum_right);
  out.c_st *= std::pow(c_s, weight);

  for (const auto& child : node.children) corollary2_walk(rho, dims, child, weight * 0.5, out);
}

}  // namespace detail

/// Multipartite polygamy check for a given composition tree.
inline Corollary2Result corollary2_check(const DensityMatrix& rho, const Dims& dims, const PartitionTree& tree,
                                         double slack = 1e-9) {
  if (product(dims) != rho.dim()) throw Error(ErrorKind::DimensionMismatch, "subsystem dimensions do not match the state");
  validate_partition(tree);
  std::vector<int> all(dims.size());
  std::iota(all.begin(), all.end(), 0);
  if (tree.parties != all) throw Error(ErrorKind::BadPartition, "root must cover every subsystem");

  Corollary2Result out;
  out.one_minus_c_total = 1.0 - c_skew(rho);
  detail::corollary2_walk(rho, dims, tree, 1.0, out);
  out.lhs_product = 1.0;
  out.lhs_weighted = 1.0;
  for (const auto& leaf : out.leaves) {
    out.lhs_product *= 1.0 - leaf.coherence;
    out.lhs_weighted *= std::pow(1.0 - leaf.coherence, leaf.exponent);
  }
  out.ok_lambda_form = out.gap_lambda_form() >= -slack;
  out.ok_symmetric_form = out.gap_symmetric_form() >= -slack;
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps

struct PolygamySummary {
  std::size_t samples = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  double mean_gap = 0.0;
  std::size_t pure_form_violations = 0;
  std::size_t corollary1_violations = 0;
  double min_corollary1_gap = std::numeric_limits<double>::infinity();
};

inline PolygamySummary summarize(const std::vector<PolygamyRecord>& records, double slack = 1e-9) {
  PolygamySummary s;
  s.samples = records.size();
  double total = 0.0;
  for (const auto& r : records) {
    s.min_gap = std::min(s.min_gap, r.gap_pure_form);
    total += r.gap_pure_form;
    if (r.pure_form_violated()) ++s.pure_form_violations;
    if (!r.corollary1_holds(slack)) ++s.corollary1_violations;
    s.min_corollary1_gap = std::min(s.min_corollary1_gap, r.min_corollary1_gap());
  }
  if (!records.empty()) s.mean_gap = total / static_cast<double>(records.size());
  return s;
}

/// Records of n_samples Ginibre states on C^dim_a x C^dim_b; sample i uses
/// child_seed(seed, i), so the output is independent of the thread count.
inline std::vector<PolygamyRecord> polygamy_sweep(int dim_a, int dim_b, std::size_t n_samples, std::uint64_t seed,
                                                  unsigned threads = 1) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "sweep needs at least one sample");
  return parallel_map(n_samples, threads, [&](std::size_t i) {
    const auto rho = random_state({{dim_a, dim_b}, child_seed(seed, i), RandomStateSpec::Kind::MixedGinibre});
    return corollary1_record(rho, dim_a, dim_b);
  });
}

inline const char* polygamy_csv_header() {
  return "sample,dimA,dimB,c12,c1,c2,gap,lambda_min,rank,cs,gap_cor1_sym";
}

inline void write_polygamy_csv_row(std::ostream& os, std::size_t sample, const PolygamyRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%zu,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%d,%.12g,%.12g", sample, r.dim_a, r.dim_b,
                r.c_joint, r.c_a, r.c_b, r.gap_pure_form, r.lambda_min, r.rank, r.c_s, r.gap_symmetric);
  os << buf << '\n';
}

// ---------------------------------------------------------------------------
// Two-qubit mixture violating the pure-state form

struct AppendixDFixture {
  CVector psi1;  // renormalized
  CVector psi2;  // renormalized
  double p = 0.0443;
  double overlap = 0.0;  // |<psi1|psi2>| after renormalization
  DensityMatrix rho;

  static constexpr double c1_published = 0.2582;
  static constexpr double c2_published = 0.0909;
  static constexpr double c12_published = 0.3242;
  static constexpr double product_published = 0.6744;
  static constexpr double one_minus_c12_published = 0.6758;
};

inline DensityMatrix mixture_of_two(double p, const CVector& a, const CVector& b) {
  const CVector ua = a / a.norm();
  const CVector ub = b / b.norm();
  return validate_density(p * ua * ua.adjoint() + (1.0 - p) * ub * ub.adjoint());
}

/// The second entry of psi1 is printed as -0.982; only -0.0982 gives a unit vector
/// orthogonal to psi2 as stated, and it reproduces the published coherences.
inline AppendixDFixture appendix_d_fixture() {
  CVector psi1(4), psi2(4);
  psi1 << -0.5612, -0.0982, 0.8119, 0.1272;
  psi2 << 0.8006, 0.1842, 0.5556, 0.1283;
  psi1 /= psi1.norm();
  psi2 /= psi2.norm();
  const double p = 0.0443;
  const double overlap = std::abs(psi1.dot(psi2));
  return AppendixDFixture{psi1, psi2, p, overlap, mixture_of_two(p, psi1, psi2)};
}

struct TargetedSearchResult {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  std::size_t argmin = 0;
};

/// Randomly perturbs the two-qubit counterexample (vectors and weight, relative scale
/// `spread`) and counts pure-form violations. Sample 0 is the unperturbed fixture.
inline TargetedSearchResult targeted_violation_search(std::size_t n_samples, std::uint64_t seed, double spread = 0.05) {
  const auto base = appendix_d_fixture();
  TargetedSearchResult res;
  for (std::size_t i = 0; i < n_samples; ++i) {
    Rng rng(child_seed(seed, i));
    CVector a = base.psi1, b = base.psi2;
    double p = base.p;
    if (i > 0) {
      a += spread * complex_gaussian(4, 1, rng).col(0);
      b += spread * complex_gaussian(4, 1, rng).col(0);
      p = std::clamp(p * (1.0 + spread * rng.normal()), 0.0, 1.0);
    }
    const auto rec = corollary1_record(mixture_of_two(p, a, b), 2, 2);
    ++res.samples;
    if (rec.pure_form_violated()) ++res.violations;
    if (rec.gap_pure_form < res.min_gap) {
      res.min_gap = rec.gap_pure_form;
      res.argmin = i;
    }
  }
  return res;
}

}  // namespace cohlab
