#include <catch_amalgamated.hpp>

#include <set>

#include "support.hpp"

using namespace cohlab;
using testing::Gen;
using testing::max_diff;
using Catch::Approx;

namespace {

CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

ErrorKind kind_of(const CMatrix& m) {
  try {
    validate_density(m);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected validate_density to throw");
  return ErrorKind::InvalidArgument;
}

CVector ket(std::initializer_list<Complex> xs) {
  CVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

// Partial trace by explicit multi-index loops over three subsystems, keeping {0, 2}.
CMatrix trace_middle(const CMatrix& m, int d0, int d1, int d2) {
  CMatrix out = CMatrix::Zero(d0 * d2, d0 * d2);
  for (int a = 0; a < d0; ++a)
    for (int c = 0; c < d2; ++c)
      for (int a2 = 0; a2 < d0; ++a2)
        for (int c2 = 0; c2 < d2; ++c2)
          for (int b = 0; b < d1; ++b)
            out(a * d2 + c, a2 * d2 + c2) += m((a * d1 + b) * d2 + c, (a2 * d1 + b) * d2 + c2);
  return out;
}

}  // namespace

TEST_CASE("validation accepts states and names the first broken property") {
  CHECK_NOTHROW(validate_density(mat2(0.5, 0, 0, 0.5)));
  CHECK_NOTHROW(appendix_a_fixture().rho);
  CHECK(kind_of(mat2(0.7, 0, 0, 0.4)) == ErrorKind::NotUnitTrace);
  CHECK(kind_of(mat2(0.5, 0.1, 0.2, 0.5)) == ErrorKind::NotHermitian);
  CHECK(kind_of(mat2(1.2, 0, 0, -0.2)) == ErrorKind::NotPSD);
  CHECK(kind_of(CMatrix::Zero(2, 3)) == ErrorKind::NotSquare);
}

TEST_CASE("tiny negative eigenvalues are clipped and the spectrum renormalized") {
  const auto rho = validate_density(mat2(1.0 + 5e-10, 0, 0, -5e-10));
  CHECK(rho.spectrum().eigenvalues.minCoeff() >= 0.0);
  CHECK(rho.spectrum().eigenvalues.sum() == Approx(1.0).margin(1e-15));
  CHECK(rho.matrix().trace().real() == Approx(1.0).margin(1e-15));
}

TEST_CASE("eigh returns descending eigenvalues") {
  const auto s = eigh(diagonal_density({0.3, 0.7}));
  CHECK(s.eigenvalues(0) == Approx(0.7));
  CHECK(s.eigenvalues(1) == Approx(0.3));

  const auto plus = pure_density(ket({1, 1}));
  CHECK(plus.spectrum().eigenvalues(0) == Approx(1.0));
  CHECK(plus.spectrum().eigenvalues(1) == Approx(0.0).margin(1e-15));
  CHECK(plus.spectrum().rank() == 1);
}

TEST_CASE("eigenvalues of Ginibre states are a probability vector") {
  for (int i = 0; i < 1000; ++i) {
    Gen g(11, i);
    const auto rho = g.mixed(4);
    INFO("case " << i);
    CHECK(rho.spectrum().eigenvalues.minCoeff() >= 0.0);
    CHECK(rho.spectrum().eigenvalues.sum() == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("sqrtm examples") {
  const CMatrix s = sqrtm(diagonal_density({0.25, 0.75}));
  CHECK(max_diff(s, mat2(0.5, 0, 0, std::sqrt(0.75))) < 1e-14);

  const auto psi = pure_density(ket({Complex(0.6, 0.0), Complex(0.0, 0.8)}));
  CHECK(max_diff(sqrtm(psi), psi.matrix()) < 1e-12);

  const auto a = appendix_a_fixture().rho;
  const CMatrix r = sqrtm(a);
  CHECK(max_diff(r * r, a.matrix()) < 1e-8);
}

TEST_CASE("sqrtm squares back to the state") {
  for (int i = 0; i < 100; ++i) {
    Gen g(12, i);
    const int d = g.dim(2, 9);
    const auto rho = (i % 2 == 0) ? g.mixed(d) : g.low_rank(d);
    const CMatrix r = sqrtm(rho);
    INFO("case " << i << " dim " << d);
    CHECK(max_diff(r * r, rho.matrix()) < 1e-8);
    CHECK(hermiticity_defect(r) < 1e-12);
  }
}

TEST_CASE("tensor products") {
  const auto zero = diagonal_density({1, 0});
  const CMatrix z = tensor(zero, zero).matrix();
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 1;
  CHECK(max_diff(z, expected) < 1e-15);

  const auto plus = pure_density(ket({1, 1}));
  CHECK(max_diff(tensor(plus, plus).matrix(), CMatrix::Constant(4, 4, 0.25)) < 1e-15);

  const auto q = maximally_coherent(3);
  CHECK(max_diff(tensor(q, q).matrix(), CMatrix::Constant(9, 9, 1.0 / 9.0)) < 1e-15);
}

TEST_CASE("partial trace examples") {
  const auto bell = pure_density(ket({1, 0, 0, 1}));
  CHECK(max_diff(partial_trace(bell, {2, 2}, {0}).matrix(), 0.5 * CMatrix::Identity(2, 2)) < 1e-15);

  Gen g(13, 0);
  const auto a = g.mixed(2), b = g.mixed(3);
  CHECK(max_diff(partial_trace(tensor(a, b), {2, 3}, {0}).matrix(), a.matrix()) < 1e-12);
  CHECK(max_diff(partial_trace(tensor(a, b), {2, 3}, {1}).matrix(), b.matrix()) < 1e-12);

  const auto psi = pure_density(CVector::Constant(9, 1.0));
  const auto [ra, rb] = marginals(psi, 3, 3);
  CHECK(max_diff(ra.matrix(), CMatrix::Constant(3, 3, 1.0 / 3.0)) < 1e-14);
  CHECK(max_diff(rb.matrix(), CMatrix::Constant(3, 3, 1.0 / 3.0)) < 1e-14);
}

TEST_CASE("partial trace agrees with explicit index loops") {
  for (int i = 0; i < 50; ++i) {
    Gen g(14, i);
    const int d0 = g.dim(1, 3), d1 = g.dim(2, 3), d2 = g.dim(1, 3);
    const auto rho = g.mixed(Dims{d0, d1, d2});
    const CMatrix pt = partial_trace_matrix(rho.matrix(), {d0, d1, d2}, {2, 0});
    INFO("case " << i);
    CHECK(max_diff(pt, trace_middle(rho.matrix(), d0, d1, d2)) < 1e-13);
  }
}

TEST_CASE("partial trace of a tensor product returns the factor") {
  for (int i = 0; i < 100; ++i) {
    Gen g(15, i);
    const int da = g.dim(2, 4), db = g.dim(2, 4);
    const auto a = g.mixed(da), b = g.mixed(db);
    const auto kept = partial_trace(tensor(a, b), {da, db}, {0});
    INFO("case " << i);
    CHECK(max_diff(kept.matrix(), a.matrix()) < 1e-10);

    const auto joint = g.mixed(Dims{da, db});
    CHECK(partial_trace_matrix(joint.matrix(), {da, db}, {1}).trace().real() == Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("spectrum is invariant under Haar unitary conjugation") {
  for (int i = 0; i < 100; ++i) {
    Gen g(16, i);
    const int d = g.dim(2, 6);
    const auto rho = g.mixed(d);
    const auto rotated = conjugate(rho, g.unitary(d));
    INFO("case " << i);
    CHECK((rho.spectrum().eigenvalues - rotated.spectrum().eigenvalues).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("random states are reproducible from their seed") {
  const RandomStateSpec spec{{2, 3}, 42, RandomStateSpec::Kind::MixedGinibre};
  CHECK(max_diff(random_state(spec).matrix(), random_state(spec).matrix()) == 0.0);
  const RandomStateSpec other{{2, 3}, 43, RandomStateSpec::Kind::MixedGinibre};
  CHECK(max_diff(random_state(spec).matrix(), random_state(other).matrix()) > 1e-3);

  const auto pure = random_state({{3, 3}, 7, RandomStateSpec::Kind::PureHaar});
  CHECK(pure.dim() == 9);
  CHECK(pure.spectrum().rank() == 1);

  CHECK_THROWS_AS(random_state({{1}, 0, RandomStateSpec::Kind::MixedGinibre}), Error);
}

TEST_CASE("two-qubit Ginibre samples are valid states") {
  for (int i = 0; i < 1000; ++i) {
    const auto rho = random_state({{2, 2}, child_seed(17, i), RandomStateSpec::Kind::MixedGinibre});
    CHECK_NOTHROW(validate_density(rho.matrix()));
  }
}

TEST_CASE("random unitaries are unitary") {
  for (int d = 1; d <= 8; ++d) CHECK(unitarity_defect(random_unitary(d, std::uint64_t(d))) < 1e-12);
}

TEST_CASE("child seeds are distinct and stable") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(child_seed(5, i));
  CHECK(seen.size() == 10000);
  CHECK(child_seed(5, 3) == child_seed(5, 3));
  CHECK(child_seed(5, 3) != child_seed(6, 3));

  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a() == b());
}

TEST_CASE("uniform draws have the right first two moments") {
  Rng rng(2024);
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    s += u;
    s2 += u * u;
  }
  CHECK(s / n == Approx(0.5).margin(5e-3));
  CHECK(s2 / n - (s / n) * (s / n) == Approx(1.0 / 12.0).margin(5e-3));
}

TEST_CASE("parallel_map keeps index order for any thread count") {
  auto square = [](std::size_t i) { return static_cast<long long>(i * i); };
  const auto one = parallel_map(1000, 1, square);
  const auto four = parallel_map(1000, 4, square);
  CHECK(one == four);
  CHECK(one[999] == 999LL * 999LL);

  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) -> int {
                                 if (i == 7) throw Error(ErrorKind::InvalidArgument, "boom");
                                 return 0;
                               }),
                  Error);
}

TEST_CASE("error kinds print their names") {
  CHECK(std::string(to_string(ErrorKind::ParseError)) == "ParseError");
  CHECK(std::string(to_string(ErrorKind::NotUnitTrace)) == "NotUnitTrace");
  const Error e(ErrorKind::NotPSD, "bad");
  CHECK(e.kind() == ErrorKind::NotPSD);
}
