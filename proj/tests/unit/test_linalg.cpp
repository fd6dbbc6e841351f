#include <doctest.h>

#include "sseq/gen.hpp"
#include "sseq/linalg.hpp"

using namespace sseq;

namespace {

template <class S>
Mat<S> from(std::initializer_list<std::initializer_list<long long>> rows) {
  Mat<S> m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (auto& r : rows) {
    Index j = 0;
    for (long long v : r) m(i, j++) = S(v);
    ++i;
  }
  return m;
}

template <class S>
Mat<S> random_matrix(Rng& rng, Index r, Index c) {
  Mat<S> m(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) m(i, j) = rng.chance(60) ? rng.template scalar<S>() : S(0);
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("rank basics", S, Fp, Rational) {
  Fp::set_modulus(7);
  CHECK(rank<S>(Mat<S>::Identity(2, 2)) == 2);
  CHECK(rank<S>(Mat<S>::Zero(3, 4)) == 0);
}

TEST_CASE("rank of a dependent matrix over F_7") {
  Fp::set_modulus(7);
  CHECK(rank<Fp>(from<Fp>({{1, 2}, {2, 4}})) == 1);
}

TEST_CASE_TEMPLATE("kernel basics", S, Fp, Rational) {
  Fp::set_modulus(7);
  CHECK(kernel_basis<S>(Mat<S>::Identity(3, 3)).cols() == 0);
  Mat<S> zero_map = Mat<S>::Zero(1, 2);  // F^2 -> F
  CHECK(kernel_basis<S>(zero_map).cols() == 2);
  Mat<S> m = from<S>({{1, 2}, {2, 4}});
  Mat<S> k = kernel_basis<S>(m);
  CHECK(k.cols() == 1);
  CHECK(is_zero(Mat<S>(mul<S>(m, k))));
  // spans the line through (2,-1)
  CHECK(k(0, 0) * S(-1) == k(1, 0) * S(2));
  CHECK_FALSE(is_zero(k));
}

TEST_CASE_TEMPLATE("solve basics", S, Fp, Rational) {
  Fp::set_modulus(7);
  Vec<S> b(2);
  b << S(3), S(5);
  auto x = solve<S>(Mat<S>::Identity(2, 2), b);
  REQUIRE(x.has_value());
  CHECK(is_zero(Mat<S>(*x - b)));
  CHECK_FALSE(solve<S>(Mat<S>::Zero(2, 2), b).has_value());
}

TEST_CASE_TEMPLATE("complement extends a subspace to the whole space", S, Fp, Rational) {
  Fp::set_modulus(7);
  Mat<S> sub(2, 1);
  sub << S(1), S(0);
  Mat<S> c = complement_in<S>(sub, 2);
  CHECK(c.cols() == 1);
  CHECK(is_invertible(Mat<S>(hstack<S>(sub, c))));
}

TEST_CASE_TEMPLATE("rank-nullity and solvability on random matrices", S, Fp, Rational) {
  Fp::set_modulus(7);
  Rng rng(2024);
  for (int t = 0; t < 40; ++t) {
    Index r = static_cast<Index>(rng.below(6)), c = static_cast<Index>(rng.below(6));
    Mat<S> m = random_matrix<S>(rng, r, c);
    CHECK(rank(m) + kernel_basis(m).cols() == c);
    CHECK(is_zero(Mat<S>(mul<S>(m, kernel_basis(m)))));
    CHECK(rank(image_basis(m)) == rank(m));
    Vec<S> b(r);
    for (Index i = 0; i < r; ++i) b(i) = rng.template scalar<S>();
    auto x = solve<S>(m, b);
    bool consistent = rank<S>(hstack<S>(m, Mat<S>(b))) == rank(m);
    CHECK(x.has_value() == consistent);
    if (x) CHECK(is_zero(Mat<S>(mul<S>(m, Mat<S>(*x)) - b)));
  }
}

TEST_CASE_TEMPLATE("subspace operations", S, Fp, Rational) {
  Fp::set_modulus(7);
  Rng rng(99);
  for (int t = 0; t < 25; ++t) {
    Index n = 4;
    Mat<S> a = image_basis<S>(random_matrix<S>(rng, n, 3));
    Mat<S> b = image_basis<S>(random_matrix<S>(rng, n, 3));
    Mat<S> cap = intersection<S>(a, b);
    CHECK(subspace_of<S>(cap, a));
    CHECK(subspace_of<S>(cap, b));
    Mat<S> sum = sum_basis<S>(a, b);
    CHECK(subspace_of<S>(a, sum));
    CHECK(sum.cols() == a.cols() + b.cols() - cap.cols());
    Mat<S> m = random_matrix<S>(rng, n, n);
    Mat<S> pre = preimage<S>(m, a);
    CHECK(subspace_of<S>(Mat<S>(mul<S>(m, pre)), a));
  }
}

TEST_CASE("deterministic pivoting: repeated runs agree") {
  Fp::set_modulus(7);
  Rng rng(5);
  Mat<Fp> m = random_matrix<Fp>(rng, 5, 5);
  Echelon<Fp> e1 = echelon(m), e2 = echelon(m);
  CHECK(e1.pivots == e2.pivots);
  CHECK(is_zero(Mat<Fp>(e1.rref - e2.rref)));
}

TEST_CASE("modulus is validated") {
  CHECK_THROWS_AS(Fp::set_modulus(6), DimensionMismatch);
  Fp::set_modulus(7);
}
