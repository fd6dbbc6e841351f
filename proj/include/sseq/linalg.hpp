#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "sseq/errors.hpp"
#include "sseq/scalar.hpp"

namespace sseq {

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

// All products go through lazyProduct: coefficient-wise evaluation, no blocked
// kernels, safe for any exact scalar.
template <class S>
Mat<S> mul(const Mat<S>& a, const Mat<S>& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
  return a.lazyProduct(b);
}

template <class S>
bool is_zero(const Mat<S>& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != S(0)) return false;
  return true;
}

template <class S>
Mat<S> hstack(const Mat<S>& a, const Mat<S>& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("hstack row mismatch");
  Mat<S> r(a.rows(), a.cols() + b.cols());
  r.leftCols(a.cols()) = a;
  r.rightCols(b.cols()) = b;
  return r;
}

template <class S>
Mat<S> vstack(const Mat<S>& a, const Mat<S>& b) {
  if (a.cols() != b.cols()) throw DimensionMismatch("vstack col mismatch");
  Mat<S> r(a.rows() + b.rows(), a.cols());
  r.topRows(a.rows()) = a;
  r.bottomRows(b.rows()) = b;
  return r;
}

// Reduced row echelon form with deterministic pivoting: scan columns left to
// right, pivot on the topmost nonzero entry at or below the current row.
template <class S>
struct Echelon {
  Mat<S> rref;
  std::vector<Index> pivots;  // pivot column of each pivot row
};

template <class S>
Echelon<S> echelon(Mat<S> m) {
  Echelon<S> e;
  Index row = 0;
  for (Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Index piv = -1;
    for (Index i = row; i < m.rows(); ++i)
      if (m(i, col) != S(0)) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != row) m.row(piv).swap(m.row(row));
    S inv = S(1) / m(row, col);
    for (Index j = col; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (Index i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col) == S(0)) continue;
      S f = m(i, col);
      for (Index j = col; j < m.cols(); ++j) m(i, j) = m(i, j) - f * m(row, j);
    }
    e.pivots.push_back(col);
    ++row;
  }
  e.rref = std::move(m);
  return e;
}

template <class S>
Index rank(const Mat<S>& m) {
  return static_cast<Index>(echelon(m).pivots.size());
}

// Columns form a basis of the null space; empty (cols x 0) matrix when injective.
template <class S>
Mat<S> kernel_basis(const Mat<S>& m) {
  Echelon<S> e = echelon(m);
  Index n = m.cols();
  Index r = static_cast<Index>(e.pivots.size());
  std::vector<bool> is_pivot(n, false);
  for (Index c : e.pivots) is_pivot[static_cast<size_t>(c)] = true;
  Mat<S> k = Mat<S>::Zero(n, n - r);
  Index fi = 0;
  for (Index c = 0; c < n; ++c) {
    if (is_pivot[static_cast<size_t>(c)]) continue;
    k(c, fi) = S(1);
    for (Index pr = 0; pr < r; ++pr) k(e.pivots[static_cast<size_t>(pr)], fi) = -e.rref(pr, c);
    ++fi;
  }
  return k;
}

// Leftmost independent columns of m, as they appear in m.
template <class S>
Mat<S> image_basis(const Mat<S>& m) {
  Echelon<S> e = echelon(m);
  Mat<S> b(m.rows(), static_cast<Index>(e.pivots.size()));
  for (size_t i = 0; i < e.pivots.size(); ++i) b.col(static_cast<Index>(i)) = m.col(e.pivots[i]);
  return b;
}

// Particular solution of Mx = b with free variables set to zero.
template <class S>
std::optional<Vec<S>> solve(const Mat<S>& m, const Vec<S>& b) {
  if (m.rows() != b.rows()) throw DimensionMismatch("solve: rhs length mismatch");
  Echelon<S> e = echelon(hstack<S>(m, b));
  for (Index c : e.pivots)
    if (c == m.cols()) return std::nullopt;  // pivot in the rhs column: inconsistent
  Vec<S> x = Vec<S>::Zero(m.cols());
  for (size_t i = 0; i < e.pivots.size(); ++i)
    x(e.pivots[i]) = e.rref(static_cast<Index>(i), m.cols());
  return x;
}

// Columnwise solve: X with M X = B, or nullopt if some column is unsolvable.
template <class S>
std::optional<Mat<S>> solve_matrix(const Mat<S>& m, const Mat<S>& b) {
  if (m.rows() != b.rows()) throw DimensionMismatch("solve_matrix: rhs rows mismatch");
  Echelon<S> e = echelon(hstack<S>(m, b));
  for (Index c : e.pivots)
    if (c >= m.cols()) return std::nullopt;
  Mat<S> x = Mat<S>::Zero(m.cols(), b.cols());
  for (size_t i = 0; i < e.pivots.size(); ++i)
    x.row(e.pivots[i]) = e.rref.row(static_cast<Index>(i)).rightCols(b.cols());
  return x;
}

template <class S>
bool in_span(const Mat<S>& basis, const Vec<S>& v) {
  return solve<S>(basis, v).has_value();
}

template <class S>
bool is_invertible(const Mat<S>& m) {
  return m.rows() == m.cols() && rank(m) == m.rows();
}

template <class S>
Mat<S> inverse(const Mat<S>& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("inverse of non-square matrix");
  auto x = solve_matrix<S>(m, Mat<S>::Identity(m.rows(), m.rows()));
  if (!x) throw DimensionMismatch("inverse of singular matrix");
  return *x;
}

// Incrementally maintained reduced echelon basis of a subspace.
template <class S>
class IncrementalSpan {
 public:
  explicit IncrementalSpan(Index ambient) : ambient_(ambient) {}

  Index dim() const { return static_cast<Index>(rows_.size()); }

  // Absorbs v if it is independent of the current span; returns whether it was.
  bool add(Vec<S> v) {
    reduce(v);
    Index piv = -1;
    for (Index i = 0; i < ambient_; ++i)
      if (v(i) != S(0)) {
        piv = i;
        break;
      }
    if (piv < 0) return false;
    S inv = S(1) / v(piv);
    for (Index i = piv; i < ambient_; ++i) v(i) = v(i) * inv;
    for (auto& row : rows_)
      if (row(piv) != S(0)) row -= row(piv) * v;
    rows_.push_back(std::move(v));
    pivots_.push_back(piv);
    return true;
  }

  bool contains(Vec<S> v) const {
    reduce(v);
    for (Index i = 0; i < ambient_; ++i)
      if (v(i) != S(0)) return false;
    return true;
  }

 private:
  void reduce(Vec<S>& v) const {
    for (size_t k = 0; k < rows_.size(); ++k) {
      S c = v(pivots_[k]);
      if (c != S(0)) v -= c * rows_[k];
    }
  }

  Index ambient_;
  std::vector<Vec<S>> rows_;
  std::vector<Index> pivots_;
};

// Greedily extend `have` by columns of `from` that are independent modulo the
// span so far; returns the chosen columns only. Deterministic: leftmost first.
template <class S>
Mat<S> extend_basis(const Mat<S>& have, const Mat<S>& from) {
  if (have.cols() > 0 && have.rows() != from.rows())
    throw DimensionMismatch("extend_basis: ambient mismatch");
  IncrementalSpan<S> span(from.rows());
  for (Index c = 0; c < have.cols(); ++c) span.add(have.col(c));
  std::vector<Index> chosen;
  for (Index c = 0; c < from.cols(); ++c)
    if (span.add(from.col(c))) chosen.push_back(c);
  Mat<S> out(from.rows(), static_cast<Index>(chosen.size()));
  for (size_t i = 0; i < chosen.size(); ++i) out.col(static_cast<Index>(i)) = from.col(chosen[i]);
  return out;
}

// Complement of span(sub) inside the ambient coordinate space, spanned by
// standard basis vectors (leftmost-independent choice).
template <class S>
Mat<S> complement_in(const Mat<S>& sub, Index ambient_dim) {
  if (sub.rows() != ambient_dim && sub.cols() != 0)
    throw DimensionMismatch("complement_in: ambient dimension mismatch");
  Mat<S> sub2 = sub.rows() == ambient_dim ? sub : Mat<S>(ambient_dim, 0);
  return extend_basis<S>(sub2, Mat<S>::Identity(ambient_dim, ambient_dim));
}

// Basis of span(a) ∩ span(b).
template <class S>
Mat<S> intersection(const Mat<S>& a, const Mat<S>& b) {
  if (a.rows() != b.rows()) throw DimensionMismatch("intersection: ambient mismatch");
  Mat<S> k = kernel_basis<S>(hstack<S>(a, Mat<S>(-b)));
  Mat<S> inside = mul<S>(a, k.topRows(a.cols()));
  return image_basis(inside);
}

// Basis of {x : m x ∈ span(w)}.
template <class S>
Mat<S> preimage(const Mat<S>& m, const Mat<S>& w) {
  if (m.rows() != w.rows()) throw DimensionMismatch("preimage: ambient mismatch");
  Mat<S> k = kernel_basis<S>(hstack<S>(m, Mat<S>(-w)));
  return image_basis<S>(Mat<S>(k.topRows(m.cols())));
}

template <class S>
Mat<S> sum_basis(const Mat<S>& a, const Mat<S>& b) {
  return image_basis<S>(hstack<S>(a, b));
}

// True iff span(a) ⊆ span(b).
template <class S>
bool subspace_of(const Mat<S>& a, const Mat<S>& b) {
  return solve_matrix<S>(b, a).has_value();
}

}  // namespace sseq
