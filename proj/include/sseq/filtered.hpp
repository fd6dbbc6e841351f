#pragma once

#include <memory>

#include "sseq/spectral.hpp"

namespace sseq {

// Bounded cochain complex with a bounded increasing filtration in adapted
// form: each basis vector carries its filtration level, and F_p A^n is the
// span of the coordinates with level ≤ p. Levels need not be sorted, which
// lets tensor products and kernels keep their natural coordinate order.
template <class S>
struct FilteredComplex {
  int n_min = 0;
  std::vector<std::vector<int>> levels;  // levels[i] belongs to degree n_min + i
  std::vector<Mat<S>> d;                 // d[i] : degree n_min+i -> n_min+i+1

  int degrees() const { return static_cast<int>(levels.size()); }
  int n_max() const { return n_min + degrees() - 1; }

  Index dim(int n) const {
    int i = n - n_min;
    if (i < 0 || i >= degrees()) return 0;
    return static_cast<Index>(levels[static_cast<size_t>(i)].size());
  }

  const std::vector<int>& levels_at(int n) const {
    static const std::vector<int> empty;
    int i = n - n_min;
    if (i < 0 || i >= degrees()) return empty;
    return levels[static_cast<size_t>(i)];
  }

  Mat<S> dmat(int n) const {
    int i = n - n_min;
    if (i < 0 || i >= degrees()) return Mat<S>::Zero(dim(n + 1), dim(n));
    const Mat<S>& m = d[static_cast<size_t>(i)];
    if (m.rows() == dim(n + 1) && m.cols() == dim(n)) return m;
    return Mat<S>::Zero(dim(n + 1), dim(n));
  }

  int p_min() const {
    bool any = false;
    int v = 0;
    for (auto& ls : levels)
      for (int l : ls) {
        v = any ? std::min(v, l) : l;
        any = true;
      }
    return v;
  }
  int p_max() const {
    bool any = false;
    int v = 0;
    for (auto& ls : levels)
      for (int l : ls) {
        v = any ? std::max(v, l) : l;
        any = true;
      }
    return v;
  }

  // columns of the identity with level ≤ p, as an embedding F_p A^n -> A^n
  Mat<S> filtration_basis(int n, int p) const {
    const auto& ls = levels_at(n);
    Index k = 0;
    for (int l : ls)
      if (l <= p) ++k;
    Mat<S> sel = Mat<S>::Zero(dim(n), k);
    Index at = 0;
    for (Index i = 0; i < dim(n); ++i)
      if (ls[static_cast<size_t>(i)] <= p) sel(i, at++) = S(1);
    return sel;
  }

  friend bool operator==(const FilteredComplex& a, const FilteredComplex& b) {
    int lo = std::min(a.n_min, b.n_min), hi = std::max(a.n_max(), b.n_max());
    for (int n = lo; n <= hi; ++n) {
      if (a.dim(n) != b.dim(n)) return false;
      if (a.levels_at(n) != b.levels_at(n)) return false;
      if (!is_zero(Mat<S>(a.dmat(n) - b.dmat(n)))) return false;
    }
    return true;
  }
};

template <class S>
using FcPtr = std::shared_ptr<const FilteredComplex<S>>;

template <class S>
FcPtr<S> share_fc(FilteredComplex<S> a) {
  return std::make_shared<const FilteredComplex<S>>(std::move(a));
}

template <class S>
ValidationReport validate_filtered(const FilteredComplex<S>& a) {
  for (int n = a.n_min; n <= a.n_max(); ++n) {
    int i = n - a.n_min;
    const Mat<S>& m = a.d[static_cast<size_t>(i)];
    if (m.cols() != a.dim(n) || m.rows() != a.dim(n + 1))
      return ValidationReport::failure("d at degree " + std::to_string(n) + " has wrong shape");
    const auto& src_l = a.levels_at(n);
    const auto& tgt_l = a.levels_at(n + 1);
    for (Index c = 0; c < m.cols(); ++c)
      for (Index r = 0; r < m.rows(); ++r)
        if (m(r, c) != S(0) && tgt_l[static_cast<size_t>(r)] > src_l[static_cast<size_t>(c)])
          return ValidationReport::failure("d does not preserve the filtration at degree " +
                                           std::to_string(n) + ", entry (" + std::to_string(r) + "," +
                                           std::to_string(c) + ")");
    Mat<S> dd = mul<S>(a.dmat(n + 1), a.dmat(n));
    if (!is_zero(dd))
      return ValidationReport::failure("d∘d ≠ 0 at degree " + std::to_string(n));
  }
  return ValidationReport::success();
}

// Morphism of filtered complexes: per-degree matrices, chain and
// filtration-compatible.
template <class S>
struct FcMorphism {
  FcPtr<S> src, tgt;
  int n_min = 0;
  std::vector<Mat<S>> maps;

  Mat<S> map_at(int n) const {
    int i = n - n_min;
    if (i < 0 || i >= static_cast<int>(maps.size())) return Mat<S>::Zero(tgt->dim(n), src->dim(n));
    return maps[static_cast<size_t>(i)];
  }

  static FcMorphism unchecked(FcPtr<S> src, FcPtr<S> tgt, int n_min, std::vector<Mat<S>> maps) {
    FcMorphism f;
    f.src = std::move(src);
    f.tgt = std::move(tgt);
    f.n_min = n_min;
    f.maps = std::move(maps);
    return f;
  }

  ValidationReport validate() const {
    int lo = std::min(src->n_min, tgt->n_min), hi = std::max(src->n_max(), tgt->n_max());
    for (int n = lo; n <= hi; ++n) {
      Mat<S> f = map_at(n);
      if (f.rows() != tgt->dim(n) || f.cols() != src->dim(n))
        return ValidationReport::failure("map at degree " + std::to_string(n) + " has wrong shape");
      const auto& src_l = src->levels_at(n);
      const auto& tgt_l = tgt->levels_at(n);
      for (Index c = 0; c < f.cols(); ++c)
        for (Index r = 0; r < f.rows(); ++r)
          if (f(r, c) != S(0) && tgt_l[static_cast<size_t>(r)] > src_l[static_cast<size_t>(c)])
            return ValidationReport::failure("map is not filtration-compatible at degree " +
                                             std::to_string(n));
      Mat<S> comm = mul<S>(tgt->dmat(n), f) - mul<S>(map_at(n + 1), src->dmat(n));
      if (!is_zero(comm))
        return ValidationReport::failure("map is not a chain map at degree " + std::to_string(n));
    }
    return ValidationReport::success();
  }

  static FcMorphism from_maps(FcPtr<S> src, FcPtr<S> tgt, int n_min, std::vector<Mat<S>> maps) {
    FcMorphism f = unchecked(std::move(src), std::move(tgt), n_min, std::move(maps));
    ValidationReport vr = f.validate();
    if (!vr.ok) throw NotAMorphism(0, "filtered morphism: " + vr.message);
    return f;
  }

  friend FcMorphism compose(const FcMorphism& g, const FcMorphism& f) {
    int lo = std::min(f.src->n_min, g.tgt->n_min);
    int hi = std::max(f.src->n_max(), g.tgt->n_max());
    std::vector<Mat<S>> maps;
    for (int n = lo; n <= hi; ++n) maps.push_back(mul<S>(g.map_at(n), f.map_at(n)));
    return unchecked(f.src, g.tgt, lo, std::move(maps));
  }

  friend bool operator==(const FcMorphism& a, const FcMorphism& b) {
    int lo = std::min(a.n_min, b.n_min);
    int hi = std::max(a.n_min + static_cast<int>(a.maps.size()), b.n_min + static_cast<int>(b.maps.size()));
    for (int n = lo; n <= hi; ++n)
      if (!is_zero(Mat<S>(a.map_at(n) - b.map_at(n)))) return false;
    return true;
  }
};

template <class S>
FcMorphism<S> fc_identity(const FcPtr<S>& a) {
  std::vector<Mat<S>> maps;
  for (int n = a->n_min; n <= a->n_max(); ++n) maps.push_back(Mat<S>::Identity(a->dim(n), a->dim(n)));
  return FcMorphism<S>::unchecked(a, a, a->n_min, std::move(maps));
}

template <class S>
FcMorphism<S> fc_zero(const FcPtr<S>& a, const FcPtr<S>& b) {
  return FcMorphism<S>::unchecked(a, b, 0, {});
}

// ---------------------------------------------------------------------------
// Z_r / B_r page formulas.  Indexing: zr/br at (p, n) live inside A^n, with
// the page placed at bidegree (p, q) for q = n + p.

template <class S>
Mat<S> z_basis(const FilteredComplex<S>& a, int r, int p, int n) {
  if (r == 0) {
    // Z_0 = F_p A^n (d already preserves F_p)
    return a.filtration_basis(n, p);
  }
  Mat<S> f_p = a.filtration_basis(n, p);
  // rows of d with target level > p-r must vanish
  const auto& tgt_l = a.levels_at(n + 1);
  std::vector<Index> bad;
  for (Index i = 0; i < a.dim(n + 1); ++i)
    if (tgt_l[static_cast<size_t>(i)] > p - r) bad.push_back(i);
  Mat<S> sys(static_cast<Index>(bad.size()), f_p.cols());
  Mat<S> df = mul<S>(a.dmat(n), f_p);
  for (size_t i = 0; i < bad.size(); ++i) sys.row(static_cast<Index>(i)) = df.row(bad[i]);
  return mul<S>(f_p, kernel_basis(sys));
}

template <class S>
Mat<S> b_basis(const FilteredComplex<S>& a, int r, int p, int n) {
  if (r == 0) return z_basis(a, 0, p - 1, n);
  Mat<S> first = z_basis(a, r - 1, p - 1, n);
  Mat<S> second = mul<S>(a.dmat(n - 1), z_basis(a, r - 1, p + r - 1, n - 1));
  return sum_basis<S>(first, second);
}

template <class S>
std::pair<Mat<S>, Mat<S>> zr_br(const FilteredComplex<S>& a, int r, int p, int n) {
  Mat<S> z = z_basis(a, r, p, n);
  Mat<S> b = b_basis(a, r, p, n);
  if (!subspace_of<S>(b, z)) throw InternalInvariantViolation("B_r is not contained in Z_r");
  return {std::move(z), std::move(b)};
}

// ---------------------------------------------------------------------------
// The spectral sequence of a filtered complex, with the frames needed to push
// morphisms through E.

template <class S>
struct EFunctorData {
  FcPtr<S> complex;
  SSPtr<S> ss;
  struct Frame {
    Mat<S> reps;   // representatives of the page classes, in A^n coordinates
    Mat<S> frame;  // [reps | B_r basis], for coordinate solves
  };
  std::vector<std::map<Bidegree, Frame>> frames;  // per page

  // class coordinates of v ∈ Z_r at (p,q): the rep part of its frame coords
  Vec<S> class_coords(Index page, Bidegree pq, const Vec<S>& v) const {
    const Frame& fr = frames[static_cast<size_t>(page)].at(pq);
    auto sol = solve<S>(fr.frame, v);
    if (!sol) throw InternalInvariantViolation("vector not in Z_r at " + pq.str());
    return sol->topRows(fr.reps.cols());
  }
};

template <class S>
EFunctorData<S> e_functor(const FcPtr<S>& aptr) {
  const FilteredComplex<S>& a = *aptr;
  EFunctorData<S> out;
  out.complex = aptr;
  int w = a.p_max() - a.p_min();
  int top = w + 1;

  std::vector<RComplex<S>> pages;
  out.frames.resize(static_cast<size_t>(top) + 1);
  for (int r = 0; r <= top; ++r) {
    BigradedModule mod;
    auto& fr_map = out.frames[static_cast<size_t>(r)];
    for (int p = a.p_min(); p <= a.p_max(); ++p)
      for (int n = a.n_min; n <= a.n_max(); ++n) {
        Mat<S> z = z_basis(a, r, p, n);
        Mat<S> b = b_basis(a, r, p, n);
        Mat<S> reps = extend_basis<S>(b, z);
        Bidegree pq{p, n + p};
        mod.set_dim(pq, reps.cols());
        if (reps.cols() > 0 || b.cols() > 0)
          fr_map[pq] = typename EFunctorData<S>::Frame{reps, hstack<S>(reps, b)};
      }
    RComplex<S> page;
    page.module = mod;
    page.r = r;
    Bidegree shift{-r, 1 - r};
    page.differential = BigradedMap<S>(mod, mod, shift);
    for (auto& [pq, dim] : mod.support()) {
      Bidegree tq = pq + shift;
      if (mod.dim(tq) == 0) continue;
      const auto& fr = fr_map.at(pq);
      int n = pq.q - pq.p;
      Mat<S> img = mul<S>(a.dmat(n), fr.reps);
      const auto& tf = fr_map.at(tq);
      auto sol = solve_matrix<S>(tf.frame, img);
      if (!sol) throw InternalInvariantViolation("δ_r[a] ≠ [da] representable at " + pq.str());
      page.differential.set_block(pq, sol->topRows(tf.reps.cols()));
    }
    pages.push_back(std::move(page));
  }

  // characteristic maps: E_{r+1} reps are Z_{r+1}-vectors, hence δ_r-cycles in
  // E_r; their homology classes give the canonical iso E_{r+1} -> H(E_r),
  // inverted blockwise.
  std::vector<HomologyData<S>> homs;
  for (int r = 0; r <= top; ++r) homs.push_back(homology(pages[static_cast<size_t>(r)]));
  std::vector<BigradedMap<S>> psis;
  for (int r = 0; r < top; ++r) {
    BigradedMap<S> psi(homs[static_cast<size_t>(r)].H, pages[static_cast<size_t>(r + 1)].module, {0, 0});
    for (auto& [pq, hdim] : homs[static_cast<size_t>(r)].H.support()) {
      Index ndim = pages[static_cast<size_t>(r + 1)].module.dim(pq);
      if (ndim != hdim)
        throw InternalInvariantViolation("page dims do not stabilize as H at " + pq.str());
      const auto& next_fr = out.frames[static_cast<size_t>(r + 1)].at(pq);
      Mat<S> chi(hdim, ndim);
      for (Index j = 0; j < ndim; ++j) {
        Vec<S> c = out.class_coords(r, pq, Vec<S>(next_fr.reps.col(j)));
        chi.col(j) = mul<S>(homs[static_cast<size_t>(r)].projection.block(pq), Mat<S>(c));
      }
      if (!is_invertible(chi))
        throw InternalInvariantViolation("canonical map E_{r+1} -> H(E_r) not invertible at " + pq.str());
      psi.set_block(pq, inverse(chi));
    }
    psis.push_back(std::move(psi));
  }
  out.ss = make_validated<S>(std::move(pages), std::move(psis), "E of filtered complex");
  return out;
}

template <class S>
SSPtr<S> spectral_sequence(const FcPtr<S>& a) {
  return e_functor(a).ss;
}

template <class S>
SpectralMorphism<S> e_of_morphism(const EFunctorData<S>& ea, const EFunctorData<S>& eb,
                                  const FcMorphism<S>& f) {
  Index k = std::max(ea.ss->top(), eb.ss->top());
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    BigradedMap<S> fm(ea.ss->module_at(m), eb.ss->module_at(m), {0, 0});
    for (auto& [pq, dim] : ea.ss->module_at(m).support()) {
      if (eb.ss->module_at(m).dim(pq) == 0) continue;
      Index page = std::min(m, ea.ss->top());
      Index bpage = std::min(m, eb.ss->top());
      const auto& fra = ea.frames[static_cast<size_t>(page)].at(pq);
      int n = pq.q - pq.p;
      Mat<S> img = mul<S>(f.map_at(n), fra.reps);
      const auto& frb = eb.frames[static_cast<size_t>(bpage)].at(pq);
      auto sol = solve_matrix<S>(frb.frame, img);
      if (!sol) throw InternalInvariantViolation("E(f) lands outside Z_r at " + pq.str());
      fm.set_block(pq, sol->topRows(frb.reps.cols()));
    }
    pages.push_back(std::move(fm));
  }
  return SpectralMorphism<S>::from_pages(ea.ss, eb.ss, std::move(pages));
}

// Fibrations of filtered complexes: Z_0(f) surjective and E_i(f) surjective
// for 0 ≤ i ≤ r.
template <class S>
bool is_fc_fibration(const EFunctorData<S>& ea, const EFunctorData<S>& eb, const FcMorphism<S>& f,
                     int r) {
  const FilteredComplex<S>& a = *f.src;
  const FilteredComplex<S>& b = *f.tgt;
  int pmin = std::min(a.p_min(), b.p_min());
  int pmax = std::max(a.p_max(), b.p_max());
  for (int n = b.n_min; n <= b.n_max(); ++n)
    for (int p = pmin; p <= pmax; ++p) {
      Mat<S> src_sel = a.filtration_basis(n, p);
      Mat<S> tgt_sel = b.filtration_basis(n, p);
      // surjectivity of F_p A^n -> F_p B^n: solve in target coordinates
      Mat<S> restricted = mul<S>(f.map_at(n), src_sel);
      if (!solve_matrix<S>(restricted, tgt_sel).has_value()) return false;
    }
  SpectralMorphism<S> ef = e_of_morphism(ea, eb, f);
  return is_r_fibration(ef, r);
}

template <class S>
bool is_fc_weq(const EFunctorData<S>& ea, const EFunctorData<S>& eb, const FcMorphism<S>& f, int r) {
  return is_Er_quasi_iso(e_of_morphism(ea, eb, f), r);
}

// ---------------------------------------------------------------------------
// Λ_r^FC and the filtered path Λ_r^FC ⊗ B

template <class S>
FcPtr<S> lambda_fc(int r) {
  FilteredComplex<S> a;
  a.n_min = 0;
  a.levels = {{0, 0}, {-r}};
  Mat<S> d0(1, 2);
  d0(0, 0) = S(-1);
  d0(0, 1) = S(1);
  a.d = {d0, Mat<S>::Zero(0, 1)};
  return share_fc(std::move(a));
}

// Λ_r^FC ⊗ B with the convolution filtration; coordinates per degree n are
// (x ∈ B^n, y ∈ B^{n-1} at level -r, z ∈ B^n) and
// D(x,y,z) = (dx, -x - dy + z, dz).
template <class S>
struct FcPath {
  int r = 0;
  FcPtr<S> base;
  FcPtr<S> total;
  FcMorphism<S> iota, d_minus, d_plus;

  Index x_off(int) const { return 0; }
  Index y_off(int n) const { return base->dim(n); }
  Index z_off(int n) const { return base->dim(n) + base->dim(n - 1); }

  // H = (f, h, g) : A -> Λ_r^FC ⊗ B; a filtered morphism iff h is an
  // r-homotopy from f to g
  FcMorphism<S> homotopy_morphism(const FcMorphism<S>& f, const FcMorphism<S>& g,
                                  const std::vector<Mat<S>>& h, int h_n_min) const {
    const FilteredComplex<S>& a = *f.src;
    std::vector<Mat<S>> maps;
    auto h_at = [&](int n) -> Mat<S> {
      int i = n - h_n_min;
      if (i < 0 || i >= static_cast<int>(h.size())) return Mat<S>::Zero(base->dim(n - 1), a.dim(n));
      return h[static_cast<size_t>(i)];
    };
    int lo = std::min(a.n_min, total->n_min);
    int hi = std::max(a.n_max(), total->n_max());
    for (int n = lo; n <= hi; ++n) {
      Mat<S> blk = Mat<S>::Zero(total->dim(n), a.dim(n));
      blk.middleRows(x_off(n), base->dim(n)) = f.map_at(n);
      blk.middleRows(y_off(n), base->dim(n - 1)) = h_at(n);
      blk.middleRows(z_off(n), base->dim(n)) = g.map_at(n);
      maps.push_back(std::move(blk));
    }
    return FcMorphism<S>::from_maps(f.src, total, lo, std::move(maps));
  }
};

template <class S>
FcPath<S> fc_path(int r, const FcPtr<S>& bptr) {
  const FilteredComplex<S>& b = *bptr;
  FcPath<S> out;
  out.r = r;
  out.base = bptr;

  FilteredComplex<S> t;
  t.n_min = b.n_min;
  int degs = b.degrees() + 1;
  for (int i = 0; i < degs; ++i) {
    int n = b.n_min + i;
    std::vector<int> ls;
    for (int l : b.levels_at(n)) ls.push_back(l);
    for (int l : b.levels_at(n - 1)) ls.push_back(l - r);
    for (int l : b.levels_at(n)) ls.push_back(l);
    t.levels.push_back(std::move(ls));
  }
  for (int i = 0; i < degs; ++i) {
    int n = t.n_min + i;
    Index dn = b.dim(n), dn1 = b.dim(n - 1);
    Index rows = b.dim(n + 1) + dn + b.dim(n + 1);
    Mat<S> blk = Mat<S>::Zero(rows, dn + dn1 + dn);
    Index rx = b.dim(n + 1);
    blk.topLeftCorner(rx, dn) = b.dmat(n);
    blk.block(rx, 0, dn, dn) = Mat<S>(-Mat<S>::Identity(dn, dn));
    blk.block(rx, dn, dn, dn1) = Mat<S>(-b.dmat(n - 1));
    blk.block(rx, dn + dn1, dn, dn) = Mat<S>::Identity(dn, dn);
    blk.bottomRightCorner(b.dim(n + 1), dn) = b.dmat(n);
    t.d.push_back(std::move(blk));
  }
  out.total = share_fc(std::move(t));
  {
    ValidationReport vr = validate_filtered(*out.total);
    if (!vr.ok) throw InternalInvariantViolation("fc_path: " + vr.message);
  }

  std::vector<Mat<S>> dm, dp, io;
  for (int n = out.total->n_min; n <= out.total->n_max(); ++n) {
    Index dn = b.dim(n), dn1 = b.dim(n - 1);
    Mat<S> pm = Mat<S>::Zero(dn, dn + dn1 + dn);
    pm.leftCols(dn) = Mat<S>::Identity(dn, dn);
    Mat<S> pp = Mat<S>::Zero(dn, dn + dn1 + dn);
    pp.rightCols(dn) = Mat<S>::Identity(dn, dn);
    Mat<S> ii = Mat<S>::Zero(dn + dn1 + dn, dn);
    ii.topRows(dn) = Mat<S>::Identity(dn, dn);
    ii.bottomRows(dn) = Mat<S>::Identity(dn, dn);
    dm.push_back(std::move(pm));
    dp.push_back(std::move(pp));
    io.push_back(std::move(ii));
  }
  out.d_minus = FcMorphism<S>::from_maps(out.total, bptr, out.total->n_min, std::move(dm));
  out.d_plus = FcMorphism<S>::from_maps(out.total, bptr, out.total->n_min, std::move(dp));
  out.iota = FcMorphism<S>::from_maps(bptr, out.total, out.total->n_min, std::move(io));
  return out;
}

template <class S>
FcPtr<S> tensor_lambda_fc(int r, const FcPtr<S>& b) {
  return fc_path(r, b).total;
}

// dh + hd = g - f and h(F_p) ⊆ F_{p+r}
template <class S>
bool filtered_r_homotopy_check(const std::vector<Mat<S>>& h, int h_n_min, const FcMorphism<S>& f,
                               const FcMorphism<S>& g, int r) {
  const FilteredComplex<S>& a = *f.src;
  const FilteredComplex<S>& b = *f.tgt;
  auto h_at = [&](int n) -> Mat<S> {
    int i = n - h_n_min;
    if (i < 0 || i >= static_cast<int>(h.size())) return Mat<S>::Zero(b.dim(n - 1), a.dim(n));
    return h[static_cast<size_t>(i)];
  };
  int lo = std::min(a.n_min, b.n_min) - 1;
  int hi = std::max(a.n_max(), b.n_max()) + 1;
  for (int n = lo; n <= hi; ++n) {
    Mat<S> hn = h_at(n);
    if (hn.rows() != b.dim(n - 1) || hn.cols() != a.dim(n)) return false;
    const auto& src_l = a.levels_at(n);
    const auto& tgt_l = b.levels_at(n - 1);
    for (Index c = 0; c < hn.cols(); ++c)
      for (Index rr = 0; rr < hn.rows(); ++rr)
        if (hn(rr, c) != S(0) && tgt_l[static_cast<size_t>(rr)] > src_l[static_cast<size_t>(c)] + r)
          return false;
    Mat<S> lhs = mul<S>(b.dmat(n - 1), hn) + mul<S>(h_at(n + 1), a.dmat(n));
    if (!is_zero(Mat<S>(lhs - (g.map_at(n) - f.map_at(n))))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Pullbacks and products of filtered complexes (the category is pre-abelian)

template <class S>
struct FcPullback {
  FcPtr<S> x;
  FcMorphism<S> pi_u, pi_a;
};

template <class S>
FcPullback<S> pullback_fc(const FcMorphism<S>& g, const FcMorphism<S>& p) {
  const FilteredComplex<S>& u = *g.src;
  const FilteredComplex<S>& a = *p.src;
  const FilteredComplex<S>& b = *p.tgt;
  int lo = std::min(u.n_min, a.n_min);
  int hi = std::max(u.n_max(), a.n_max());
  int pmin = std::min(u.p_min(), a.p_min());
  int pmax = std::max(u.p_max(), a.p_max());

  FilteredComplex<S> x;
  x.n_min = lo;
  std::vector<Mat<S>> embeds;
  for (int n = lo; n <= hi; ++n) {
    Index du = u.dim(n), da = a.dim(n);
    Mat<S> sys(b.dim(n), du + da);
    sys.leftCols(du) = g.map_at(n);
    sys.rightCols(da) = Mat<S>(-p.map_at(n));
    // adapted basis of the kernel: sweep filtration levels bottom-up
    IncrementalSpan<S> span(du + da);
    std::vector<int> lv;
    Mat<S> emb(du + da, 0);
    for (int pp = pmin; pp <= pmax; ++pp) {
      std::vector<Index> cols;
      const auto& lu = u.levels_at(n);
      const auto& la = a.levels_at(n);
      for (Index i = 0; i < du; ++i)
        if (lu[static_cast<size_t>(i)] <= pp) cols.push_back(i);
      for (Index i = 0; i < da; ++i)
        if (la[static_cast<size_t>(i)] <= pp) cols.push_back(du + i);
      Mat<S> sel = Mat<S>::Zero(du + da, static_cast<Index>(cols.size()));
      for (size_t i = 0; i < cols.size(); ++i) sel(cols[i], static_cast<Index>(i)) = S(1);
      Mat<S> k = mul<S>(sel, kernel_basis(Mat<S>(mul<S>(sys, sel))));
      for (Index c = 0; c < k.cols(); ++c)
        if (span.add(k.col(c))) {
          emb = hstack<S>(emb, Mat<S>(k.col(c)));
          lv.push_back(pp);
        }
    }
    x.levels.push_back(std::move(lv));
    embeds.push_back(std::move(emb));
  }
  for (int n = lo; n <= hi; ++n) {
    int i = n - lo;
    const Mat<S>& en = embeds[static_cast<size_t>(i)];
    Mat<S> img(u.dim(n + 1) + a.dim(n + 1), en.cols());
    img.topRows(u.dim(n + 1)) = mul<S>(u.dmat(n), Mat<S>(en.topRows(u.dim(n))));
    img.bottomRows(a.dim(n + 1)) = mul<S>(a.dmat(n), Mat<S>(en.bottomRows(a.dim(n))));
    if (n == hi) {
      if (!is_zero(img)) throw InternalInvariantViolation("pullback_fc: kernel not closed under d");
      x.d.push_back(Mat<S>::Zero(0, en.cols()));
      break;
    }
    auto sol = solve_matrix<S>(embeds[static_cast<size_t>(i + 1)], img);
    if (!sol) throw InternalInvariantViolation("pullback_fc: kernel not closed under d");
    x.d.push_back(std::move(*sol));
  }
  FcPullback<S> out;
  out.x = share_fc(std::move(x));
  {
    ValidationReport vr = validate_filtered(*out.x);
    if (!vr.ok) throw InternalInvariantViolation("pullback_fc: " + vr.message);
  }
  std::vector<Mat<S>> mu, ma;
  for (int n = lo; n <= hi; ++n) {
    const Mat<S>& en = embeds[static_cast<size_t>(n - lo)];
    mu.push_back(en.topRows(u.dim(n)));
    ma.push_back(en.bottomRows(a.dim(n)));
  }
  out.pi_u = FcMorphism<S>::from_maps(out.x, g.src, lo, std::move(mu));
  out.pi_a = FcMorphism<S>::from_maps(out.x, p.src, lo, std::move(ma));
  return out;
}

template <class S>
struct FcProduct {
  FcPtr<S> ss;
  FcMorphism<S> proj_a, proj_b, inc_a, inc_b;
};

template <class S>
FcProduct<S> fc_product(const FcPtr<S>& a, const FcPtr<S>& b) {
  int lo = std::min(a->n_min, b->n_min);
  int hi = std::max(a->n_max(), b->n_max());
  FilteredComplex<S> t;
  t.n_min = lo;
  for (int n = lo; n <= hi; ++n) {
    std::vector<int> lv = a->levels_at(n);
    for (int l : b->levels_at(n)) lv.push_back(l);
    t.levels.push_back(std::move(lv));
  }
  for (int n = lo; n <= hi; ++n) {
    Mat<S> blk = Mat<S>::Zero(a->dim(n + 1) + b->dim(n + 1), a->dim(n) + b->dim(n));
    blk.topLeftCorner(a->dim(n + 1), a->dim(n)) = a->dmat(n);
    blk.bottomRightCorner(b->dim(n + 1), b->dim(n)) = b->dmat(n);
    t.d.push_back(std::move(blk));
  }
  FcProduct<S> out;
  out.ss = share_fc(std::move(t));
  std::vector<Mat<S>> pa, pb, ia, ib;
  for (int n = lo; n <= hi; ++n) {
    Index da = a->dim(n), db = b->dim(n);
    Mat<S> mpa = Mat<S>::Zero(da, da + db);
    mpa.leftCols(da) = Mat<S>::Identity(da, da);
    Mat<S> mpb = Mat<S>::Zero(db, da + db);
    mpb.rightCols(db) = Mat<S>::Identity(db, db);
    pa.push_back(mpa);
    pb.push_back(mpb);
    ia.push_back(mpa.transpose());
    ib.push_back(mpb.transpose());
  }
  out.proj_a = FcMorphism<S>::from_maps(out.ss, a, lo, std::move(pa));
  out.proj_b = FcMorphism<S>::from_maps(out.ss, b, lo, std::move(pb));
  out.inc_a = FcMorphism<S>::from_maps(a, out.ss, lo, std::move(ia));
  out.inc_b = FcMorphism<S>::from_maps(b, out.ss, lo, std::move(ib));
  return out;
}

}  // namespace sseq
