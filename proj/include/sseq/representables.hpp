#pragma once

#include <set>

#include "sseq/spectral.hpp"

namespace sseq {

// D_r(p,n): R at (p,n) and (p-r, n+1-r), identity differential at page r,
// zero from page r+1 on.
template <class S>
SSPtr<S> disk(int r, int p, int n) {
  if (r < 0) throw DimensionMismatch("disk: r must be >= 0");
  Bidegree x{p, n};
  Bidegree y{p - r, n + 1 - r};
  BigradedModule m;
  m.set_dim(x, 1);
  m.set_dim(y, 1);
  std::vector<RComplex<S>> pages;
  for (int i = 0; i < r; ++i) pages.push_back(RComplex<S>::with_zero_differential(m, i));
  RComplex<S> pr;
  pr.module = m;
  pr.r = r;
  pr.differential = BigradedMap<S>(m, m, {-r, 1 - r});
  pr.differential.set_block(x, Mat<S>::Identity(1, 1));
  pages.push_back(pr);
  pages.push_back(RComplex<S>::with_zero_differential({}, r + 1));

  std::vector<BigradedMap<S>> psis;
  for (int i = 0; i < r; ++i) psis.push_back(BigradedMap<S>::identity(m));
  psis.push_back(BigradedMap<S>(homology(pr).H, BigradedModule{}, {0, 0}));
  return make_validated<S>(std::move(pages), std::move(psis), "disk");
}

// S_r(p,n) = D_{r-1}(p-1,n-1) ⊕ D_{r-1}(p+r-1,n+r-2), r >= 1.
template <class S>
ProductResult<S> sphere_product(int r, int p, int n) {
  if (r < 1) throw DimensionMismatch("sphere: r must be >= 1");
  return product(disk<S>(r - 1, p - 1, n - 1), disk<S>(r - 1, p + r - 1, n + r - 2));
}

template <class S>
SSPtr<S> sphere(int r, int p, int n) {
  return sphere_product<S>(r, p, n).ss;
}

// φ_r : D_r(p,n) -> S_r(p,n), the identity on R wherever bigradedly defined.
template <class S>
SpectralMorphism<S> varphi(int r, int p, int n) {
  SSPtr<S> d = disk<S>(r, p, n);
  SSPtr<S> s = sphere<S>(r, p, n);
  BigradedMap<S> f0(d->module_at(0), s->module_at(0), {0, 0});
  for (auto& [pq, dim] : d->module_at(0).support())
    if (s->module_at(0).dim(pq) == 1) f0.set_block(pq, Mat<S>::Identity(1, 1));
  return SpectralMorphism<S>::derive(f0, d, s);
}

// D_r^{p,n}(A): pairs of compatible sequences (a_0..a_r at (p,n); b_0..b_r at
// (p-r, n+1-r)) with d_r a_r = b_r, as the kernel of an explicit linear
// system in the concatenated page coordinates.
template <class S>
struct DiskSpace {
  int r = 0, p = 0, n = 0;
  std::vector<Index> a_dims, b_dims;  // page dims at the two bidegrees, 0..r
  Index total = 0;
  Mat<S> basis;  // total x dim

  Index dim() const { return basis.cols(); }

  Index a_offset(Index m) const {
    Index o = 0;
    for (Index i = 0; i < m; ++i) o += a_dims[static_cast<size_t>(i)];
    return o;
  }
  Index b_offset(Index m) const {
    Index o = a_offset(static_cast<Index>(a_dims.size()));
    for (Index i = 0; i < m; ++i) o += b_dims[static_cast<size_t>(i)];
    return o;
  }
};

template <class S>
DiskSpace<S> disk_space(int r, int p, int n, const SpectralSequence<S>& a) {
  DiskSpace<S> ds;
  ds.r = r;
  ds.p = p;
  ds.n = n;
  Bidegree x{p, n};
  Bidegree y{p - r, n + 1 - r};
  for (int m = 0; m <= r; ++m) {
    ds.a_dims.push_back(a.module_at(m).dim(x));
    ds.b_dims.push_back(a.module_at(m).dim(y));
  }
  ds.total = ds.b_offset(r + 1);

  std::vector<Vec<S>> rows;
  auto add_rows = [&](const Mat<S>& coeffs, Index col_at) {
    for (Index i = 0; i < coeffs.rows(); ++i) {
      Vec<S> row = Vec<S>::Zero(ds.total);
      for (Index j = 0; j < coeffs.cols(); ++j) row(col_at + j) = coeffs(i, j);
      rows.push_back(std::move(row));
    }
  };
  auto add_transition = [&](Bidegree pq, Index m, Index at_m, Index at_next) {
    // d_m a_m = 0 and a_{m+1} = ψ_m(proj_m(a_m)), written as linear rows
    const RComplex<S>& page = a.page(m);
    add_rows(page.differential.block(pq), at_m);
    Mat<S> step = mul<S>(a.charmap(m).block(pq),
                         a.homology_at(m).projection.block(pq));
    Index dim_next = a.module_at(m + 1).dim(pq);
    Mat<S> rowblk(dim_next, ds.total);
    rowblk.setZero();
    // -a_{m+1} + step(a_m) = 0
    for (Index i = 0; i < dim_next; ++i) rowblk(i, at_next + i) = S(-1);
    for (Index i = 0; i < step.rows(); ++i)
      for (Index j = 0; j < step.cols(); ++j) rowblk(i, at_m + j) += step(i, j);
    for (Index i = 0; i < rowblk.rows(); ++i) rows.push_back(rowblk.row(i).transpose());
  };

  for (int m = 0; m < r; ++m) {
    add_transition(x, m, ds.a_offset(m), ds.a_offset(m + 1));
    add_transition(y, m, ds.b_offset(m), ds.b_offset(m + 1));
  }
  {
    // d_r a_r = b_r
    Mat<S> d = a.page(r).differential.block(x);
    Index rrows = d.rows();  // = dim at y on page r
    Mat<S> rowblk = Mat<S>::Zero(rrows, ds.total);
    for (Index i = 0; i < rrows; ++i) {
      for (Index j = 0; j < d.cols(); ++j) rowblk(i, ds.a_offset(r) + j) = d(i, j);
      rowblk(i, ds.b_offset(r) + i) -= S(1);
    }
    for (Index i = 0; i < rrows; ++i) rows.push_back(rowblk.row(i).transpose());
  }

  Mat<S> sys(static_cast<Index>(rows.size()), ds.total);
  for (size_t i = 0; i < rows.size(); ++i) sys.row(static_cast<Index>(i)) = rows[i].transpose();
  ds.basis = kernel_basis(sys);
  return ds;
}

// The represented bijection Hom(D_r(p,n), A) ≅ D_r^{p,n}(A): a disk-space
// element gives generator values on every page; pages above r map to zero.
template <class S>
SpectralMorphism<S> disk_morphism_from_coords(const DiskSpace<S>& ds, const SSPtr<S>& dsk,
                                              const SSPtr<S>& a, const Vec<S>& v) {
  Bidegree x{ds.p, ds.n};
  Bidegree y{ds.p - ds.r, ds.n + 1 - ds.r};
  Index k = std::max(dsk->top(), a->top());
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    BigradedMap<S> fm(dsk->module_at(m), a->module_at(m), {0, 0});
    if (m <= ds.r) {
      Index da = ds.a_dims[static_cast<size_t>(m)];
      Index db = ds.b_dims[static_cast<size_t>(m)];
      if (da > 0) {
        Mat<S> col(da, 1);
        for (Index i = 0; i < da; ++i) col(i, 0) = v(ds.a_offset(m) + i);
        fm.set_block(x, std::move(col));
      }
      if (db > 0) {
        Mat<S> col(db, 1);
        for (Index i = 0; i < db; ++i) col(i, 0) = v(ds.b_offset(m) + i);
        fm.set_block(y, std::move(col));
      }
    }
    pages.push_back(std::move(fm));
  }
  return SpectralMorphism<S>::from_pages(dsk, a, std::move(pages));
}

template <class S>
Vec<S> disk_coords_of_morphism(const DiskSpace<S>& ds, const SpectralMorphism<S>& f) {
  Bidegree x{ds.p, ds.n};
  Bidegree y{ds.p - ds.r, ds.n + 1 - ds.r};
  Vec<S> v = Vec<S>::Zero(ds.total);
  for (int m = 0; m <= ds.r; ++m) {
    Mat<S> bx = f.page(m).block(x);
    for (Index i = 0; i < bx.rows(); ++i) v(ds.a_offset(m) + i) = bx(i, 0);
    Mat<S> by = f.page(m).block(y);
    for (Index i = 0; i < by.rows(); ++i) v(ds.b_offset(m) + i) = by(i, 0);
  }
  return v;
}

template <class S>
std::vector<SpectralMorphism<S>> hom_from_disk(int r, int p, int n, const SSPtr<S>& a) {
  SSPtr<S> dsk = disk<S>(r, p, n);
  DiskSpace<S> ds = disk_space(r, p, n, *a);
  std::vector<SpectralMorphism<S>> out;
  for (Index j = 0; j < ds.dim(); ++j)
    out.push_back(disk_morphism_from_coords(ds, dsk, a, Vec<S>(ds.basis.col(j))));
  return out;
}

// ---------------------------------------------------------------------------
// Right lifting properties against the generating families
//   J_k : 0 -> D_k(p,n)          and   I_r : φ_{r+1} : D_{r+1}(p,n) -> S_{r+1}(p,n).

struct Generator {
  enum class Kind { ZeroToDisk, DiskToSphere } kind;
  int level;  // k for J_k; the φ index for the disk->sphere family
  int p, n;

  static Generator zero_to_disk(int k, int p, int n) { return {Kind::ZeroToDisk, k, p, n}; }
  static Generator disk_to_sphere(int index, int p, int n) { return {Kind::DiskToSphere, index, p, n}; }
};

namespace detail {

// basis of Hom(G, X) as vectors of page-0 entries, with the morphisms
template <class S>
struct HomBasis {
  HomSpace<S> hs;
  std::vector<SpectralMorphism<S>> morphisms;
  MapLayout<S> layout;

  static HomBasis make(const SSPtr<S>& g, const SSPtr<S>& x) {
    HomBasis hb{hom_space(g, x), {}, {}};
    hb.layout = hb.hs.layout;
    for (Index j = 0; j < hb.hs.dim(); ++j) {
      Vec<S> e = Vec<S>::Zero(hb.hs.dim());
      e(j) = S(1);
      hb.morphisms.push_back(hb.hs.morphism(e));
    }
    return hb;
  }

  Vec<S> coords(const SpectralMorphism<S>& f) const {
    auto c = hs.coords(f);
    if (!c) throw InternalInvariantViolation("morphism not in its own hom space");
    return *c;
  }
};

}  // namespace detail

// Decide the right lifting property of f against one generator by a linear
// surjectivity check: lifts map onto commutative squares iff f is injective
// against the generator.
template <class S>
bool has_rlp(const SpectralMorphism<S>& f, const Generator& gen) {
  const SSPtr<S>& a = f.source_ptr();
  const SSPtr<S>& b = f.target_ptr();
  switch (gen.kind) {
    case Generator::Kind::ZeroToDisk: {
      // surjectivity of D_k^{p,n}(f) : D_k^{p,n}(A) -> D_k^{p,n}(B)
      DiskSpace<S> da = disk_space(gen.level, gen.p, gen.n, *a);
      DiskSpace<S> db = disk_space(gen.level, gen.p, gen.n, *b);
      if (db.dim() == 0) return true;
      // push disk coordinates through f pagewise
      Mat<S> image(db.total, da.dim());
      Bidegree x{gen.p, gen.n};
      Bidegree y{gen.p - gen.level, gen.n + 1 - gen.level};
      for (Index j = 0; j < da.dim(); ++j) {
        Vec<S> w = Vec<S>::Zero(db.total);
        for (int m = 0; m <= gen.level; ++m) {
          Mat<S> fx = f.page(m).block(x);
          Mat<S> fy = f.page(m).block(y);
          for (Index i = 0; i < fx.rows(); ++i) {
            S acc(0);
            for (Index c = 0; c < fx.cols(); ++c) acc += fx(i, c) * da.basis(da.a_offset(m) + c, j);
            w(db.a_offset(m) + i) = acc;
          }
          for (Index i = 0; i < fy.rows(); ++i) {
            S acc(0);
            for (Index c = 0; c < fy.cols(); ++c) acc += fy(i, c) * da.basis(da.b_offset(m) + c, j);
            w(db.b_offset(m) + i) = acc;
          }
        }
        image.col(j) = w;
      }
      return rank<S>(hstack<S>(image, db.basis)) == rank<S>(image);
    }
    case Generator::Kind::DiskToSphere: {
      int r1 = gen.level;
      SSPtr<S> dsk = disk<S>(r1, gen.p, gen.n);
      SSPtr<S> sph = sphere<S>(r1, gen.p, gen.n);
      SpectralMorphism<S> phi = varphi<S>(r1, gen.p, gen.n);
      auto hda = detail::HomBasis<S>::make(dsk, a);
      auto hsb = detail::HomBasis<S>::make(sph, b);
      auto hsa = detail::HomBasis<S>::make(sph, a);
      auto hdb = detail::HomBasis<S>::make(dsk, b);
      // commutative squares: pairs (α, β) with f∘α = β∘φ, in hom coordinates
      Index cols = hda.hs.dim() + hsb.hs.dim();
      Mat<S> sq(hdb.layout.total, cols);
      for (Index j = 0; j < hda.hs.dim(); ++j)
        sq.col(j) = hdb.layout.vec(compose(f, hda.morphisms[static_cast<size_t>(j)]).page(0));
      for (Index j = 0; j < hsb.hs.dim(); ++j)
        sq.col(hda.hs.dim() + j) =
            Vec<S>(-hdb.layout.vec(compose(hsb.morphisms[static_cast<size_t>(j)], phi).page(0)));
      Mat<S> squares = kernel_basis(sq);
      if (squares.cols() == 0) return true;
      // lifts: λ : S -> A, sent to (λ∘φ, f∘λ)
      Mat<S> lifts(cols, hsa.hs.dim());
      for (Index j = 0; j < hsa.hs.dim(); ++j) {
        Vec<S> top = hda.coords(compose(hsa.morphisms[static_cast<size_t>(j)], phi));
        Vec<S> bot = hsb.coords(compose(f, hsa.morphisms[static_cast<size_t>(j)]));
        lifts.col(j).segment(0, hda.hs.dim()) = top;
        lifts.col(j).segment(hda.hs.dim(), hsb.hs.dim()) = bot;
      }
      return rank<S>(hstack<S>(lifts, squares)) == rank<S>(lifts);
    }
  }
  throw UnsupportedGenerator("unknown generating map");
}

// Bidegrees (p,n) at which a generating family can interact with f: the joint
// support of all pages of source and target, shifted back by every offset a
// disk or sphere generator occupies. Outside this window every lifting
// problem is trivial.
template <class S>
std::vector<Bidegree> rlp_window(const SpectralMorphism<S>& f, int max_level) {
  std::set<Bidegree> supp;
  std::set<Bidegree> out;
  auto collect = [&](const SpectralSequence<S>& ss) {
    for (Index m = 0; m <= ss.top(); ++m)
      for (auto& [pq, d] : ss.module_at(m).support()) supp.insert(pq);
  };
  collect(f.source());
  collect(f.target());
  std::vector<Bidegree> offsets{{0, 0}, {1, 1}};
  for (int k = 0; k <= max_level + 1; ++k) {
    offsets.push_back({k, k - 1});   // y slot of D_k relative to (p,n)
    offsets.push_back({-k, 1 - k});  // (p,n) seen from a sphere summand
  }
  for (const Bidegree& s : supp)
    for (const Bidegree& o : offsets) out.insert(s + o);
  return {out.begin(), out.end()};
}

// Prop 6.14: r-fibration ⟺ RLP against J'_r = ∪_{k ≤ r} J_k.
template <class S>
bool rfib_via_rlp(const SpectralMorphism<S>& f, int r) {
  std::vector<Bidegree> window = rlp_window(f, r);
  for (int k = 0; k <= r; ++k)
    for (const Bidegree& pn : window)
      if (!has_rlp(f, Generator::zero_to_disk(k, pn.p, pn.q))) return false;
  return true;
}

// Prop 6.15: acyclic r-fibration ⟺ RLP against I'_r = ∪_{k<r} J_k ∪ I_r.
template <class S>
bool acyclic_rfib_via_rlp(const SpectralMorphism<S>& f, int r) {
  std::vector<Bidegree> window = rlp_window(f, r + 1);
  for (int k = 0; k < r; ++k)
    for (const Bidegree& pn : window)
      if (!has_rlp(f, Generator::zero_to_disk(k, pn.p, pn.q))) return false;
  for (const Bidegree& pn : window)
    if (!has_rlp(f, Generator::disk_to_sphere(r + 1, pn.p, pn.q))) return false;
  return true;
}

}  // namespace sseq
