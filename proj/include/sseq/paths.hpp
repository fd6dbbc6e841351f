#pragma once

#include "sseq/spectral.hpp"

namespace sseq {

// Reinterpret a map against new endpoint modules / shift with identical
// blocks; used to convert "into the translated copy" maps into shifted maps.
template <class S>
BigradedMap<S> with_signature(const BigradedMap<S>& f, BigradedModule src, BigradedModule tgt,
                              Bidegree shift) {
  BigradedMap<S> out(std::move(src), std::move(tgt), shift);
  for (auto& [pq, m] : f.stored_blocks()) out.set_block(pq, m);
  return out;
}

// Λ_r: e_-, e_+ in bidegree (0,0), u in (-r, 1-r); the only differential is
// d_r(e_-) = -u, d_r(e_+) = u. From page r+1 on a single class e_- + e_+.
template <class S>
SSPtr<S> lambda(int r) {
  BigradedModule m;
  m.set_dim({0, 0}, 2);
  m.set_dim({-r, 1 - r}, 1);
  std::vector<RComplex<S>> pages;
  for (int i = 0; i < r; ++i) pages.push_back(RComplex<S>::with_zero_differential(m, i));
  RComplex<S> pr;
  pr.module = m;
  pr.r = r;
  pr.differential = BigradedMap<S>(m, m, {-r, 1 - r});
  {
    Mat<S> blk(1, 2);
    blk(0, 0) = S(-1);
    blk(0, 1) = S(1);
    pr.differential.set_block({0, 0}, std::move(blk));
  }
  pages.push_back(pr);
  BigradedModule top;
  top.set_dim({0, 0}, 1);
  pages.push_back(RComplex<S>::with_zero_differential(top, r + 1));

  std::vector<BigradedMap<S>> psis;
  for (int i = 0; i < r; ++i) psis.push_back(BigradedMap<S>::identity(m));
  HomologyData<S> hr = homology(pr);
  BigradedMap<S> psir(hr.H, top, {0, 0});
  psir.set_block({0, 0}, Mat<S>::Identity(1, 1));
  psis.push_back(std::move(psir));
  return make_validated<S>(std::move(pages), std::move(psis), "lambda");
}

// Functorial r-path P(r;A) = Λ_r ⊗ A with the explicit page formulas:
// pages m ≤ r are A_m ⊕ A_m[(r,r-1)] ⊕ A_m, pages above r are A_m.
template <class S>
struct PathSpace {
  Index r = 0;
  SSPtr<S> base;
  SSPtr<S> ss;
  SpectralMorphism<S> iota, d_minus, d_plus;
  std::vector<SumLayout<S>> layouts;  // pages 0..r

  // (x,y,z) -> y as a map P_m -> A_m of bidegree (r, r-1), for m ≤ r: the
  // middle slot at (p,q) holds the base at (p+r, q+r-1), so target keys line
  // up and only the target module is reinterpreted
  BigradedMap<S> middle_projection(Index m) const {
    const auto& lay = layouts[static_cast<size_t>(m)];
    return with_signature(lay.template projection<S>(1), lay.total, base->module_at(m),
                          {static_cast<int>(r), static_cast<int>(r) - 1});
  }

  // y -> (0,y,0) as a map A_m -> P_m of bidegree (-r, 1-r), for m ≤ r; here
  // the source keys move, so the block is assembled directly
  BigradedMap<S> middle_injection(Index m) const {
    const auto& lay = layouts[static_cast<size_t>(m)];
    const Bidegree down{-static_cast<int>(r), 1 - static_cast<int>(r)};
    BigradedMap<S> inj(base->module_at(m), lay.total, down);
    for (auto& [pq, d] : base->module_at(m).support()) {
      Bidegree tq = pq + down;
      Index rows = lay.total.dim(tq);
      if (rows == 0) continue;
      Mat<S> blk = Mat<S>::Zero(rows, d);
      blk.middleRows(lay.offset(1, tq), d) = Mat<S>::Identity(d, d);
      inj.set_block(pq, std::move(blk));
    }
    return inj;
  }
};

namespace detail {

// sign (-1)^{m+r+1} on the middle strand below page r (and -1 at page r)
template <class S>
S middle_sign(Index m, Index r) {
  return ((m + r + 1) % 2 == 0) ? S(1) : S(-1);
}

}  // namespace detail

template <class S>
PathSpace<S> path(Index r, const SSPtr<S>& a) {
  const Bidegree down{-static_cast<int>(r), 1 - static_cast<int>(r)};
  Index k = std::max(a->top(), r + 1);

  PathSpace<S> out;
  out.r = r;
  out.base = a;

  std::vector<RComplex<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    if (m > r) {
      pages.push_back(a->page(m));
      continue;
    }
    BigradedModule am = a->module_at(m);
    BigradedModule mid = am.translated(down);
    SumLayout<S> lay = SumLayout<S>::of({am, mid, am});
    RComplex<S> pm;
    pm.module = lay.total;
    pm.r = static_cast<int>(m);
    Bidegree shift{-static_cast<int>(m), 1 - static_cast<int>(m)};
    BigradedMap<S> dm = a->page(m).differential;
    BigradedMap<S> dmid = dm.translated(down);
    S sgn = detail::middle_sign<S>(m, r);
    BigradedMap<S> d(lay.total, lay.total, shift);
    for (auto& [pq, dim] : lay.total.support()) {
      Index rows = lay.total.dim(pq + shift);
      if (rows == 0) continue;
      Mat<S> blk = Mat<S>::Zero(rows, dim);
      Index ca = am.dim(pq), cm = mid.dim(pq);
      Index ra = am.dim(pq + shift), rm = mid.dim(pq + shift);
      blk.topLeftCorner(ra, ca) = dm.block(pq);
      blk.block(ra, ca, rm, cm) = dmid.block(pq) * sgn;
      blk.bottomRightCorner(rows - ra - rm, dim - ca - cm) = dm.block(pq);
      if (m == r) {
        // D_r adds (x,y,z) -> -x + z into the middle strand
        Index rmid_rows = mid.dim(pq + shift);  // = am.dim(pq)
        if (rmid_rows > 0) {
          blk.block(ra, 0, rmid_rows, ca) += Mat<S>(-Mat<S>::Identity(rmid_rows, ca));
          blk.block(ra, ca + cm, rmid_rows, dim - ca - cm) += Mat<S>::Identity(rmid_rows, dim - ca - cm);
        }
      }
      d.set_block(pq, std::move(blk));
    }
    pm.differential = std::move(d);
    pages.push_back(std::move(pm));
    out.layouts.push_back(std::move(lay));
  }

  // morphism pages for ι, ∂^-, ∂^+
  std::vector<BigradedMap<S>> iotas, dms, dps;
  for (Index m = 0; m <= k; ++m) {
    if (m > r) {
      BigradedMap<S> id = BigradedMap<S>::identity(a->module_at(m));
      iotas.push_back(id);
      dms.push_back(id);
      dps.push_back(id);
      continue;
    }
    const auto& lay = out.layouts[static_cast<size_t>(m)];
    BigradedMap<S> inc0 = lay.template inclusion<S>(0);
    BigradedMap<S> inc2 = lay.template inclusion<S>(2);
    iotas.push_back(inc0 + inc2);
    dms.push_back(lay.template projection<S>(0));
    dps.push_back(lay.template projection<S>(2));
  }

  // characteristic maps
  std::vector<HomologyData<S>> homs;
  for (Index m = 0; m <= std::min(r, k - 1); ++m) homs.push_back(homology(pages[static_cast<size_t>(m)]));
  std::vector<BigradedMap<S>> psis;
  for (Index m = 0; m < k; ++m) {
    if (m > r) {
      psis.push_back(a->charmap(m));
      continue;
    }
    const HomologyData<S>& hp = homs[static_cast<size_t>(m)];
    if (m < r) {
      const auto& lay = out.layouts[static_cast<size_t>(m)];
      const auto& lay1 = out.layouts[static_cast<size_t>(m + 1)];
      BigradedMap<S> psi_mid = a->charmap(m).translated(down);
      HomologyData<S> hmid{a->homology_at(m).H.translated(down), a->homology_at(m).section.translated(down),
                           a->homology_at(m).projection.translated(down)};
      BigradedMap<S> psi =
          compose(lay1.template inclusion<S>(0),
                  compose(a->charmap(m), induced_on_homology_unchecked(lay.template projection<S>(0), hp,
                                                                       a->homology_at(m)))) +
          compose(lay1.template inclusion<S>(1),
                  compose(psi_mid, induced_on_homology_unchecked(lay.template projection<S>(1), hp, hmid))) +
          compose(lay1.template inclusion<S>(2),
                  compose(a->charmap(m), induced_on_homology_unchecked(lay.template projection<S>(2), hp,
                                                                       a->homology_at(m))));
      psis.push_back(std::move(psi));
    } else {
      // page r: H(P_r) -> A_{r+1} through H(∂^-)
      BigradedMap<S> h_dminus = induced_on_homology_unchecked(dms[static_cast<size_t>(r)], hp, a->homology_at(r));
      psis.push_back(compose(a->charmap(r), h_dminus));
    }
  }

  out.ss = make_validated<S>(std::move(pages), std::move(psis), "path");
  out.iota = SpectralMorphism<S>::from_pages(a, out.ss, std::move(iotas));
  out.d_minus = SpectralMorphism<S>::from_pages(out.ss, a, std::move(dms));
  out.d_plus = SpectralMorphism<S>::from_pages(out.ss, a, std::move(dps));
  return out;
}

// P(r;f): strandwise (f_m, f_m, f_m) below and at page r, f_m above. The
// middle strand carries no extra sign: that is what characteristic-map
// compatibility forces, and what makes P(r;-) a functor.
template <class S>
SpectralMorphism<S> path_morphism(const PathSpace<S>& pa, const PathSpace<S>& pb,
                                  const SpectralMorphism<S>& f) {
  if (pa.r != pb.r) throw DimensionMismatch("path_morphism: mismatched r");
  Index r = pa.r;
  Index k = std::max(pa.ss->top(), pb.ss->top());
  const Bidegree down{-static_cast<int>(r), 1 - static_cast<int>(r)};
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    if (m > r) {
      pages.push_back(f.page(m));
      continue;
    }
    const auto& la = pa.layouts[static_cast<size_t>(m)];
    const auto& lb = pb.layouts[static_cast<size_t>(m)];
    BigradedMap<S> fm = f.page(m);
    BigradedMap<S> fmid = fm.translated(down);
    BigradedMap<S> blk =
        compose(lb.template inclusion<S>(0), compose(fm, la.template projection<S>(0))) +
        compose(lb.template inclusion<S>(1), compose(fmid, la.template projection<S>(1))) +
        compose(lb.template inclusion<S>(2), compose(fm, la.template projection<S>(2)));
    pages.push_back(std::move(blk));
  }
  return SpectralMorphism<S>::from_pages(pa.ss, pb.ss, std::move(pages));
}

// r-mapping path space P̄(r;u) = A ×_B P(r;B), by its explicit page formulas.
template <class S>
struct MappingPath {
  Index r = 0;
  SSPtr<S> ss;
  SpectralMorphism<S> i;    // A -> P̄, right inverse to ρ
  SpectralMorphism<S> p;    // P̄ -> B, the r-fibration; p∘i = u
  SpectralMorphism<S> rho;  // P̄ -> A, acyclic r-fibration
  std::vector<SumLayout<S>> layouts;  // pages 0..r
};

template <class S>
MappingPath<S> mapping_path_space(Index r, const SpectralMorphism<S>& u) {
  const SSPtr<S>& a = u.source_ptr();
  const SSPtr<S>& b = u.target_ptr();
  const Bidegree down{-static_cast<int>(r), 1 - static_cast<int>(r)};
  Index k = std::max(a->top(), r + 1);

  MappingPath<S> out;
  out.r = r;

  std::vector<RComplex<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    if (m > r) {
      pages.push_back(a->page(m));
      continue;
    }
    BigradedModule am = a->module_at(m);
    BigradedModule bm = b->module_at(m);
    BigradedModule mid = bm.translated(down);
    SumLayout<S> lay = SumLayout<S>::of({am, mid, bm});
    RComplex<S> pm;
    pm.module = lay.total;
    pm.r = static_cast<int>(m);
    Bidegree shift{-static_cast<int>(m), 1 - static_cast<int>(m)};
    BigradedMap<S> da = a->page(m).differential;
    BigradedMap<S> db = b->page(m).differential;
    BigradedMap<S> dmid = db.translated(down);
    S sgn = detail::middle_sign<S>(m, r);
    BigradedMap<S> d(lay.total, lay.total, shift);
    for (auto& [pq, dim] : lay.total.support()) {
      Index rows = lay.total.dim(pq + shift);
      if (rows == 0) continue;
      Mat<S> blk = Mat<S>::Zero(rows, dim);
      Index ca = am.dim(pq), cm = mid.dim(pq);
      Index ra = am.dim(pq + shift), rm = mid.dim(pq + shift);
      blk.topLeftCorner(ra, ca) = da.block(pq);
      blk.block(ra, ca, rm, cm) = dmid.block(pq) * sgn;
      blk.bottomRightCorner(rows - ra - rm, dim - ca - cm) = db.block(pq);
      if (m == r && rm > 0) {
        // D_r adds (a,b',b) -> -u_r(a) + b into the middle strand
        blk.block(ra, 0, rm, ca) += Mat<S>(-u.page(r).block(pq));
        blk.block(ra, ca + cm, rm, dim - ca - cm) += Mat<S>::Identity(rm, dim - ca - cm);
      }
      d.set_block(pq, std::move(blk));
    }
    pm.differential = std::move(d);
    pages.push_back(std::move(pm));
    out.layouts.push_back(std::move(lay));
  }

  std::vector<BigradedMap<S>> is, ps, rhos;
  Index kk = std::max(k, b->top());  // p lands in B, whose tower may be taller
  for (Index m = 0; m <= kk; ++m) {
    if (m > r) {
      is.push_back(BigradedMap<S>::identity(a->module_at(m)));
      ps.push_back(u.page(m));
      rhos.push_back(BigradedMap<S>::identity(a->module_at(m)));
      continue;
    }
    const auto& lay = out.layouts[static_cast<size_t>(m)];
    is.push_back(compose(lay.template inclusion<S>(0), BigradedMap<S>::identity(a->module_at(m))) +
                 compose(lay.template inclusion<S>(2), u.page(m)));
    ps.push_back(lay.template projection<S>(2));
    rhos.push_back(lay.template projection<S>(0));
  }

  std::vector<HomologyData<S>> homs;
  for (Index m = 0; m <= std::min(r, k - 1); ++m) homs.push_back(homology(pages[static_cast<size_t>(m)]));
  std::vector<BigradedMap<S>> psis;
  for (Index m = 0; m < k; ++m) {
    if (m > r) {
      psis.push_back(a->charmap(m));
      continue;
    }
    const HomologyData<S>& hp = homs[static_cast<size_t>(m)];
    if (m < r) {
      const auto& lay = out.layouts[static_cast<size_t>(m)];
      const auto& lay1 = out.layouts[static_cast<size_t>(m + 1)];
      HomologyData<S> hmid{b->homology_at(m).H.translated(down), b->homology_at(m).section.translated(down),
                           b->homology_at(m).projection.translated(down)};
      BigradedMap<S> psi =
          compose(lay1.template inclusion<S>(0),
                  compose(a->charmap(m), induced_on_homology_unchecked(lay.template projection<S>(0), hp,
                                                                       a->homology_at(m)))) +
          compose(lay1.template inclusion<S>(1),
                  compose(b->charmap(m).translated(down),
                          induced_on_homology_unchecked(lay.template projection<S>(1), hp, hmid))) +
          compose(lay1.template inclusion<S>(2),
                  compose(b->charmap(m), induced_on_homology_unchecked(lay.template projection<S>(2), hp,
                                                                       b->homology_at(m))));
      psis.push_back(std::move(psi));
    } else {
      BigradedMap<S> h_rho = induced_on_homology_unchecked(rhos[static_cast<size_t>(r)], hp, a->homology_at(r));
      psis.push_back(compose(a->charmap(r), h_rho));
    }
  }

  out.ss = make_validated<S>(std::move(pages), std::move(psis), "mapping path space");
  out.i = SpectralMorphism<S>::from_pages(a, out.ss, std::move(is));
  out.p = SpectralMorphism<S>::from_pages(out.ss, b, std::move(ps));
  out.rho = SpectralMorphism<S>::from_pages(out.ss, a, std::move(rhos));
  return out;
}

// For a commuting square u' ∘ fa = fb ∘ u, the induced map on mapping path
// spaces (fa, fb-translated, fb); this is what makes the factorization
// functorial.
template <class S>
SpectralMorphism<S> mapping_path_induced(const MappingPath<S>& mu, const MappingPath<S>& mv,
                                         const SpectralMorphism<S>& fa, const SpectralMorphism<S>& fb) {
  if (mu.r != mv.r) throw DimensionMismatch("mapping_path_induced: mismatched r");
  Index r = mu.r;
  Index k = std::max(mu.ss->top(), mv.ss->top());
  const Bidegree down{-static_cast<int>(r), 1 - static_cast<int>(r)};
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= k; ++m) {
    if (m > r) {
      pages.push_back(fa.page(m));
      continue;
    }
    const auto& la = mu.layouts[static_cast<size_t>(m)];
    const auto& lb = mv.layouts[static_cast<size_t>(m)];
    BigradedMap<S> blk =
        compose(lb.template inclusion<S>(0), compose(fa.page(m), la.template projection<S>(0))) +
        compose(lb.template inclusion<S>(1),
                compose(fb.page(m).translated(down), la.template projection<S>(1))) +
        compose(lb.template inclusion<S>(2), compose(fb.page(m), la.template projection<S>(2)));
    pages.push_back(std::move(blk));
  }
  return SpectralMorphism<S>::from_pages(mu.ss, mv.ss, std::move(pages));
}

// ---------------------------------------------------------------------------
// r-homotopies (Prop 6.6 shape): ĥ_m : A_m -> B_m of bidegree (r, r-1) with
//   (-1)^{m+r+1} d^B ĥ_m - ĥ_m d^A = 0          for 0 ≤ m < r,
//   -d^B ĥ_r - ĥ_r d^A = f_r - g_r,
//   ĥ_{m+1} = ψ^B_m H(ĥ_m) (ψ^A_m)^{-1}         for 0 ≤ m < r.

template <class S>
struct RHomotopy {
  Index r = 0;
  std::vector<BigradedMap<S>> hhat;  // m = 0..r
  SpectralMorphism<S> f, g;
};

template <class S>
bool parallel(const SpectralMorphism<S>& f, const SpectralMorphism<S>& g) {
  return (f.source_ptr() == g.source_ptr() || f.source() == g.source()) &&
         (f.target_ptr() == g.target_ptr() || f.target() == g.target());
}

template <class S>
bool is_r_homotopy(const RHomotopy<S>& h) {
  if (!parallel(h.f, h.g)) return false;
  if (static_cast<Index>(h.hhat.size()) != h.r + 1) return false;
  const SpectralSequence<S>& a = h.f.source();
  const SpectralSequence<S>& b = h.f.target();
  const Bidegree up{static_cast<int>(h.r), static_cast<int>(h.r) - 1};
  for (Index m = 0; m <= h.r; ++m) {
    const BigradedMap<S>& hm = h.hhat[static_cast<size_t>(m)];
    if (hm.shift() != up || !(hm.source() == a.module_at(m)) || !(hm.target() == b.module_at(m)))
      return false;
    BigradedMap<S> lhs = compose(b.page(m).differential, hm) * detail::middle_sign<S>(m, h.r) -
                         compose(hm, a.page(m).differential);
    if (m < h.r) {
      if (!lhs.is_zero()) return false;
    } else {
      if (!(lhs == h.f.page(m) - h.g.page(m))) return false;
    }
  }
  for (Index m = 0; m < h.r; ++m) {
    BigradedMap<S> want =
        compose(b.charmap(m), compose(induced_on_homology_unchecked(h.hhat[static_cast<size_t>(m)],
                                                                    a.homology_at(m), b.homology_at(m)),
                                      a.charmap(m).inverse_map()));
    if (!(want == h.hhat[static_cast<size_t>(m + 1)])) return false;
  }
  return true;
}

namespace detail {

// propagated system in the unknown ĥ_0: returns all pages ĥ_0..ĥ_r
template <class S>
std::vector<BigradedMap<S>> propagate_homotopy(const SpectralSequence<S>& a, const SpectralSequence<S>& b,
                                               Index r, const BigradedMap<S>& h0) {
  std::vector<BigradedMap<S>> hs{h0};
  for (Index m = 0; m < r; ++m) {
    BigradedMap<S> next =
        compose(b.charmap(m), compose(induced_on_homology_unchecked(hs.back(), a.homology_at(m), b.homology_at(m)),
                                      a.charmap(m).inverse_map()));
    hs.push_back(std::move(next));
  }
  return hs;
}

template <class S>
void append_homotopy_residuals(std::vector<S>& out, const SpectralSequence<S>& a,
                               const SpectralSequence<S>& b, Index r,
                               const std::vector<BigradedMap<S>>& hs, const BigradedMap<S>& fr_minus_gr) {
  for (Index m = 0; m <= r; ++m) {
    BigradedMap<S> lhs = compose(b.page(m).differential, hs[static_cast<size_t>(m)]) * middle_sign<S>(m, r) -
                         compose(hs[static_cast<size_t>(m)], a.page(m).differential);
    if (m < r)
      append_entries(out, lhs);
    else
      append_entries(out, BigradedMap<S>(lhs - fr_minus_gr));
  }
}

}  // namespace detail

template <class S>
std::optional<RHomotopy<S>> find_r_homotopy(const SpectralMorphism<S>& f, const SpectralMorphism<S>& g,
                                            Index r) {
  if (!parallel(f, g)) throw DimensionMismatch("find_r_homotopy: maps are not parallel");
  const SpectralSequence<S>& a = f.source();
  const SpectralSequence<S>& b = f.target();
  MapLayout<S> layout = MapLayout<S>::make(a.module_at(0), b.module_at(0),
                                           {static_cast<int>(r), static_cast<int>(r) - 1});
  BigradedMap<S> rhs = f.page(r) - g.page(r);
  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    auto hs = detail::propagate_homotopy(a, b, r, layout.unvec(x));
    detail::append_homotopy_residuals(out, a, b, r, hs, rhs);
    return out;
  };
  AffineSolution<S> sol = solve_affine<S>(layout.total, residual);
  if (!sol.solvable) return std::nullopt;
  RHomotopy<S> h;
  h.r = r;
  h.f = f;
  h.g = g;
  h.hhat = detail::propagate_homotopy(a, b, r, layout.unvec(sol.particular));
  return h;
}

// Witness for 1 ≃_r ι∘∂^- on P(r;A): ĥ_m(x,y,z) = (0,0,-y) on every page.
// The middle slot at (p,q) holds the base at (p+r, q+r-1), which is exactly
// the z slot of the target bidegree, so the block is a negated identity.
template <class S>
RHomotopy<S> path_contraction_homotopy(const PathSpace<S>& ps) {
  RHomotopy<S> h;
  h.r = ps.r;
  h.f = identity_morphism(ps.ss);
  h.g = compose(ps.iota, ps.d_minus);
  const Bidegree up{static_cast<int>(ps.r), static_cast<int>(ps.r) - 1};
  for (Index m = 0; m <= ps.r; ++m) {
    const auto& lay = ps.layouts[static_cast<size_t>(m)];
    BigradedMap<S> hm(lay.total, lay.total, up);
    for (auto& [pq, dim] : lay.total.support()) {
      Index cm = lay.parts[1].dim(pq);
      Bidegree tq = pq + up;
      if (cm == 0 || lay.total.dim(tq) == 0) continue;
      Mat<S> blk = Mat<S>::Zero(lay.total.dim(tq), dim);
      blk.block(lay.offset(2, tq), lay.offset(1, pq), cm, cm) = Mat<S>(-Mat<S>::Identity(cm, cm));
      hm.set_block(pq, std::move(blk));
    }
    h.hhat.push_back(std::move(hm));
  }
  return h;
}

template <class S>
struct REquivalence {
  SpectralMorphism<S> inverse;  // g : B -> A
  RHomotopy<S> fg_to_id;        // f∘g ≃_r 1_B
  RHomotopy<S> gf_to_id;        // g∘f ≃_r 1_A
};

// Decide whether f is an r-homotopy equivalence by solving jointly for g and
// both homotopies; everything is linear in (g_0, ĥ_0, k̂_0).
template <class S>
std::optional<REquivalence<S>> is_r_homotopy_equivalence(const SpectralMorphism<S>& f, Index r) {
  const SSPtr<S>& a = f.source_ptr();
  const SSPtr<S>& b = f.target_ptr();
  MapLayout<S> lg = MapLayout<S>::make(b->module_at(0), a->module_at(0), {0, 0});
  const Bidegree up{static_cast<int>(r), static_cast<int>(r) - 1};
  MapLayout<S> lh = MapLayout<S>::make(b->module_at(0), b->module_at(0), up);  // f∘g ≃ 1_B
  MapLayout<S> lk = MapLayout<S>::make(a->module_at(0), a->module_at(0), up);  // g∘f ≃ 1_A
  Index kg = std::max(a->top(), b->top());
  Index pages_needed = std::max(kg, r);
  TransportCtx<S> ctx(*b, *a, pages_needed);

  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    BigradedMap<S> g0 = lg.unvec(x.topRows(lg.total));
    std::vector<BigradedMap<S>> gs = ctx.run(g0);
    for (Index m = 0; m <= pages_needed; ++m) {
      BigradedMap<S> comm = compose(a->page(m).differential, gs[static_cast<size_t>(m)]) -
                            compose(gs[static_cast<size_t>(m)], b->page(m).differential);
      append_entries(out, comm);
    }
    auto hs = detail::propagate_homotopy(*b, *b, r, lh.unvec(x.middleRows(lg.total, lh.total)));
    BigradedMap<S> fg_r = compose(f.page(r), gs[static_cast<size_t>(r)]);
    detail::append_homotopy_residuals(out, *b, *b, r, hs,
                                      BigradedMap<S>(fg_r - BigradedMap<S>::identity(b->module_at(r))));
    auto ks = detail::propagate_homotopy(*a, *a, r, lk.unvec(x.bottomRows(lk.total)));
    BigradedMap<S> gf_r = compose(gs[static_cast<size_t>(r)], f.page(r));
    detail::append_homotopy_residuals(out, *a, *a, r, ks,
                                      BigradedMap<S>(gf_r - BigradedMap<S>::identity(a->module_at(r))));
    return out;
  };
  AffineSolution<S> sol = solve_affine<S>(lg.total + lh.total + lk.total, residual);
  if (!sol.solvable) return std::nullopt;

  REquivalence<S> eq;
  BigradedMap<S> g0 = lg.unvec(sol.particular.topRows(lg.total));
  eq.inverse = SpectralMorphism<S>::derive(g0, b, a);
  eq.fg_to_id.r = r;
  eq.fg_to_id.f = compose(f, eq.inverse);
  eq.fg_to_id.g = identity_morphism(b);
  eq.fg_to_id.hhat = detail::propagate_homotopy(*b, *b, r, lh.unvec(sol.particular.middleRows(lg.total, lh.total)));
  eq.gf_to_id.r = r;
  eq.gf_to_id.f = compose(eq.inverse, f);
  eq.gf_to_id.g = identity_morphism(a);
  eq.gf_to_id.hhat = detail::propagate_homotopy(*a, *a, r, lk.unvec(sol.particular.bottomRows(lk.total)));
  return eq;
}

}  // namespace sseq
