#pragma once

#include "sseq/spectral.hpp"

namespace sseq {

// The ring concentrated in bidegree (p,n), all differentials zero.
template <class S>
SSPtr<S> ring_at(int p, int n) {
  BigradedModule m;
  m.set_dim({p, n}, 1);
  return share(SpectralSequence<S>::make({RComplex<S>::with_zero_differential(m, 0)}, {}));
}

// S: pages 0 and 1 are R^{0,0} ⊕ R^{1,0}; d_1 is the identity R^{1,0} -> R^{0,0};
// everything vanishes from page 2 on. The map f : R(0,0) -> S hitting the
// (0,0) summand has no cokernel in SpSe.
template <class S>
SSPtr<S> fixture_s() {
  BigradedModule m;
  m.set_dim({0, 0}, 1);
  m.set_dim({1, 0}, 1);
  RComplex<S> p0 = RComplex<S>::with_zero_differential(m, 0);
  RComplex<S> p1;
  p1.module = m;
  p1.r = 1;
  p1.differential = BigradedMap<S>(m, m, {-1, 0});
  p1.differential.set_block({1, 0}, Mat<S>::Identity(1, 1));
  RComplex<S> p2 = RComplex<S>::with_zero_differential({}, 2);

  BigradedMap<S> psi0 = BigradedMap<S>::identity(m);
  HomologyData<S> h1 = homology(p1);
  BigradedMap<S> psi1(h1.H, BigradedModule{}, {0, 0});
  return share(SpectralSequence<S>::make({p0, p1, p2}, {psi0, psi1}));
}

template <class S>
SpectralMorphism<S> fixture_f_into_s() {
  SSPtr<S> r = ring_at<S>(0, 0);
  SSPtr<S> s = fixture_s<S>();
  BigradedMap<S> f0(r->module_at(0), s->module_at(0), {0, 0});
  f0.set_block({0, 0}, Mat<S>::Identity(1, 1));
  return SpectralMorphism<S>::derive(f0, r, s);
}

// T: page 0 is R^{0,0} ⊕ R^{0,1} with d_0 the identity R^{0,0} -> R^{0,1};
// all later pages vanish. π : T -> R(0,0) is an epimorphism without kernel.
template <class S>
SSPtr<S> fixture_t() {
  BigradedModule m;
  m.set_dim({0, 0}, 1);
  m.set_dim({0, 1}, 1);
  RComplex<S> p0;
  p0.module = m;
  p0.r = 0;
  p0.differential = BigradedMap<S>(m, m, {0, 1});
  p0.differential.set_block({0, 0}, Mat<S>::Identity(1, 1));
  RComplex<S> p1 = RComplex<S>::with_zero_differential({}, 1);
  HomologyData<S> h0 = homology(p0);
  BigradedMap<S> psi0(h0.H, BigradedModule{}, {0, 0});
  return share(SpectralSequence<S>::make({p0, p1}, {psi0}));
}

template <class S>
SpectralMorphism<S> fixture_pi_from_t() {
  SSPtr<S> t = fixture_t<S>();
  SSPtr<S> r = ring_at<S>(0, 0);
  BigradedMap<S> pi0(t->module_at(0), r->module_at(0), {0, 0});
  pi0.set_block({0, 0}, Mat<S>::Identity(1, 1));
  return SpectralMorphism<S>::derive(pi0, t, r);
}

// Pagewise cokernel of a morphism: each page is the honest cokernel complex,
// with identity characteristic maps wherever the dimensions allow. There is
// no spectral sequence structure on this in general (that is the point of the
// no-cokernel example); the validator is expected to reject it.
template <class S>
SpectralSequence<S> pagewise_cokernel(const SpectralMorphism<S>& f) {
  Index k = f.stored_pages();
  std::vector<RComplex<S>> pages;
  for (Index m = 0; m < k; ++m) {
    const BigradedModule& bm = f.target().module_at(m);
    BigradedModule qm;
    std::map<Bidegree, Mat<S>> reps, projs;
    for (auto& [pq, n] : bm.support()) {
      Mat<S> img = image_basis<S>(f.page(m).block(pq));
      Mat<S> rep = extend_basis<S>(img, Mat<S>::Identity(n, n));
      qm.set_dim(pq, rep.cols());
      if (rep.cols() == 0) continue;
      Mat<S> full = hstack<S>(img, rep);
      projs[pq] = inverse(full).bottomRows(rep.cols());
      reps[pq] = rep;
    }
    RComplex<S> page;
    page.module = qm;
    page.r = static_cast<int>(m);
    Bidegree shift{-static_cast<int>(m), 1 - static_cast<int>(m)};
    page.differential = BigradedMap<S>(qm, qm, shift);
    const BigradedMap<S>& d = f.target().page(m).differential;
    for (auto& [pq, dim] : qm.support()) {
      if (qm.dim(pq + shift) == 0) continue;
      Mat<S> blk = mul<S>(projs[pq + shift], mul<S>(d.block(pq), reps[pq]));
      page.differential.set_block(pq, std::move(blk));
    }
    pages.push_back(std::move(page));
  }
  std::vector<BigradedMap<S>> psis;
  for (Index m = 0; m + 1 < k; ++m) {
    HomologyData<S> h = homology(pages[static_cast<size_t>(m)]);
    BigradedMap<S> psi(h.H, pages[static_cast<size_t>(m + 1)].module, {0, 0});
    for (auto& [pq, d] : h.H.support()) {
      if (pages[static_cast<size_t>(m + 1)].module.dim(pq) == d)
        psi.set_block(pq, Mat<S>::Identity(d, d));
      // else: leave the mismatch for the validator to report
    }
    psis.push_back(std::move(psi));
  }
  return SpectralSequence<S>::make(std::move(pages), std::move(psis));
}

}  // namespace sseq
