#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "sseq/bigraded.hpp"

namespace sseq {

// A spectral sequence stored as an explicit tower of pages 0..M together with
// the characteristic isomorphisms ψ_m : H(A_m) -> A_{m+1}. Page M must have
// zero differential; pages beyond M are implicit (page M, zero differential,
// identity ψ), which every accessor below respects.
template <class S>
class SpectralSequence {
 public:
  static SpectralSequence make(std::vector<RComplex<S>> pages, std::vector<BigradedMap<S>> charmaps) {
    SpectralSequence ss;
    ss.pages_ = std::move(pages);
    ss.psis_ = std::move(charmaps);
    if (ss.pages_.empty()) ss.pages_.push_back(RComplex<S>::with_zero_differential({}, 0));
    ss.homs_.resize(ss.pages_.size());
    for (size_t m = 0; m < ss.pages_.size(); ++m)
      if (validate_rcomplex(ss.pages_[m]).ok) ss.homs_[m] = homology(ss.pages_[m]);
    return ss;
  }

  Index top() const { return static_cast<Index>(pages_.size()) - 1; }

  const RComplex<S>& stored_page(Index m) const { return pages_[static_cast<size_t>(m)]; }

  // Clamped access: beyond the stabilization page the complex is page M with
  // zero differential, reindexed to page m.
  RComplex<S> page(Index m) const {
    if (m <= top()) return pages_[static_cast<size_t>(m)];
    return RComplex<S>::with_zero_differential(pages_.back().module, static_cast<int>(m));
  }

  const BigradedModule& module_at(Index m) const {
    return pages_[static_cast<size_t>(std::min(m, top()))].module;
  }

  bool homology_ready(Index m) const {
    return homs_[static_cast<size_t>(std::min(m, top()))].has_value();
  }

  const HomologyData<S>& homology_at(Index m) const {
    auto& h = homs_[static_cast<size_t>(std::min(m, top()))];
    if (!h) throw InternalInvariantViolation("homology requested on an invalid page");
    return *h;
  }

  BigradedMap<S> charmap(Index m) const {
    if (m < top()) return psis_[static_cast<size_t>(m)];
    return BigradedMap<S>::identity(pages_.back().module);
  }

  Index charmap_count() const { return static_cast<Index>(psis_.size()); }

  ValidationReport validate() const {
    for (size_t m = 0; m < pages_.size(); ++m) {
      if (pages_[m].r != static_cast<int>(m))
        return ValidationReport::failure("page " + std::to_string(m) + " is labelled r = " +
                                         std::to_string(pages_[m].r));
      ValidationReport vr = validate_rcomplex(pages_[m]);
      if (!vr.ok) return ValidationReport::failure("page " + std::to_string(m) + ": " + vr.message);
    }
    if (static_cast<Index>(psis_.size()) != top())
      return ValidationReport::failure("expected " + std::to_string(top()) + " characteristic maps, got " +
                                       std::to_string(psis_.size()));
    for (Index m = 0; m < top(); ++m) {
      const HomologyData<S>& h = *homs_[static_cast<size_t>(m)];
      const BigradedModule& next = pages_[static_cast<size_t>(m + 1)].module;
      BigradedModule joint = direct_sum(h.H, next);
      for (auto& [pq, d] : joint.support()) {
        if (h.H.dim(pq) != next.dim(pq))
          return ValidationReport::failure(
              "charmap " + std::to_string(m) + ": dim H(page " + std::to_string(m) + ") at " + pq.str() +
              " is " + std::to_string(h.H.dim(pq)) + " but dim page " + std::to_string(m + 1) + " is " +
              std::to_string(next.dim(pq)));
      }
      const BigradedMap<S>& psi = psis_[static_cast<size_t>(m)];
      if (psi.source() != h.H || psi.target() != next || psi.shift() != Bidegree{0, 0})
        return ValidationReport::failure("charmap " + std::to_string(m) + ": endpoints are not H(page " +
                                         std::to_string(m) + ") -> page " + std::to_string(m + 1));
      std::string why;
      if (!psi.shape_ok(&why))
        return ValidationReport::failure("charmap " + std::to_string(m) + ": " + why);
      for (auto& [pq, d] : h.H.support())
        if (!is_invertible(psi.block(pq)))
          return ValidationReport::failure("charmap " + std::to_string(m) + " not invertible at " + pq.str());
    }
    for (auto& [pq, d] : pages_.back().module.support())
      if (!sseq::is_zero(pages_.back().differential.block(pq)))
        return ValidationReport::failure("page " + std::to_string(top()) +
                                         " differential is nonzero at " + pq.str() +
                                         " (tower not stabilized)");
    return ValidationReport::success();
  }

  friend bool operator==(const SpectralSequence& a, const SpectralSequence& b) {
    return a.pages_ == b.pages_ && a.psis_ == b.psis_;
  }

 private:
  std::vector<RComplex<S>> pages_;
  std::vector<BigradedMap<S>> psis_;
  std::vector<std::optional<HomologyData<S>>> homs_;
};

template <class S>
using SSPtr = std::shared_ptr<const SpectralSequence<S>>;

template <class S>
SSPtr<S> share(SpectralSequence<S> ss) {
  return std::make_shared<const SpectralSequence<S>>(std::move(ss));
}

template <class S>
SSPtr<S> make_validated(std::vector<RComplex<S>> pages, std::vector<BigradedMap<S>> charmaps,
                        const char* what) {
  auto ss = share(SpectralSequence<S>::make(std::move(pages), std::move(charmaps)));
  ValidationReport vr = ss->validate();
  if (!vr.ok) throw InternalInvariantViolation(std::string(what) + ": " + vr.message);
  return ss;
}

// ψ^B_m ∘ H(f_m) ∘ (ψ^A_m)^{-1} for all the page-0 driven constructions.
template <class S>
class TransportCtx {
 public:
  TransportCtx(const SpectralSequence<S>& a, const SpectralSequence<S>& b, Index k)
      : a_(a), b_(b), k_(k) {
    psi_b_.reserve(static_cast<size_t>(k));
    psi_a_inv_.reserve(static_cast<size_t>(k));
    for (Index m = 0; m < k; ++m) {
      psi_b_.push_back(b.charmap(m));
      psi_a_inv_.push_back(a.charmap(m).inverse_map());
    }
  }

  Index pages() const { return k_ + 1; }

  BigradedMap<S> step(Index m, const BigradedMap<S>& fm) const {
    BigradedMap<S> h = induced_on_homology_unchecked(fm, a_.homology_at(m), b_.homology_at(m));
    return compose(psi_b_[static_cast<size_t>(m)], compose(h, psi_a_inv_[static_cast<size_t>(m)]));
  }

  std::vector<BigradedMap<S>> run(const BigradedMap<S>& f0) const {
    std::vector<BigradedMap<S>> out;
    out.reserve(static_cast<size_t>(k_) + 1);
    out.push_back(f0);
    for (Index m = 0; m < k_; ++m) out.push_back(step(m, out.back()));
    return out;
  }

 private:
  const SpectralSequence<S>& a_;
  const SpectralSequence<S>& b_;
  Index k_;
  std::vector<BigradedMap<S>> psi_b_, psi_a_inv_;
};

// Morphism of spectral sequences. All pages up to max(top_A, top_B) are
// stored; accessors clamp so the stabilized tail is always available.
template <class S>
class SpectralMorphism {
 public:
  SpectralMorphism() = default;

  static SpectralMorphism unchecked(SSPtr<S> src, SSPtr<S> tgt, std::vector<BigradedMap<S>> pages) {
    SpectralMorphism f;
    f.src_ = std::move(src);
    f.tgt_ = std::move(tgt);
    f.pages_ = std::move(pages);
    return f;
  }

  static SpectralMorphism from_pages(SSPtr<S> src, SSPtr<S> tgt, std::vector<BigradedMap<S>> pages) {
    SpectralMorphism f = unchecked(std::move(src), std::move(tgt), std::move(pages));
    ValidationReport vr = f.validate();
    if (!vr.ok) throw NotAMorphism(0, vr.message);
    return f;
  }

  // A morphism is completely determined by its 0-page; derive the rest and
  // check each derived page is a chain map.
  static SpectralMorphism derive(const BigradedMap<S>& f0, SSPtr<S> src, SSPtr<S> tgt) {
    Index k = std::max(src->top(), tgt->top());
    TransportCtx<S> ctx(*src, *tgt, k);
    std::vector<BigradedMap<S>> pages = ctx.run(f0);
    for (Index m = 0; m <= k; ++m) {
      BigradedMap<S> comm = compose(tgt->page(m).differential, pages[static_cast<size_t>(m)]) -
                            compose(pages[static_cast<size_t>(m)], src->page(m).differential);
      if (!comm.is_zero())
        throw NotAMorphism(static_cast<int>(m), "derived page map does not commute with differentials");
    }
    return unchecked(std::move(src), std::move(tgt), std::move(pages));
  }

  const SpectralSequence<S>& source() const { return *src_; }
  const SpectralSequence<S>& target() const { return *tgt_; }
  const SSPtr<S>& source_ptr() const { return src_; }
  const SSPtr<S>& target_ptr() const { return tgt_; }

  Index stored_pages() const { return static_cast<Index>(pages_.size()); }

  const BigradedMap<S>& page(Index m) const {
    return pages_[static_cast<size_t>(std::min(m, stored_pages() - 1))];
  }

  ValidationReport validate() const {
    Index k = std::max(src_->top(), tgt_->top());
    if (stored_pages() < k + 1)
      return ValidationReport::failure("expected at least " + std::to_string(k + 1) + " page maps, got " +
                                       std::to_string(stored_pages()));
    k = stored_pages() - 1;  // extra stored tail pages must be consistent too
    for (Index m = 0; m <= k; ++m) {
      const BigradedMap<S>& fm = pages_[static_cast<size_t>(m)];
      if (fm.shift() != Bidegree{0, 0})
        return ValidationReport::failure("page " + std::to_string(m) + " map has nonzero bidegree");
      if (fm.source() != src_->module_at(m) || fm.target() != tgt_->module_at(m))
        return ValidationReport::failure("page " + std::to_string(m) + " map endpoints mismatch");
      std::string why;
      if (!fm.shape_ok(&why)) return ValidationReport::failure("page " + std::to_string(m) + ": " + why);
      BigradedMap<S> comm = compose(tgt_->page(m).differential, fm) - compose(fm, src_->page(m).differential);
      if (!comm.is_zero())
        return ValidationReport::failure("page " + std::to_string(m) + " map is not a chain map");
    }
    TransportCtx<S> ctx(*src_, *tgt_, k);
    for (Index m = 0; m < k; ++m) {
      BigradedMap<S> want = ctx.step(m, pages_[static_cast<size_t>(m)]);
      if (!(want == pages_[static_cast<size_t>(m + 1)]))
        return ValidationReport::failure("page " + std::to_string(m + 1) +
                                         " map is not compatible with the characteristic maps");
    }
    return ValidationReport::success();
  }

  friend bool operator==(const SpectralMorphism& a, const SpectralMorphism& b) {
    Index k = std::max(a.stored_pages(), b.stored_pages());
    for (Index m = 0; m < k; ++m)
      if (!(a.page(m) == b.page(m))) return false;
    return true;
  }

  friend SpectralMorphism compose(const SpectralMorphism& g, const SpectralMorphism& f) {
    Index k = std::max({f.stored_pages(), g.stored_pages()});
    std::vector<BigradedMap<S>> pages;
    pages.reserve(static_cast<size_t>(k));
    for (Index m = 0; m < k; ++m) pages.push_back(compose(g.page(m), f.page(m)));
    return unchecked(f.src_, g.tgt_, std::move(pages));
  }

  friend SpectralMorphism operator+(const SpectralMorphism& a, const SpectralMorphism& b) {
    Index k = std::max(a.stored_pages(), b.stored_pages());
    std::vector<BigradedMap<S>> pages;
    for (Index m = 0; m < k; ++m) pages.push_back(a.page(m) + b.page(m));
    return unchecked(a.src_, a.tgt_, std::move(pages));
  }

  friend SpectralMorphism operator*(const SpectralMorphism& a, S c) {
    std::vector<BigradedMap<S>> pages;
    for (Index m = 0; m < a.stored_pages(); ++m) pages.push_back(a.page(m) * c);
    return unchecked(a.src_, a.tgt_, std::move(pages));
  }

 private:
  SSPtr<S> src_, tgt_;
  std::vector<BigradedMap<S>> pages_;
};

template <class S>
SpectralMorphism<S> identity_morphism(const SSPtr<S>& a) {
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= a->top(); ++m) pages.push_back(BigradedMap<S>::identity(a->module_at(m)));
  return SpectralMorphism<S>::unchecked(a, a, std::move(pages));
}

template <class S>
SpectralMorphism<S> zero_morphism(const SSPtr<S>& a, const SSPtr<S>& b) {
  Index k = std::max(a->top(), b->top());
  std::vector<BigradedMap<S>> pages;
  for (Index m = 0; m <= k; ++m)
    pages.push_back(BigradedMap<S>::zero(a->module_at(m), b->module_at(m), {0, 0}));
  return SpectralMorphism<S>::unchecked(a, b, std::move(pages));
}

// ---------------------------------------------------------------------------
// Predicates (Def 5.1 / 5.2 shapes: surjections, E_r-quasi-isos, r-fibrations)

template <class S>
bool is_surjection(const SpectralMorphism<S>& f) {
  for (Index m = 0; m < f.stored_pages(); ++m)
    if (!f.page(m).blockwise_surjective()) return false;
  return true;
}

template <class S>
bool is_Er_quasi_iso(const SpectralMorphism<S>& f, Index r) {
  const SpectralSequence<S>& a = f.source();
  const SpectralSequence<S>& b = f.target();
  BigradedMap<S> hf = induced_on_homology(f.page(r), a.page(r), b.page(r), a.homology_at(r), b.homology_at(r));
  bool qiso = hf.blockwise_invertible();
  // equivalently: f_k is an isomorphism for k > r; cross-check on the tower
  bool tail = true;
  Index last = std::max(f.stored_pages() - 1, r + 1);
  for (Index k = r + 1; k <= last; ++k)
    if (!f.page(k).blockwise_invertible()) {
      tail = false;
      break;
    }
  if (qiso != tail)
    throw InternalInvariantViolation("quasi-iso at page r disagrees with isomorphism above page r");
  return qiso;
}

template <class S>
bool is_r_fibration(const SpectralMorphism<S>& f, Index r) {
  for (Index k = 0; k <= r; ++k)
    if (!f.page(k).blockwise_surjective()) return false;
  return true;
}

template <class S>
bool is_acyclic_r_fibration(const SpectralMorphism<S>& f, Index r) {
  return is_r_fibration(f, r) && is_Er_quasi_iso(f, r);
}

// ---------------------------------------------------------------------------
// Direct sums / finite products

template <class S>
struct SumLayout {
  std::vector<BigradedModule> parts;
  BigradedModule total;

  static SumLayout of(std::vector<BigradedModule> parts) {
    SumLayout l;
    l.parts = std::move(parts);
    for (auto& p : l.parts) l.total = direct_sum(l.total, p);
    return l;
  }

  Index offset(size_t i, Bidegree pq) const {
    Index o = 0;
    for (size_t j = 0; j < i; ++j) o += parts[j].dim(pq);
    return o;
  }

  template <class T = S>
  BigradedMap<T> inclusion(size_t i) const {
    BigradedMap<T> f(parts[i], total, {0, 0});
    for (auto& [pq, d] : parts[i].support()) {
      Mat<T> m = Mat<T>::Zero(total.dim(pq), d);
      m.middleRows(offset(i, pq), d) = Mat<T>::Identity(d, d);
      f.set_block(pq, std::move(m));
    }
    return f;
  }

  template <class T = S>
  BigradedMap<T> projection(size_t i) const {
    BigradedMap<T> f(total, parts[i], {0, 0});
    for (auto& [pq, d] : total.support()) {
      Index di = parts[i].dim(pq);
      if (di == 0) continue;
      Mat<T> m = Mat<T>::Zero(di, d);
      m.middleCols(offset(i, pq), di) = Mat<T>::Identity(di, di);
      f.set_block(pq, std::move(m));
    }
    return f;
  }
};

template <class S>
struct ProductResult {
  SSPtr<S> ss;
  SpectralMorphism<S> proj_a, proj_b;
  SpectralMorphism<S> inc_a, inc_b;
};

template <class S>
ProductResult<S> product(const SSPtr<S>& a, const SSPtr<S>& b) {
  Index k = std::max(a->top(), b->top());
  std::vector<RComplex<S>> pages;
  std::vector<SumLayout<S>> layouts;
  for (Index m = 0; m <= k; ++m) {
    SumLayout<S> lay = SumLayout<S>::of({a->module_at(m), b->module_at(m)});
    RComplex<S> pm;
    pm.module = lay.total;
    pm.r = static_cast<int>(m);
    BigradedMap<S> d(lay.total, lay.total, {-static_cast<int>(m), 1 - static_cast<int>(m)});
    BigradedMap<S> da = a->page(m).differential, db = b->page(m).differential;
    for (auto& [pq, dim] : lay.total.support()) {
      Index rows = lay.total.dim(pq + d.shift());
      if (rows == 0) continue;
      Mat<S> blk = Mat<S>::Zero(rows, dim);
      Index ca = a->module_at(m).dim(pq), ra = a->module_at(m).dim(pq + d.shift());
      blk.topLeftCorner(ra, ca) = da.block(pq);
      blk.bottomRightCorner(rows - ra, dim - ca) = db.block(pq);
      d.set_block(pq, std::move(blk));
    }
    pm.differential = std::move(d);
    pages.push_back(std::move(pm));
    layouts.push_back(std::move(lay));
  }
  // canonical charmaps: H(sum) -> H(A) ⊕ H(B) -> A_{m+1} ⊕ B_{m+1}
  std::vector<BigradedMap<S>> psis;
  std::vector<HomologyData<S>> homs;
  for (Index m = 0; m <= k; ++m) homs.push_back(homology(pages[static_cast<size_t>(m)]));
  for (Index m = 0; m < k; ++m) {
    auto& lay = layouts[static_cast<size_t>(m)];
    auto& lay1 = layouts[static_cast<size_t>(m + 1)];
    BigradedMap<S> ha = induced_on_homology_unchecked(lay.template projection<S>(0),
                                                      homs[static_cast<size_t>(m)], a->homology_at(m));
    BigradedMap<S> hb = induced_on_homology_unchecked(lay.template projection<S>(1),
                                                      homs[static_cast<size_t>(m)], b->homology_at(m));
    BigradedMap<S> psi = compose(lay1.template inclusion<S>(0), compose(a->charmap(m), ha)) +
                         compose(lay1.template inclusion<S>(1), compose(b->charmap(m), hb));
    psis.push_back(std::move(psi));
  }
  ProductResult<S> out;
  out.ss = make_validated<S>(std::move(pages), std::move(psis), "product");
  std::vector<BigradedMap<S>> pa, pb, ia, ib;
  for (Index m = 0; m <= k; ++m) {
    auto& lay = layouts[static_cast<size_t>(m)];
    pa.push_back(lay.template projection<S>(0));
    pb.push_back(lay.template projection<S>(1));
    ia.push_back(lay.template inclusion<S>(0));
    ib.push_back(lay.template inclusion<S>(1));
  }
  out.proj_a = SpectralMorphism<S>::from_pages(out.ss, a, std::move(pa));
  out.proj_b = SpectralMorphism<S>::from_pages(out.ss, b, std::move(pb));
  out.inc_a = SpectralMorphism<S>::from_pages(a, out.ss, std::move(ia));
  out.inc_b = SpectralMorphism<S>::from_pages(b, out.ss, std::move(ib));
  return out;
}

template <class S>
SpectralMorphism<S> pair_into_product(const ProductResult<S>& prod, const SpectralMorphism<S>& f,
                                      const SpectralMorphism<S>& g) {
  return compose(prod.inc_a, f) + compose(prod.inc_b, g);
}

template <class S>
SSPtr<S> final_object() {
  return share(SpectralSequence<S>::make({RComplex<S>::with_zero_differential({}, 0)}, {}));
}

// ---------------------------------------------------------------------------
// Pullback of a surjection along any map (Lemma 5.4 shape)

template <class S>
struct PullbackResult {
  SSPtr<S> ss;
  SpectralMorphism<S> pi_u, pi_a;

  // Mediating morphism for a test cone (yU : Y -> U, yA : Y -> A with
  // g∘yU = p∘yA); unique when it exists.
  std::optional<SpectralMorphism<S>> mediating(const SpectralMorphism<S>& y_u,
                                               const SpectralMorphism<S>& y_a) const {
    Index k = std::max(ss->top(), y_u.source().top());
    std::vector<BigradedMap<S>> pages;
    for (Index m = 0; m <= k; ++m) {
      const BigradedModule& ym = y_u.source().module_at(m);
      BigradedMap<S> blkmap(ym, ss->module_at(m), {0, 0});
      for (auto& [pq, d] : ym.support()) {
        Index xd = ss->module_at(m).dim(pq);
        Mat<S> emb = vstack<S>(pi_u.page(m).block(pq), pi_a.page(m).block(pq));
        Mat<S> rhs = vstack<S>(y_u.page(m).block(pq), y_a.page(m).block(pq));
        if (xd == 0) {
          if (!sseq::is_zero(rhs)) return std::nullopt;
          continue;
        }
        auto sol = solve_matrix<S>(emb, rhs);
        if (!sol) return std::nullopt;
        blkmap.set_block(pq, *sol);
      }
      pages.push_back(std::move(blkmap));
    }
    try {
      return SpectralMorphism<S>::from_pages(y_u.source_ptr(), ss, std::move(pages));
    } catch (const NotAMorphism&) {
      return std::nullopt;
    }
  }
};

template <class S>
PullbackResult<S> pullback_surjection(const SpectralMorphism<S>& g, const SpectralMorphism<S>& p) {
  if (g.target_ptr() != p.target_ptr() && !(g.target() == p.target()))
    throw DimensionMismatch("pullback: maps do not share a target");
  if (!is_surjection(p))
    throw NotASurjection("pullback refused: the map being pulled back is not a pagewise surjection");

  const SpectralSequence<S>& u = g.source();
  const SpectralSequence<S>& a = p.source();
  const SpectralSequence<S>& b = p.target();
  Index k = std::max({u.top(), a.top(), b.top()});

  std::vector<RComplex<S>> pages;
  std::vector<BigradedMap<S>> pis_u, pis_a;
  for (Index m = 0; m <= k; ++m) {
    RComplexPullback<S> pb = pullback_rcomplex(u.page(m), a.page(m), b.page(m), g.page(m), p.page(m));
    pages.push_back(std::move(pb.X));
    pis_u.push_back(std::move(pb.pi_u));
    pis_a.push_back(std::move(pb.pi_a));
  }
  std::vector<HomologyData<S>> homs;
  for (Index m = 0; m <= k; ++m) homs.push_back(homology(pages[static_cast<size_t>(m)]));
  std::vector<BigradedMap<S>> psis;
  for (Index m = 0; m < k; ++m) {
    BigradedMap<S> yu = compose(u.charmap(m), induced_on_homology_unchecked(
                                                  pis_u[static_cast<size_t>(m)],
                                                  homs[static_cast<size_t>(m)], u.homology_at(m)));
    BigradedMap<S> ya = compose(a.charmap(m), induced_on_homology_unchecked(
                                                  pis_a[static_cast<size_t>(m)],
                                                  homs[static_cast<size_t>(m)], a.homology_at(m)));
    BigradedMap<S> psi(homs[static_cast<size_t>(m)].H, pages[static_cast<size_t>(m + 1)].module, {0, 0});
    for (auto& [pq, d] : psi.source().support()) {
      Mat<S> emb = vstack<S>(pis_u[static_cast<size_t>(m + 1)].block(pq),
                             pis_a[static_cast<size_t>(m + 1)].block(pq));
      Mat<S> rhs = vstack<S>(yu.block(pq), ya.block(pq));
      auto sol = solve_matrix<S>(emb, rhs);
      if (!sol)
        throw InternalInvariantViolation("pullback charmap does not land in the next page at " + pq.str());
      psi.set_block(pq, *sol);
    }
    psis.push_back(std::move(psi));
  }
  PullbackResult<S> out;
  out.ss = make_validated<S>(std::move(pages), std::move(psis), "pullback");
  out.pi_u = SpectralMorphism<S>::from_pages(out.ss, g.source_ptr(), std::move(pis_u));
  out.pi_a = SpectralMorphism<S>::from_pages(out.ss, p.source_ptr(), std::move(pis_a));
  if (!is_surjection(out.pi_u))
    throw InternalInvariantViolation("pullback projection to the base is not a surjection");
  return out;
}

// ---------------------------------------------------------------------------
// Entry coordinates for bidegree-shifted maps, and the morphism space

template <class S>
struct MapLayout {
  BigradedModule src, tgt;
  Bidegree shift;
  std::vector<std::tuple<Bidegree, Index, Index>> window;  // (pq, rows, cols)
  Index total = 0;

  static MapLayout make(BigradedModule src, BigradedModule tgt, Bidegree shift) {
    MapLayout l;
    l.src = std::move(src);
    l.tgt = std::move(tgt);
    l.shift = shift;
    for (auto& [pq, c] : l.src.support()) {
      Index r = l.tgt.dim(pq + shift);
      if (r == 0) continue;
      l.window.emplace_back(pq, r, c);
      l.total += r * c;
    }
    return l;
  }

  BigradedMap<S> unvec(const Vec<S>& x) const {
    BigradedMap<S> f(src, tgt, shift);
    Index at = 0;
    for (auto& [pq, r, c] : window) {
      Mat<S> blk(r, c);
      for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) blk(i, j) = x(at++);
      f.set_block(pq, std::move(blk));
    }
    return f;
  }

  Vec<S> vec(const BigradedMap<S>& f) const {
    Vec<S> x(total);
    Index at = 0;
    for (auto& [pq, r, c] : window) {
      Mat<S> blk = f.block(pq);
      for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i) x(at++) = blk(i, j);
    }
    return x;
  }
};

template <class S>
void append_entries(std::vector<S>& out, const BigradedMap<S>& f) {
  for (auto& [pq, c] : f.source().support()) {
    Index r = f.target().dim(pq + f.shift());
    if (r == 0) continue;
    Mat<S> blk = f.block(pq);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) out.push_back(blk(i, j));
  }
}

// Solution set of an affine problem  residual(x) = 0, residual affine in x.
template <class S>
struct AffineSolution {
  bool solvable = false;
  Vec<S> particular;
  Mat<S> kernel;
  Index dim() const { return kernel.cols(); }
};

template <class S, class F>
AffineSolution<S> solve_affine(Index unknowns, F&& residual) {
  std::vector<S> r0v = residual(Vec<S>::Zero(unknowns));
  Index rows = static_cast<Index>(r0v.size());
  Vec<S> r0(rows);
  for (Index i = 0; i < rows; ++i) r0(i) = r0v[static_cast<size_t>(i)];
  Mat<S> l(rows, unknowns);
  for (Index k = 0; k < unknowns; ++k) {
    Vec<S> e = Vec<S>::Zero(unknowns);
    e(k) = S(1);
    std::vector<S> rv = residual(e);
    for (Index i = 0; i < rows; ++i) l(i, k) = rv[static_cast<size_t>(i)] - r0(i);
  }
  AffineSolution<S> sol;
  auto part = solve<S>(l, Vec<S>(-r0));
  sol.solvable = part.has_value();
  sol.particular = sol.solvable ? *part : Vec<S>::Zero(unknowns);
  sol.kernel = kernel_basis(l);
  return sol;
}

// Extra linear conditions on a candidate morphism, evaluated on its
// transported pages; must return maps that are required to vanish.
template <class S>
using PageConstraint = std::function<std::vector<BigradedMap<S>>(const std::vector<BigradedMap<S>>&)>;

template <class S>
struct HomSpace {
  SSPtr<S> src, tgt;
  MapLayout<S> layout;
  AffineSolution<S> sol;

  Index dim() const { return sol.kernel.cols(); }
  bool solvable() const { return sol.solvable; }

  BigradedMap<S> page0(const Vec<S>& coeffs) const {
    Vec<S> x = sol.particular;
    if (coeffs.rows() > 0) x += sol.kernel.lazyProduct(coeffs);
    return layout.unvec(x);
  }

  SpectralMorphism<S> morphism(const Vec<S>& coeffs) const {
    return SpectralMorphism<S>::derive(page0(coeffs), src, tgt);
  }

  std::optional<Vec<S>> coords(const SpectralMorphism<S>& f) const {
    return solve<S>(sol.kernel, Vec<S>(layout.vec(f.page(0)) - sol.particular));
  }
};

template <class S>
HomSpace<S> hom_space(const SSPtr<S>& a, const SSPtr<S>& b,
                      const std::vector<PageConstraint<S>>& extra = {}) {
  HomSpace<S> hs;
  hs.src = a;
  hs.tgt = b;
  hs.layout = MapLayout<S>::make(a->module_at(0), b->module_at(0), {0, 0});
  Index k = std::max(a->top(), b->top());
  TransportCtx<S> ctx(*a, *b, k);
  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    BigradedMap<S> f0 = hs.layout.unvec(x);
    std::vector<BigradedMap<S>> pages = ctx.run(f0);
    for (Index m = 0; m <= k; ++m) {
      BigradedMap<S> comm = compose(b->page(m).differential, pages[static_cast<size_t>(m)]) -
                            compose(pages[static_cast<size_t>(m)], a->page(m).differential);
      append_entries(out, comm);
    }
    for (auto& c : extra)
      for (auto& g : c(pages)) append_entries(out, g);
    return out;
  };
  hs.sol = solve_affine<S>(hs.layout.total, residual);
  return hs;
}

// ---------------------------------------------------------------------------
// Isomorphism search. Equality of spectral sequences is basis-dependent, so
// cross-construction comparisons go through an explicit isomorphism: try the
// supplied candidates, then hom-space basis elements, then seeded random
// combinations. A morphism invertible on page 0 is invertible everywhere.

template <class S>
S random_scalar(std::mt19937_64& rng);
template <>
inline Fp random_scalar<Fp>(std::mt19937_64& rng) {
  return Fp(static_cast<long long>(rng() % Fp::modulus()));
}
template <>
inline Rational random_scalar<Rational>(std::mt19937_64& rng) {
  return Rational(static_cast<long long>(rng() % 7) - 3);
}

template <class S>
std::optional<SpectralMorphism<S>> find_isomorphism(const SSPtr<S>& a, const SSPtr<S>& b,
                                                    const std::vector<BigradedMap<S>>& candidates = {},
                                                    std::uint64_t seed = 12345, int tries = 400,
                                                    const std::vector<PageConstraint<S>>& extra = {}) {
  Index k = std::max(a->top(), b->top());
  for (Index m = 0; m <= k; ++m)
    if (!(a->module_at(m) == b->module_at(m))) return std::nullopt;

  auto attempt = [&](const BigradedMap<S>& f0) -> std::optional<SpectralMorphism<S>> {
    if (!f0.blockwise_invertible()) return std::nullopt;
    try {
      SpectralMorphism<S> f = SpectralMorphism<S>::derive(f0, a, b);
      if (!extra.empty()) {
        std::vector<BigradedMap<S>> pages;
        for (Index m = 0; m <= std::max(a->top(), b->top()); ++m) pages.push_back(f.page(m));
        for (auto& c : extra)
          for (auto& g : c(pages))
            if (!g.is_zero()) return std::nullopt;
      }
      return f;
    } catch (const NotAMorphism&) {
      return std::nullopt;
    }
  };

  for (auto& c : candidates)
    if (auto f = attempt(c)) return f;

  HomSpace<S> hs = hom_space(a, b, extra);
  if (!hs.solvable()) return std::nullopt;
  if (auto f = attempt(hs.page0(Vec<S>::Zero(hs.dim())))) return f;
  for (Index j = 0; j < hs.dim(); ++j) {
    Vec<S> e = Vec<S>::Zero(hs.dim());
    e(j) = S(1);
    if (auto f = attempt(hs.page0(e))) return f;
  }
  std::mt19937_64 rng(seed);
  for (int t = 0; t < tries; ++t) {
    Vec<S> c(hs.dim());
    for (Index j = 0; j < hs.dim(); ++j) c(j) = random_scalar<S>(rng);
    if (auto f = attempt(hs.page0(c))) return f;
  }
  return std::nullopt;
}

}  // namespace sseq
