#pragma once

#include <random>

#include "sseq/filtered.hpp"
#include "sseq/multicomplex.hpp"
#include "sseq/paths.hpp"
#include "sseq/representables.hpp"

namespace sseq {

// Deterministic RNG wrapper: mt19937_64 is fully specified by the standard,
// and values are reduced by hand so runs are byte-identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }
  std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }
  int range(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  bool chance(int pct) { return static_cast<int>(below(100)) < pct; }

  template <class S>
  S scalar() {
    return random_scalar<S>(eng_);
  }
  template <class S>
  S nonzero_scalar() {
    for (;;) {
      S x = scalar<S>();
      if (x != S(0)) return x;
    }
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t x = seed ^ (a + 0x9e3779b97f4a7c15ULL) ^ (b * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL);
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// What the harness samples from: bounded windows, desk-scale dimensions.
struct GenSpec {
  std::uint64_t seed = 42;
  int trials = 100;
  int window = 4;    // |p|, |q| of generated bidegrees stay within this
  int max_dim = 3;   // soft cap per bidegree, via the piece count
  int max_pieces = 4;
  int density = 60;  // percent fill for random automorphisms/coefficients
};

// --------------------------------------------------------------- filtered

// Direct sums of rank-1 dots and rank-2 arrows (x in degree n, dx in degree
// n+1 with level drop), conjugated by a random filtration-preserving
// automorphism; guarantees d² = 0 and adapted bases, and the conjugation
// produces non-split filtrations.
template <class S>
FcPtr<S> gen_filtered(const GenSpec& spec, Rng& rng) {
  int half = std::max(1, spec.window / 2);
  int lo = -half, hi = half;
  FilteredComplex<S> a;
  a.n_min = lo;
  int degs = hi - lo + 1;
  a.levels.assign(static_cast<size_t>(degs), {});
  std::vector<std::vector<std::pair<Index, Index>>> arrows(static_cast<size_t>(degs));

  int pieces = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_pieces)));
  for (int k = 0; k < pieces; ++k) {
    if (rng.chance(40)) {
      int n = rng.range(lo, hi);
      if (static_cast<int>(a.levels[static_cast<size_t>(n - lo)].size()) >= spec.max_dim) continue;
      a.levels[static_cast<size_t>(n - lo)].push_back(rng.range(lo, hi));
    } else {
      int n = rng.range(lo, hi - 1);
      auto& src_l = a.levels[static_cast<size_t>(n - lo)];
      auto& tgt_l = a.levels[static_cast<size_t>(n + 1 - lo)];
      if (static_cast<int>(src_l.size()) >= spec.max_dim || static_cast<int>(tgt_l.size()) >= spec.max_dim)
        continue;
      int lx = rng.range(lo, hi);
      int ly = std::max(lo, lx - rng.range(0, 2));
      src_l.push_back(lx);
      tgt_l.push_back(ly);
      arrows[static_cast<size_t>(n - lo)].emplace_back(static_cast<Index>(src_l.size()) - 1,
                                                       static_cast<Index>(tgt_l.size()) - 1);
    }
  }
  for (int n = lo; n <= hi; ++n) {
    Mat<S> d = Mat<S>::Zero(a.dim(n + 1), a.dim(n));
    for (auto& [ci, ri] : arrows[static_cast<size_t>(n - lo)]) d(ri, ci) = rng.nonzero_scalar<S>();
    a.d.push_back(std::move(d));
  }

  // conjugate by unit-triangular-by-level automorphisms
  std::vector<Mat<S>> ts, tinvs;
  for (int n = lo; n <= hi; ++n) {
    Index dn = a.dim(n);
    Mat<S> t = Mat<S>::Identity(dn, dn);
    const auto& lv = a.levels_at(n);
    for (Index i = 0; i < dn; ++i)
      for (Index j = 0; j < dn; ++j) {
        bool strictly_lower = std::pair(lv[static_cast<size_t>(j)], j) < std::pair(lv[static_cast<size_t>(i)], i);
        if (i != j && strictly_lower && rng.chance(spec.density)) t(j, i) = rng.scalar<S>();
      }
    ts.push_back(t);
    tinvs.push_back(inverse(t));
  }
  for (int n = lo; n < hi; ++n)
    a.d[static_cast<size_t>(n - lo)] =
        mul<S>(ts[static_cast<size_t>(n + 1 - lo)],
               mul<S>(a.d[static_cast<size_t>(n - lo)], tinvs[static_cast<size_t>(n - lo)]));

  FcPtr<S> out = share_fc(std::move(a));
  ValidationReport vr = validate_filtered(*out);
  if (!vr.ok) throw InternalInvariantViolation("gen_filtered: " + vr.message);
  return out;
}

// Solution space of the chain + filtration constraints for maps U -> B, with
// a random element draw.
template <class S>
struct FcMapSpace {
  FcPtr<S> src, tgt;
  int lo = 0, hi = 0;
  std::vector<std::vector<std::pair<Index, Index>>> slots;  // allowed entries per degree
  Index total = 0;
  Mat<S> kernel;

  Index dim() const { return kernel.cols(); }

  std::vector<Mat<S>> unvec(const Vec<S>& x) const {
    std::vector<Mat<S>> maps;
    Index at = 0;
    for (int n = lo; n <= hi; ++n) {
      Mat<S> m = Mat<S>::Zero(tgt->dim(n), src->dim(n));
      for (auto& [r, c] : slots[static_cast<size_t>(n - lo)]) m(r, c) = x(at++);
      maps.push_back(std::move(m));
    }
    return maps;
  }

  FcMorphism<S> morphism(const Vec<S>& coeffs) const {
    Vec<S> x = Vec<S>::Zero(total);
    if (coeffs.rows() > 0) x += kernel.lazyProduct(coeffs);
    return FcMorphism<S>::unchecked(src, tgt, lo, unvec(x));
  }
};

template <class S>
FcMapSpace<S> fc_map_space(const FcPtr<S>& u, const FcPtr<S>& b) {
  FcMapSpace<S> sp;
  sp.src = u;
  sp.tgt = b;
  sp.lo = std::min(u->n_min, b->n_min);
  sp.hi = std::max(u->n_max(), b->n_max());
  for (int n = sp.lo; n <= sp.hi; ++n) {
    std::vector<std::pair<Index, Index>> sl;
    const auto& lu = u->levels_at(n);
    const auto& lb = b->levels_at(n);
    for (Index c = 0; c < u->dim(n); ++c)
      for (Index r = 0; r < b->dim(n); ++r)
        if (lb[static_cast<size_t>(r)] <= lu[static_cast<size_t>(c)]) sl.emplace_back(r, c);
    sp.total += static_cast<Index>(sl.size());
    sp.slots.push_back(std::move(sl));
  }
  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    std::vector<Mat<S>> maps = sp.unvec(x);
    auto at = [&](int n) -> Mat<S> {
      if (n < sp.lo || n > sp.hi) return Mat<S>::Zero(b->dim(n), u->dim(n));
      return maps[static_cast<size_t>(n - sp.lo)];
    };
    for (int n = sp.lo; n <= sp.hi; ++n) {
      Mat<S> comm = mul<S>(b->dmat(n), at(n)) - mul<S>(at(n + 1), u->dmat(n));
      for (Index j = 0; j < comm.cols(); ++j)
        for (Index i = 0; i < comm.rows(); ++i) out.push_back(comm(i, j));
    }
    return out;
  };
  AffineSolution<S> sol = solve_affine<S>(sp.total, residual);
  sp.kernel = std::move(sol.kernel);
  return sp;
}

template <class S>
FcMorphism<S> gen_fc_morphism(const FcPtr<S>& u, const FcPtr<S>& b, Rng& rng, int density = 60) {
  FcMapSpace<S> sp = fc_map_space(u, b);
  Vec<S> c(sp.dim());
  for (Index j = 0; j < sp.dim(); ++j) c(j) = rng.chance(density) ? rng.scalar<S>() : S(0);
  return sp.morphism(c);
}

// filtered automorphism (iso morphism A -> A), for de-trivializing fibrations
template <class S>
FcMorphism<S> gen_fc_automorphism(const FcPtr<S>& a, Rng& rng, int density = 50) {
  FcMapSpace<S> sp = fc_map_space(a, a);
  std::mt19937_64& eng = rng.engine();
  for (int t = 0; t < 64; ++t) {
    Vec<S> c(sp.dim());
    for (Index j = 0; j < sp.dim(); ++j)
      c(j) = rng.chance(density) ? random_scalar<S>(eng) : S(0);
    FcMorphism<S> f = sp.morphism(c);
    bool inv = true;
    for (int n = a->n_min; n <= a->n_max() && inv; ++n) inv = is_invertible(f.map_at(n));
    if (inv) return f;
  }
  return fc_identity(a);
}

// ------------------------------------------------------------ multicomplex

template <class S>
McPtr<S> gen_multicomplex(const GenSpec& spec, Rng& rng) {
  int half = std::max(1, spec.window / 2);
  Multicomplex<S> a;
  int pieces = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_pieces)));
  struct Arrow {
    int i;
    Bidegree from, to;
    Index ci, ri;
  };
  std::vector<Arrow> arrows;
  for (int k = 0; k < pieces; ++k) {
    Bidegree pq{rng.range(-half, half), rng.range(-half, half)};
    if (rng.chance(35)) {
      if (a.module.dim(pq) >= spec.max_dim) continue;
      a.module.set_dim(pq, a.module.dim(pq) + 1);
    } else {
      int i = rng.range(0, 2);
      Bidegree tq{pq.p - i, pq.q + 1 - i};
      if (a.module.dim(pq) >= spec.max_dim || a.module.dim(tq) >= spec.max_dim) continue;
      a.module.set_dim(pq, a.module.dim(pq) + 1);
      a.module.set_dim(tq, a.module.dim(tq) + 1);
      arrows.push_back({i, pq, tq, a.module.dim(pq) - 1, a.module.dim(tq) - 1});
    }
  }
  int order = 0;
  for (auto& ar : arrows) order = std::max(order, ar.i);
  for (int i = 0; i <= order; ++i)
    a.ops.push_back(BigradedMap<S>::zero(a.module, a.module, {-i, 1 - i}));
  for (auto& ar : arrows) {
    Mat<S> blk = a.ops[static_cast<size_t>(ar.i)].block(ar.from);
    blk(ar.ri, ar.ci) = rng.nonzero_scalar<S>();
    a.ops[static_cast<size_t>(ar.i)].set_block(ar.from, std::move(blk));
  }

  // conjugate by a bidegreewise invertible map (preserves the relation)
  BigradedMap<S> t = BigradedMap<S>::identity(a.module);
  for (auto& [pq, d] : a.module.support()) {
    Mat<S> l = Mat<S>::Identity(d, d), uppr = Mat<S>::Identity(d, d);
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j) {
        if (j > i && rng.chance(spec.density)) l(j, i) = rng.scalar<S>();
        if (j < i && rng.chance(spec.density)) uppr(j, i) = rng.scalar<S>();
      }
    t.set_block(pq, mul<S>(l, uppr));
  }
  BigradedMap<S> tinv = t.inverse_map();
  for (auto& op : a.ops) op = compose(t, compose(op, tinv));

  McPtr<S> out = share_mc(std::move(a));
  ValidationReport vr = validate_multicomplex(*out);
  if (!vr.ok) throw InternalInvariantViolation("gen_multicomplex: " + vr.message);
  return out;
}

// strict-morphism solution space between multicomplexes
template <class S>
struct McMapSpace {
  McPtr<S> src, tgt;
  MapLayout<S> layout;
  Mat<S> kernel;

  Index dim() const { return kernel.cols(); }

  MultiMorphism<S> morphism(const Vec<S>& coeffs) const {
    Vec<S> x = Vec<S>::Zero(layout.total);
    if (coeffs.rows() > 0) x += kernel.lazyProduct(coeffs);
    return MultiMorphism<S>{src, tgt, layout.unvec(x)};
  }
};

template <class S>
McMapSpace<S> mc_map_space(const McPtr<S>& u, const McPtr<S>& b) {
  McMapSpace<S> sp;
  sp.src = u;
  sp.tgt = b;
  sp.layout = MapLayout<S>::make(u->module, b->module, {0, 0});
  int order = std::max(u->order(), b->order());
  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    BigradedMap<S> f = sp.layout.unvec(x);
    for (int i = 0; i <= order; ++i) append_entries(out, BigradedMap<S>(compose(b->op(i), f) - compose(f, u->op(i))));
    return out;
  };
  AffineSolution<S> sol = solve_affine<S>(sp.layout.total, residual);
  sp.kernel = std::move(sol.kernel);
  return sp;
}

template <class S>
MultiMorphism<S> gen_mc_morphism(const McPtr<S>& u, const McPtr<S>& b, Rng& rng, int density = 60) {
  McMapSpace<S> sp = mc_map_space(u, b);
  Vec<S> c(sp.dim());
  for (Index j = 0; j < sp.dim(); ++j) c(j) = rng.chance(density) ? rng.scalar<S>() : S(0);
  return sp.morphism(c);
}

// ---------------------------------------------------------------- spectral

template <class S>
SSPtr<S> gen_spectral(const GenSpec& spec, Rng& rng) {
  return spectral_sequence(gen_filtered<S>(spec, rng));
}

template <class S>
std::optional<SpectralMorphism<S>> gen_morphism(const SSPtr<S>& a, const SSPtr<S>& b, Rng& rng,
                                                int density = 60) {
  HomSpace<S> hs = hom_space(a, b);
  if (hs.dim() == 0) return std::nullopt;
  Vec<S> c(hs.dim());
  for (Index j = 0; j < hs.dim(); ++j) c(j) = rng.chance(density) ? rng.scalar<S>() : S(0);
  return hs.morphism(c);
}

}  // namespace sseq
