#pragma once

#include "sseq/filtered.hpp"
#include "sseq/spectral.hpp"

namespace sseq {

// Multicomplex: operators d_i of bidegree (-i, 1-i) with the alternating-sign
// composition relation Σ_{i+j=l} (-1)^i d_i d_j = 0 for all l ≥ 0.
template <class S>
struct Multicomplex {
  BigradedModule module;
  std::vector<BigradedMap<S>> ops;  // ops[i] = d_i; trailing zeros may be omitted

  int order() const { return static_cast<int>(ops.size()) - 1; }

  BigradedMap<S> op(int i) const {
    if (i >= 0 && i < static_cast<int>(ops.size())) return ops[static_cast<size_t>(i)];
    return BigradedMap<S>::zero(module, module, {-i, 1 - i});
  }

  friend bool operator==(const Multicomplex& a, const Multicomplex& b) {
    if (!(a.module == b.module)) return false;
    int n = std::max(a.order(), b.order());
    for (int i = 0; i <= n; ++i)
      if (!(a.op(i) == b.op(i))) return false;
    return true;
  }
};

template <class S>
using McPtr = std::shared_ptr<const Multicomplex<S>>;

template <class S>
McPtr<S> share_mc(Multicomplex<S> a) {
  return std::make_shared<const Multicomplex<S>>(std::move(a));
}

template <class S>
ValidationReport validate_multicomplex(const Multicomplex<S>& a) {
  int n = a.order();
  for (int i = 0; i <= n; ++i) {
    const BigradedMap<S>& di = a.ops[static_cast<size_t>(i)];
    if (di.shift() != Bidegree{-i, 1 - i})
      return ValidationReport::failure("d_" + std::to_string(i) + " has bidegree " + di.shift().str() +
                                       ", expected (" + std::to_string(-i) + "," + std::to_string(1 - i) + ")");
    if (di.source() != a.module || di.target() != a.module)
      return ValidationReport::failure("d_" + std::to_string(i) + " endpoints do not match the module");
    std::string why;
    if (!di.shape_ok(&why)) return ValidationReport::failure("d_" + std::to_string(i) + ": " + why);
  }
  for (int l = 0; l <= 2 * n; ++l) {
    BigradedMap<S> acc = BigradedMap<S>::zero(a.module, a.module, {-l, 2 - l});
    for (int i = std::max(0, l - n); i <= std::min(l, n); ++i) {
      int j = l - i;
      S sgn = (i % 2 == 0) ? S(1) : S(-1);
      acc = acc + compose(a.op(i), a.op(j)) * sgn;
    }
    for (auto& [pq, d] : a.module.support())
      if (!sseq::is_zero(acc.block(pq)))
        return ValidationReport::failure("multicomplex relation fails at l = " + std::to_string(l) +
                                         ", bidegree " + pq.str());
  }
  return ValidationReport::success();
}

template <class S>
bool is_n_multicomplex(const Multicomplex<S>& a, int n) {
  for (int i = n; i <= a.order(); ++i)
    if (!a.op(i).is_zero()) return false;
  return true;
}

// Strict morphism: a single bidegree-(0,0) map commuting with every d_i.
template <class S>
struct MultiMorphism {
  McPtr<S> src, tgt;
  BigradedMap<S> map;

  ValidationReport validate() const {
    if (map.shift() != Bidegree{0, 0}) return ValidationReport::failure("morphism has nonzero bidegree");
    if (!(map.source() == src->module) || !(map.target() == tgt->module))
      return ValidationReport::failure("morphism endpoints mismatch");
    int n = std::max(src->order(), tgt->order());
    for (int i = 0; i <= n; ++i) {
      BigradedMap<S> comm = compose(tgt->op(i), map) - compose(map, src->op(i));
      if (!comm.is_zero())
        return ValidationReport::failure("morphism does not commute with d_" + std::to_string(i));
    }
    return ValidationReport::success();
  }

  static MultiMorphism from_map(McPtr<S> src, McPtr<S> tgt, BigradedMap<S> map) {
    MultiMorphism f{std::move(src), std::move(tgt), std::move(map)};
    ValidationReport vr = f.validate();
    if (!vr.ok) throw NotAMorphism(0, "multicomplex morphism: " + vr.message);
    return f;
  }

  friend MultiMorphism compose(const MultiMorphism& g, const MultiMorphism& f) {
    return {f.src, g.tgt, compose(g.map, f.map)};
  }
};

template <class S>
MultiMorphism<S> mc_identity(const McPtr<S>& a) {
  return {a, a, BigradedMap<S>::identity(a->module)};
}

// ---------------------------------------------------------------------------
// Totalization: total degree n = q - p, Tot(A)^n = ⊕_{q-p=n} A^{p,q} with the
// column filtration F_s = ⊕_{p≤s}, and D = Σ_i (-1)^{i·n} d_i. The sign is
// forced (up to convention) by D² = 0 given the multicomplex relation.
template <class S>
struct TotData {
  McPtr<S> mc;
  FcPtr<S> fc;
  // per total degree, the bidegrees in coordinate order with their offsets
  std::map<int, std::vector<std::pair<Bidegree, Index>>> slots;

  Index offset(int n, Bidegree pq) const {
    auto it = slots.find(n);
    if (it == slots.end()) throw DimensionMismatch("tot: no slots at degree " + std::to_string(n));
    for (auto& [bd, off] : it->second)
      if (bd == pq) return off;
    throw DimensionMismatch("tot: bidegree " + pq.str() + " not present in degree " + std::to_string(n));
  }
};

template <class S>
TotData<S> tot(const McPtr<S>& aptr) {
  const Multicomplex<S>& a = *aptr;
  TotData<S> out;
  out.mc = aptr;
  if (a.module.trivial()) {
    FilteredComplex<S> fc;
    fc.n_min = 0;
    fc.levels = {{}};
    fc.d = {Mat<S>::Zero(0, 0)};
    out.fc = share_fc(std::move(fc));
    out.slots[0] = {};
    return out;
  }
  int lo = 0, hi = 0;
  bool first = true;
  for (auto& [pq, d] : a.module.support()) {
    int n = pq.q - pq.p;
    lo = first ? n : std::min(lo, n);
    hi = first ? n : std::max(hi, n);
    first = false;
  }
  FilteredComplex<S> fc;
  fc.n_min = lo;
  for (int n = lo; n <= hi; ++n) {
    std::vector<std::pair<Bidegree, Index>> sl;
    std::vector<int> lv;
    Index off = 0;
    for (auto& [pq, d] : a.module.support()) {
      if (pq.q - pq.p != n) continue;
      sl.emplace_back(pq, off);
      off += d;
      for (Index i = 0; i < d; ++i) lv.push_back(pq.p);
    }
    out.slots[n] = std::move(sl);
    fc.levels.push_back(std::move(lv));
  }
  for (int n = lo; n <= hi; ++n) {
    Index rows = n + 1 <= hi ? static_cast<Index>(fc.levels[static_cast<size_t>(n + 1 - lo)].size()) : 0;
    Index cols = static_cast<Index>(fc.levels[static_cast<size_t>(n - lo)].size());
    Mat<S> blk = Mat<S>::Zero(rows, cols);
    if (rows > 0) {
      S sgn_base = (n % 2 == 0) ? S(1) : S(-1);
      for (auto& [pq, coff] : out.slots[n]) {
        Index cdim = a.module.dim(pq);
        for (int i = 0; i <= a.order(); ++i) {
          Bidegree tq{pq.p - i, pq.q + 1 - i};
          if (a.module.dim(tq) == 0) continue;
          // (-1)^{i*n}
          S sgn = (i % 2 == 0) ? S(1) : sgn_base;
          Mat<S> b = a.op(i).block(pq) * sgn;
          blk.block(out.offset(n + 1, tq), coff, b.rows(), cdim) += b;
        }
      }
    }
    fc.d.push_back(std::move(blk));
  }
  out.fc = share_fc(std::move(fc));
  ValidationReport vr = validate_filtered(*out.fc);
  if (!vr.ok) throw InternalInvariantViolation("tot: " + vr.message);  // D² = 0 sign guard
  return out;
}

template <class S>
FcMorphism<S> tot_morphism(const TotData<S>& ta, const TotData<S>& tb, const MultiMorphism<S>& f) {
  int lo = std::min(ta.fc->n_min, tb.fc->n_min);
  int hi = std::max(ta.fc->n_max(), tb.fc->n_max());
  std::vector<Mat<S>> maps;
  for (int n = lo; n <= hi; ++n) {
    Mat<S> blk = Mat<S>::Zero(tb.fc->dim(n), ta.fc->dim(n));
    auto it = ta.slots.find(n);
    if (it != ta.slots.end()) {
      for (auto& [pq, off] : it->second) {
        if (tb.mc->module.dim(pq) == 0) continue;
        Mat<S> b = f.map.block(pq);
        blk.block(tb.offset(n, pq), off, b.rows(), b.cols()) = b;
      }
    }
    maps.push_back(std::move(blk));
  }
  return FcMorphism<S>::from_maps(ta.fc, tb.fc, lo, std::move(maps));
}

// E' = E ∘ Tot
template <class S>
SSPtr<S> eprime(const McPtr<S>& a) {
  return spectral_sequence(tot(a).fc);
}

template <class S>
SpectralMorphism<S> eprime_of_morphism(const MultiMorphism<S>& f) {
  TotData<S> ta = tot(f.src);
  TotData<S> tb = tot(f.tgt);
  EFunctorData<S> ea = e_functor(ta.fc);
  EFunctorData<S> eb = e_functor(tb.fc);
  return e_of_morphism(ea, eb, tot_morphism(ta, tb, f));
}

// ---------------------------------------------------------------------------
// The multicomplex r-path Λ_r ⊗ A with Koszul signs on the total degree.

template <class S>
struct McPath {
  int r = 0;
  McPtr<S> base;
  McPtr<S> mc;
  MultiMorphism<S> iota, d_minus, d_plus;
  SumLayout<S> layout;  // (x, y, z); y is the base translated by (-r, 1-r)
};

template <class S>
McPath<S> mc_path(int r, const McPtr<S>& bptr) {
  const Multicomplex<S>& b = *bptr;
  const Bidegree down{-r, 1 - r};
  McPath<S> out;
  out.r = r;
  out.base = bptr;
  BigradedModule mid = b.module.translated(down);
  out.layout = SumLayout<S>::of({b.module, mid, b.module});

  Multicomplex<S> t;
  t.module = out.layout.total;
  int order = std::max(b.order(), r);
  for (int i = 0; i <= order; ++i) {
    BigradedMap<S> di = b.op(i);
    // middle strand sign (-1)^{r+i+1}: forced by the multicomplex relation
    // together with the -1/+1 corners of d_r (the naive total-degree Koszul
    // sign -1 violates the relation as soon as some d_j with j ≠ r is nonzero)
    S eps = ((r + i + 1) % 2 == 0) ? S(1) : S(-1);
    BigradedMap<S> dmid = di.translated(down) * eps;
    BigradedMap<S> blk =
        compose(out.layout.template inclusion<S>(0), compose(di, out.layout.template projection<S>(0))) +
        compose(out.layout.template inclusion<S>(1), compose(dmid, out.layout.template projection<S>(1))) +
        compose(out.layout.template inclusion<S>(2), compose(di, out.layout.template projection<S>(2)));
    if (i == r) {
      // d_r(e_-) = -u, d_r(e_+) = u: corners -1 (x->y), +1 (z->y)
      BigradedMap<S> into_mid(out.layout.total, out.layout.total, {-r, 1 - r});
      for (auto& [pq, dim] : out.layout.total.support()) {
        Bidegree tq = pq + down;
        Index rows = out.layout.total.dim(tq);
        Index rm = mid.dim(tq);  // = b.module.dim(pq)
        if (rows == 0 || rm == 0) continue;
        Index cx = b.module.dim(pq);
        Mat<S> m = Mat<S>::Zero(rows, dim);
        m.block(out.layout.offset(1, tq), 0, rm, cx) = Mat<S>(-Mat<S>::Identity(rm, cx));
        m.block(out.layout.offset(1, tq), out.layout.offset(2, pq), rm, cx) = Mat<S>::Identity(rm, cx);
        into_mid.set_block(pq, std::move(m));
      }
      blk = blk + into_mid;
    }
    t.ops.push_back(std::move(blk));
  }
  out.mc = share_mc(std::move(t));
  {
    ValidationReport vr = validate_multicomplex(*out.mc);
    if (!vr.ok) throw InternalInvariantViolation("mc_path: " + vr.message);  // tensor sign guard
  }
  out.iota = MultiMorphism<S>::from_map(
      bptr, out.mc,
      BigradedMap<S>(out.layout.template inclusion<S>(0) + out.layout.template inclusion<S>(2)));
  out.d_minus = MultiMorphism<S>::from_map(out.mc, bptr, out.layout.template projection<S>(0));
  out.d_plus = MultiMorphism<S>::from_map(out.mc, bptr, out.layout.template projection<S>(2));
  return out;
}

// Pullback in multicomplexes: the componentwise kernel (the category is
// abelian, no surjectivity hypothesis needed).
template <class S>
struct McPullback {
  McPtr<S> x;
  MultiMorphism<S> pi_u, pi_a;
};

template <class S>
McPullback<S> mc_pullback(const MultiMorphism<S>& g, const MultiMorphism<S>& p) {
  const Multicomplex<S>& u = *g.src;
  const Multicomplex<S>& a = *p.src;
  const Multicomplex<S>& b = *p.tgt;
  BigradedModule joint = direct_sum(u.module, a.module);
  BigradedModule xmod;
  std::map<Bidegree, Mat<S>> kernels;
  for (auto& [pq, dim] : joint.support()) {
    Index du = u.module.dim(pq), da = a.module.dim(pq);
    Mat<S> sys(b.module.dim(pq), du + da);
    sys.leftCols(du) = g.map.block(pq);
    sys.rightCols(da) = Mat<S>(-p.map.block(pq));
    Mat<S> k = kernel_basis(sys);
    xmod.set_dim(pq, k.cols());
    if (k.cols() > 0) kernels[pq] = std::move(k);
  }
  BigradedMap<S> piu(xmod, u.module, {0, 0}), pia(xmod, a.module, {0, 0});
  for (auto& [pq, k] : kernels) {
    piu.set_block(pq, k.topRows(u.module.dim(pq)));
    pia.set_block(pq, k.bottomRows(a.module.dim(pq)));
  }
  Multicomplex<S> x;
  x.module = xmod;
  int order = std::max(u.order(), a.order());
  for (int i = 0; i <= order; ++i) {
    Bidegree shift{-i, 1 - i};
    BigradedMap<S> di(xmod, xmod, shift);
    for (auto& [pq, k] : kernels) {
      Bidegree tq = pq + shift;
      Mat<S> img = vstack<S>(mul<S>(u.op(i).block(pq), Mat<S>(k.topRows(u.module.dim(pq)))),
                             mul<S>(a.op(i).block(pq), Mat<S>(k.bottomRows(a.module.dim(pq)))));
      if (xmod.dim(tq) == 0) {
        if (!sseq::is_zero(img))
          throw InternalInvariantViolation("mc pullback not closed under d_" + std::to_string(i));
        continue;
      }
      auto sol = solve_matrix<S>(kernels.at(tq), img);
      if (!sol) throw InternalInvariantViolation("mc pullback not closed under d_" + std::to_string(i));
      di.set_block(pq, *sol);
    }
    x.ops.push_back(std::move(di));
  }
  McPullback<S> out;
  out.x = share_mc(std::move(x));
  {
    ValidationReport vr = validate_multicomplex(*out.x);
    if (!vr.ok) throw InternalInvariantViolation("mc_pullback: " + vr.message);
  }
  out.pi_u = MultiMorphism<S>::from_map(out.x, g.src, std::move(piu));
  out.pi_a = MultiMorphism<S>::from_map(out.x, p.src, std::move(pia));
  return out;
}

template <class S>
struct McProduct {
  McPtr<S> mc;
  MultiMorphism<S> proj_a, proj_b, inc_a, inc_b;
};

template <class S>
McProduct<S> mc_product(const McPtr<S>& a, const McPtr<S>& b) {
  SumLayout<S> lay = SumLayout<S>::of({a->module, b->module});
  Multicomplex<S> t;
  t.module = lay.total;
  int order = std::max(a->order(), b->order());
  for (int i = 0; i <= order; ++i) {
    BigradedMap<S> blk =
        compose(lay.template inclusion<S>(0), compose(a->op(i), lay.template projection<S>(0))) +
        compose(lay.template inclusion<S>(1), compose(b->op(i), lay.template projection<S>(1)));
    t.ops.push_back(std::move(blk));
  }
  McProduct<S> out;
  out.mc = share_mc(std::move(t));
  out.proj_a = MultiMorphism<S>::from_map(out.mc, a, lay.template projection<S>(0));
  out.proj_b = MultiMorphism<S>::from_map(out.mc, b, lay.template projection<S>(1));
  out.inc_a = MultiMorphism<S>::from_map(a, out.mc, lay.template inclusion<S>(0));
  out.inc_b = MultiMorphism<S>::from_map(b, out.mc, lay.template inclusion<S>(1));
  return out;
}

// Strict r-homotopy data: a strict morphism h : A -> P_r(B) with
// ∂^- ∘ h = f and ∂^+ ∘ h = g.
template <class S>
bool mc_strict_homotopy_check(const McPath<S>& pb, const BigradedMap<S>& h, const MultiMorphism<S>& f,
                              const MultiMorphism<S>& g) {
  MultiMorphism<S> hm{f.src, pb.mc, h};
  if (!hm.validate().ok) return false;
  return compose(pb.d_minus, hm).map == f.map && compose(pb.d_plus, hm).map == g.map;
}

// The multicomplex Λ_r (Def 6.1 data reread as a multicomplex).
template <class S>
McPtr<S> lambda_mc(int r) {
  Multicomplex<S> a;
  a.module.set_dim({0, 0}, 2);
  a.module.set_dim({-r, 1 - r}, 1);
  for (int i = 0; i < r; ++i)
    a.ops.push_back(BigradedMap<S>::zero(a.module, a.module, {-i, 1 - i}));
  BigradedMap<S> dr(a.module, a.module, {-r, 1 - r});
  Mat<S> blk(1, 2);
  blk(0, 0) = S(-1);
  blk(0, 1) = S(1);
  dr.set_block({0, 0}, std::move(blk));
  a.ops.push_back(std::move(dr));
  return share_mc(std::move(a));
}

}  // namespace sseq
