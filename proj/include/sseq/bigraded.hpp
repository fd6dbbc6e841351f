#pragma once

#include <compare>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sseq/linalg.hpp"

namespace sseq {

struct Bidegree {
  int p = 0;
  int q = 0;
  friend auto operator<=>(const Bidegree&, const Bidegree&) = default;
  friend Bidegree operator+(Bidegree a, Bidegree b) { return {a.p + b.p, a.q + b.q}; }
  friend Bidegree operator-(Bidegree a, Bidegree b) { return {a.p - b.p, a.q - b.q}; }
  std::string str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
};

// Finite-support bigraded module: bidegree -> dimension, zero entries omitted.
// Each slot carries its standard basis; maps are stored as matrices per slot.
class BigradedModule {
 public:
  BigradedModule() = default;

  Index dim(Bidegree pq) const {
    auto it = dims_.find(pq);
    return it == dims_.end() ? 0 : it->second;
  }
  void set_dim(Bidegree pq, Index d) {
    if (d < 0) throw DimensionMismatch("negative dimension at " + pq.str());
    if (d == 0)
      dims_.erase(pq);
    else
      dims_[pq] = d;
  }
  const std::map<Bidegree, Index>& support() const { return dims_; }
  bool trivial() const { return dims_.empty(); }
  Index total_dim() const {
    Index t = 0;
    for (auto& [pq, d] : dims_) t += d;
    return t;
  }
  friend bool operator==(const BigradedModule&, const BigradedModule&) = default;

  BigradedModule translated(Bidegree shift) const {
    BigradedModule out;
    for (auto& [pq, d] : dims_) out.dims_[pq + shift] = d;
    return out;
  }

 private:
  std::map<Bidegree, Index> dims_;
};

inline BigradedModule direct_sum(const BigradedModule& a, const BigradedModule& b) {
  BigradedModule out = a;
  for (auto& [pq, d] : b.support()) out.set_dim(pq, out.dim(pq) + d);
  return out;
}

// Map of bigraded modules of a fixed bidegree: block at source slot (p,q) maps
// into target slot (p,q)+shift. Blocks are stored exactly where both slots are
// nonzero; a missing block there means zero.
template <class S>
class BigradedMap {
 public:
  BigradedMap() = default;
  BigradedMap(BigradedModule src, BigradedModule tgt, Bidegree shift)
      : src_(std::move(src)), tgt_(std::move(tgt)), shift_(shift) {}

  static BigradedMap zero(BigradedModule src, BigradedModule tgt, Bidegree shift) {
    return BigradedMap(std::move(src), std::move(tgt), shift);
  }

  static BigradedMap identity(const BigradedModule& m) {
    BigradedMap f(m, m, {0, 0});
    for (auto& [pq, d] : m.support()) f.blocks_[pq] = Mat<S>::Identity(d, d);
    return f;
  }

  const BigradedModule& source() const { return src_; }
  const BigradedModule& target() const { return tgt_; }
  Bidegree shift() const { return shift_; }

  // Materializes a zero block of the right shape when absent.
  Mat<S> block(Bidegree pq) const {
    auto it = blocks_.find(pq);
    if (it != blocks_.end()) return it->second;
    return Mat<S>::Zero(tgt_.dim(pq + shift_), src_.dim(pq));
  }

  void set_block(Bidegree pq, Mat<S> m) {
    if (m.rows() != tgt_.dim(pq + shift_) || m.cols() != src_.dim(pq))
      throw DimensionMismatch("block shape mismatch at " + pq.str());
    if (m.rows() == 0 || m.cols() == 0) return;
    blocks_[pq] = std::move(m);
  }

  // For the parser: keeps whatever was read so validators can report on it.
  void set_block_unchecked(Bidegree pq, Mat<S> m) { blocks_[pq] = std::move(m); }

  const std::map<Bidegree, Mat<S>>& stored_blocks() const { return blocks_; }

  // Shape coherence of stored blocks against source/target dims.
  bool shape_ok(std::string* why = nullptr) const {
    for (auto& [pq, m] : blocks_) {
      if (m.rows() != tgt_.dim(pq + shift_) || m.cols() != src_.dim(pq)) {
        if (why)
          *why = "block at " + pq.str() + " has shape " + std::to_string(m.rows()) + "x" +
                 std::to_string(m.cols()) + ", expected " + std::to_string(tgt_.dim(pq + shift_)) +
                 "x" + std::to_string(src_.dim(pq));
        return false;
      }
    }
    return true;
  }

  bool is_zero() const {
    for (auto& [pq, m] : blocks_)
      if (!sseq::is_zero(m)) return false;
    return true;
  }

  friend bool operator==(const BigradedMap& a, const BigradedMap& b) {
    if (a.src_ != b.src_ || a.tgt_ != b.tgt_ || a.shift_ != b.shift_) return false;
    for (auto& [pq, d] : a.src_.support())
      if (!sseq::is_zero(Mat<S>(a.block(pq) - b.block(pq)))) return false;
    return true;
  }

  friend BigradedMap operator+(const BigradedMap& a, const BigradedMap& b) {
    if (a.src_ != b.src_ || a.tgt_ != b.tgt_ || a.shift_ != b.shift_)
      throw DimensionMismatch("map sum: incompatible maps");
    BigradedMap out(a.src_, a.tgt_, a.shift_);
    for (auto& [pq, d] : a.src_.support()) out.set_block(pq, a.block(pq) + b.block(pq));
    return out;
  }

  friend BigradedMap operator-(const BigradedMap& a, const BigradedMap& b) {
    return a + (b * S(-1));
  }

  friend BigradedMap operator*(const BigradedMap& a, S c) {
    BigradedMap out(a.src_, a.tgt_, a.shift_);
    for (auto& [pq, m] : a.blocks_) out.blocks_[pq] = m * c;
    return out;
  }

  // Composition g ∘ f.
  friend BigradedMap compose(const BigradedMap& g, const BigradedMap& f) {
    if (g.src_ != f.tgt_) throw DimensionMismatch("compose: middle modules differ");
    BigradedMap out(f.src_, g.tgt_, f.shift_ + g.shift_);
    for (auto& [pq, d] : f.src_.support())
      out.set_block(pq, mul<S>(g.block(pq + f.shift_), f.block(pq)));
    return out;
  }

  // Relabels every slot by `by` (source and target together).
  BigradedMap translated(Bidegree by) const {
    BigradedMap out(src_.translated(by), tgt_.translated(by), shift_);
    for (auto& [pq, m] : blocks_) out.blocks_[pq + by] = m;
    return out;
  }

  // Blockwise inverse; throws unless every block is square invertible.
  BigradedMap inverse_map() const {
    BigradedMap out(tgt_, src_, Bidegree{0, 0} - shift_);
    for (auto& [pq, d] : src_.support()) {
      Mat<S> m = block(pq);
      if (!is_invertible(m)) throw DimensionMismatch("inverse_map: non-invertible block at " + pq.str());
      out.set_block(pq + shift_, inverse(m));
    }
    // slots of the target with no preimage slot must be zero-dimensional
    for (auto& [pq, d] : tgt_.support())
      if (src_.dim(pq - shift_) != d)
        throw DimensionMismatch("inverse_map: dimension mismatch at " + pq.str());
    return out;
  }

  bool blockwise_invertible() const {
    for (auto& [pq, d] : src_.support())
      if (tgt_.dim(pq + shift_) != d || !is_invertible(block(pq))) return false;
    for (auto& [pq, d] : tgt_.support())
      if (src_.dim(pq - shift_) != d) return false;
    return true;
  }

  bool blockwise_surjective() const {
    for (auto& [pq, d] : tgt_.support())
      if (rank(block(pq - shift_)) != d) return false;
    return true;
  }

 private:
  BigradedModule src_, tgt_;
  Bidegree shift_;
  std::map<Bidegree, Mat<S>> blocks_;
};

// r-bigraded complex: differential of bidegree (-r, 1-r) squaring to zero.
template <class S>
struct RComplex {
  BigradedModule module;
  int r = 0;
  BigradedMap<S> differential;

  static RComplex with_zero_differential(BigradedModule m, int r) {
    RComplex c;
    c.differential = BigradedMap<S>::zero(m, m, {-r, 1 - r});
    c.module = std::move(m);
    c.r = r;
    return c;
  }

  friend bool operator==(const RComplex& a, const RComplex& b) {
    return a.module == b.module && a.r == b.r && a.differential == b.differential;
  }
};

struct ValidationReport {
  bool ok = true;
  std::string message;
  static ValidationReport success() { return {}; }
  static ValidationReport failure(std::string msg) { return {false, std::move(msg)}; }
};

template <class S>
ValidationReport validate_rcomplex(const RComplex<S>& c) {
  Bidegree want{-c.r, 1 - c.r};
  if (c.differential.shift() != want)
    return ValidationReport::failure("differential has bidegree " + c.differential.shift().str() +
                                     ", expected " + want.str());
  if (c.differential.source() != c.module || c.differential.target() != c.module)
    return ValidationReport::failure("differential endpoints do not match the module");
  std::string why;
  if (!c.differential.shape_ok(&why)) return ValidationReport::failure(why);
  BigradedMap<S> dd = compose(c.differential, c.differential);
  for (auto& [pq, d] : c.module.support()) {
    if (!sseq::is_zero(dd.block(pq)))
      return ValidationReport::failure("d∘d ≠ 0 starting at bidegree " + pq.str());
  }
  return ValidationReport::success();
}

// Homology of one page with explicit section (chosen representatives) and
// projection (defined on all of the module, meaningful on cycles).
template <class S>
struct HomologyData {
  BigradedModule H;
  BigradedMap<S> section;     // H -> module, bidegree (0,0), image inside cycles
  BigradedMap<S> projection;  // module -> H, kills boundaries, projection∘section = 1

  static HomologyData identity_on(const BigradedModule& m) {
    return {m, BigradedMap<S>::identity(m), BigradedMap<S>::identity(m)};
  }
};

template <class S>
HomologyData<S> homology(const RComplex<S>& c) {
  Bidegree shift = c.differential.shift();
  HomologyData<S> h;
  std::map<Bidegree, Mat<S>> sections, projections;
  for (auto& [pq, n] : c.module.support()) {
    Mat<S> d_out = c.differential.block(pq);
    Mat<S> d_in = c.differential.block(pq - shift);
    Mat<S> cycles = kernel_basis(d_out);
    Mat<S> boundaries = image_basis(d_in);
    Mat<S> reps = extend_basis<S>(boundaries, cycles);
    h.H.set_dim(pq, reps.cols());
    if (reps.cols() == 0) continue;
    sections[pq] = reps;
    // projection from the full slot: coordinates along reps in the frame
    // [boundaries | reps | complement-of-cycles]
    Mat<S> frame = hstack<S>(boundaries, reps);
    Mat<S> outside = extend_basis<S>(frame, Mat<S>::Identity(n, n));
    Mat<S> full = hstack<S>(frame, outside);
    Mat<S> inv = inverse(full);
    projections[pq] = inv.middleRows(boundaries.cols(), reps.cols());
  }
  h.section = BigradedMap<S>(h.H, c.module, {0, 0});
  h.projection = BigradedMap<S>(c.module, h.H, {0, 0});
  for (auto& [pq, m] : sections) h.section.set_block(pq, m);
  for (auto& [pq, m] : projections) h.projection.set_block(pq, m);
  return h;
}

// The map induced on homology, in the chosen bases. The unchecked variant is
// for operators that commute with differentials only up to sign (homotopies).
template <class S>
BigradedMap<S> induced_on_homology_unchecked(const BigradedMap<S>& f, const HomologyData<S>& ha,
                                             const HomologyData<S>& hb) {
  return compose(hb.projection, compose(f, ha.section));
}

template <class S>
BigradedMap<S> induced_on_homology(const BigradedMap<S>& f, const RComplex<S>& a,
                                   const RComplex<S>& b, const HomologyData<S>& ha,
                                   const HomologyData<S>& hb) {
  BigradedMap<S> comm = compose(b.differential, f) - compose(f, a.differential);
  if (!comm.is_zero()) throw NonChainMap("map does not commute with the differentials");
  return induced_on_homology_unchecked(f, ha, hb);
}

// Pagewise pullback of a cospan of chain maps with common target: the kernel
// of g - p inside U ⊕ A, with the restricted differential.
template <class S>
struct RComplexPullback {
  RComplex<S> X;
  BigradedMap<S> pi_u;  // X -> U
  BigradedMap<S> pi_a;  // X -> A
};

template <class S>
RComplexPullback<S> pullback_rcomplex(const RComplex<S>& u_cx, const RComplex<S>& a_cx,
                                      const RComplex<S>& b_cx, const BigradedMap<S>& g,
                                      const BigradedMap<S>& p) {
  if (g.target() != b_cx.module || p.target() != b_cx.module)
    throw DimensionMismatch("pullback: maps must share the target complex");
  if (u_cx.r != a_cx.r || a_cx.r != b_cx.r) throw DimensionMismatch("pullback: page indices differ");

  RComplexPullback<S> out;
  BigradedModule joint = direct_sum(u_cx.module, a_cx.module);
  std::map<Bidegree, Mat<S>> kernels;
  BigradedModule xmod;
  for (auto& [pq, dim] : joint.support()) {
    Index du = u_cx.module.dim(pq), da = a_cx.module.dim(pq);
    Mat<S> gp(b_cx.module.dim(pq), du + da);
    gp.leftCols(du) = g.block(pq);
    gp.rightCols(da) = -p.block(pq);
    Mat<S> k = kernel_basis(gp);
    if (k.cols() > 0) kernels[pq] = k;
    xmod.set_dim(pq, k.cols());
  }
  out.pi_u = BigradedMap<S>(xmod, u_cx.module, {0, 0});
  out.pi_a = BigradedMap<S>(xmod, a_cx.module, {0, 0});
  for (auto& [pq, k] : kernels) {
    Index du = u_cx.module.dim(pq);
    out.pi_u.set_block(pq, k.topRows(du));
    out.pi_a.set_block(pq, k.bottomRows(k.rows() - du));
  }
  Bidegree shift = u_cx.differential.shift();
  BigradedMap<S> diff(xmod, xmod, shift);
  for (auto& [pq, k] : kernels) {
    Bidegree tq = pq + shift;
    if (xmod.dim(tq) == 0) {
      // image must vanish there
      Mat<S> img = vstack<S>(mul<S>(u_cx.differential.block(pq), Mat<S>(out.pi_u.block(pq))),
                             mul<S>(a_cx.differential.block(pq), Mat<S>(out.pi_a.block(pq))));
      if (!sseq::is_zero(img))
        throw InternalInvariantViolation("pullback differential leaves the kernel at " + pq.str());
      continue;
    }
    Mat<S> img = vstack<S>(mul<S>(u_cx.differential.block(pq), Mat<S>(out.pi_u.block(pq))),
                           mul<S>(a_cx.differential.block(pq), Mat<S>(out.pi_a.block(pq))));
    Index du_t = u_cx.module.dim(tq);
    Mat<S> target_k(du_t + a_cx.module.dim(tq), xmod.dim(tq));
    target_k.topRows(du_t) = out.pi_u.block(tq);
    target_k.bottomRows(target_k.rows() - du_t) = out.pi_a.block(tq);
    auto coords = solve_matrix<S>(target_k, img);
    if (!coords)
      throw InternalInvariantViolation("pullback differential leaves the kernel at " + pq.str());
    diff.set_block(pq, *coords);
  }
  out.X.module = xmod;
  out.X.r = u_cx.r;
  out.X.differential = diff;
  return out;
}

}  // namespace sseq
