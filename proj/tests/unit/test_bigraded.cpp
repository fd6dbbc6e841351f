#include <doctest.h>

#include "sseq/fixtures.hpp"
#include "sseq/gen.hpp"
#include "sseq/paths.hpp"
#include "sseq/representables.hpp"

using namespace sseq;

TEST_CASE_TEMPLATE("validate_rcomplex", S, Fp, Rational) {
  Fp::set_modulus(7);
  BigradedModule m;
  m.set_dim({0, 0}, 2);
  m.set_dim({3, -1}, 1);
  CHECK(validate_rcomplex(RComplex<S>::with_zero_differential(m, 2)).ok);

  // page 1 of D_1(0,0): identity differential, d² lands in a zero slot
  CHECK(validate_rcomplex(disk<S>(1, 0, 0)->stored_page(1)).ok);

  // differential with the wrong bidegree pattern
  RComplex<S> bad;
  bad.module = m;
  bad.r = 1;
  bad.differential = BigradedMap<S>(m, m, {-1, -1});  // should be (-1, 0)
  ValidationReport vr = validate_rcomplex(bad);
  CHECK_FALSE(vr.ok);
  CHECK(vr.message.find("bidegree") != std::string::npos);

  // d∘d ≠ 0 is reported with the starting bidegree
  BigradedModule line;
  line.set_dim({0, 0}, 1);
  line.set_dim({-1, 0}, 1);
  line.set_dim({-2, 0}, 1);
  RComplex<S> notsq;
  notsq.module = line;
  notsq.r = 1;
  notsq.differential = BigradedMap<S>(line, line, {-1, 0});
  notsq.differential.set_block({0, 0}, Mat<S>::Identity(1, 1));
  notsq.differential.set_block({-1, 0}, Mat<S>::Identity(1, 1));
  vr = validate_rcomplex(notsq);
  CHECK_FALSE(vr.ok);
  CHECK(vr.message.find("(0,0)") != std::string::npos);
}

TEST_CASE_TEMPLATE("homology of simple complexes", S, Fp, Rational) {
  Fp::set_modulus(7);
  BigradedModule m;
  m.set_dim({0, 0}, 2);
  m.set_dim({1, 4}, 3);
  RComplex<S> c = RComplex<S>::with_zero_differential(m, 1);
  HomologyData<S> h = homology(c);
  CHECK(h.H == m);
  CHECK(h.section == BigradedMap<S>::identity(m));
  CHECK(compose(h.projection, h.section) == BigradedMap<S>::identity(m));

  // the disk page r has vanishing homology
  HomologyData<S> hd = homology(disk<S>(1, 0, 0)->stored_page(1));
  CHECK(hd.H.trivial());

  // Λ_1 page 1: one class at (0,0), spanned by e_- + e_+
  HomologyData<S> hl = homology(lambda<S>(1)->stored_page(1));
  CHECK(hl.H.total_dim() == 1);
  CHECK(hl.H.dim({0, 0}) == 1);
  Mat<S> sec = hl.section.block({0, 0});
  CHECK(sec(0, 0) == S(1));
  CHECK(sec(1, 0) == S(1));
}

TEST_CASE_TEMPLATE("induced maps on homology", S, Fp, Rational) {
  Fp::set_modulus(7);
  auto lam = lambda<S>(1);
  const RComplex<S>& page = lam->stored_page(1);
  HomologyData<S> h = homology(page);
  CHECK(induced_on_homology(BigradedMap<S>::identity(page.module), page, page, h, h) ==
        BigradedMap<S>::identity(h.H));
  CHECK(induced_on_homology(BigradedMap<S>::zero(page.module, page.module, {0, 0}), page, page, h, h)
            .is_zero());

  // fold map Λ_1 -> R(0,0): e_± -> 1, u -> 0; induces the identity on H
  auto r00 = ring_at<S>(0, 0);
  RComplex<S> target = r00->page(1);
  BigradedMap<S> fold(page.module, target.module, {0, 0});
  Mat<S> blk(1, 2);
  blk(0, 0) = S(1);
  blk(0, 1) = S(1);
  fold.set_block({0, 0}, std::move(blk));
  HomologyData<S> ht = homology(target);
  BigradedMap<S> hf = induced_on_homology(fold, page, target, h, ht);
  // [e_- + e_+] -> [2] in the deterministic bases; an isomorphism on H
  CHECK(hf.block({0, 0}) == Mat<S>(Mat<S>::Identity(1, 1) * S(2)));
  CHECK(hf.blockwise_invertible());

  // a non-chain map is rejected
  BigradedMap<S> bad(page.module, page.module, {0, 0});
  Mat<S> nb = Mat<S>::Zero(2, 2);
  nb(0, 0) = S(1);
  bad.set_block({0, 0}, std::move(nb));  // kills e_+ but keeps e_-: not chain
  CHECK_THROWS_AS(induced_on_homology(bad, page, page, h, h), NonChainMap);
}

TEST_CASE_TEMPLATE("homology is functorial on samples", S, Fp, Rational) {
  Fp::set_modulus(7);
  GenSpec spec;
  spec.trials = 0;
  for (int t = 0; t < 6; ++t) {
    Rng rng(mix_seed(31, static_cast<std::uint64_t>(t)));
    SSPtr<S> a = gen_spectral<S>(spec, rng);
    SSPtr<S> b = gen_spectral<S>(spec, rng);
    SSPtr<S> c = gen_spectral<S>(spec, rng);
    auto f = gen_morphism(a, b, rng);
    auto g = gen_morphism(b, c, rng);
    if (!f || !g) continue;
    for (Index m = 0; m <= std::max({a->top(), b->top(), c->top()}); ++m) {
      const auto &ha = a->homology_at(m), &hb = b->homology_at(m), &hc = c->homology_at(m);
      BigradedMap<S> lhs = induced_on_homology(compose(g->page(m), f->page(m)), a->page(m), c->page(m), ha, hc);
      BigradedMap<S> rhs = compose(induced_on_homology(g->page(m), b->page(m), c->page(m), hb, hc),
                                   induced_on_homology(f->page(m), a->page(m), b->page(m), ha, hb));
      CHECK(lhs == rhs);
    }
  }
}

TEST_CASE_TEMPLATE("pagewise pullback of r-bigraded complexes", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("pullback along the identity recovers the source") {
    auto lam = lambda<S>(1);
    RComplex<S> u = lam->stored_page(1);
    BigradedMap<S> id = BigradedMap<S>::identity(u.module);
    RComplexPullback<S> pb = pullback_rcomplex(u, u, u, id, id);
    CHECK(pb.X.module == u.module);
    CHECK(pb.pi_u.blockwise_invertible());
  }

  SUBCASE("pullback of a surjection along zero is the kernel") {
    // p: Λ_1 page 1 -> R(0,0) the fold map (surjective); g = 0 from R(0,0)
    auto lam = lambda<S>(1);
    RComplex<S> a = lam->stored_page(1);
    auto r00 = ring_at<S>(0, 0);
    RComplex<S> b = r00->page(1);
    BigradedMap<S> fold(a.module, b.module, {0, 0});
    Mat<S> blk(1, 2);
    blk(0, 0) = S(1);
    blk(0, 1) = S(1);
    fold.set_block({0, 0}, std::move(blk));
    RComplex<S> u = RComplex<S>::with_zero_differential({}, 1);
    BigradedMap<S> zero(u.module, b.module, {0, 0});
    RComplexPullback<S> pb = pullback_rcomplex(u, a, b, zero, fold);
    CHECK(pb.X.module.dim({0, 0}) == 1);  // kernel of the fold at (0,0)
    CHECK(pb.X.module.dim({-1, 0}) == 1);
  }

  SUBCASE("diagonal pullback of identity maps") {
    auto r00 = ring_at<S>(0, 0);
    RComplex<S> rc = r00->page(0);
    BigradedMap<S> id = BigradedMap<S>::identity(rc.module);
    RComplexPullback<S> pb = pullback_rcomplex(rc, rc, rc, id, id);
    CHECK(pb.X.module.total_dim() == 1);
    CHECK(pb.pi_u == pb.pi_a);
  }
}
