#include <doctest.h>

#include "sseq/gen.hpp"
#include "sseq/multicomplex.hpp"
#include "sseq/paths.hpp"

using namespace sseq;

namespace {

// x at (1,1), a = d_0 x at (1,2), b = d_1 x at (0,1), c = d_0 b = d_1 a at (0,2)
template <class S>
Multicomplex<S> bicomplex() {
  Multicomplex<S> m;
  m.module.set_dim({1, 1}, 1);
  m.module.set_dim({1, 2}, 1);
  m.module.set_dim({0, 1}, 1);
  m.module.set_dim({0, 2}, 1);
  BigradedMap<S> d0(m.module, m.module, {0, 1});
  d0.set_block({1, 1}, Mat<S>::Identity(1, 1));
  d0.set_block({0, 1}, Mat<S>::Identity(1, 1));
  BigradedMap<S> d1(m.module, m.module, {-1, 0});
  d1.set_block({1, 1}, Mat<S>::Identity(1, 1));
  d1.set_block({1, 2}, Mat<S>::Identity(1, 1));
  m.ops = {d0, d1};
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("multicomplex validation", S, Fp, Rational) {
  Fp::set_modulus(7);
  Multicomplex<S> bc = bicomplex<S>();
  CHECK(validate_multicomplex(bc).ok);
  CHECK(is_n_multicomplex(bc, 2));
  CHECK_FALSE(is_n_multicomplex(bc, 1));

  for (int r = 0; r <= 3; ++r) {
    auto lm = lambda_mc<S>(r);
    CHECK(validate_multicomplex(*lm).ok);
    CHECK(is_n_multicomplex(*lm, r + 1));
    if (r >= 1) CHECK_FALSE(is_n_multicomplex(*lm, r));
  }

  // perturbing d_1 breaks the commuting relation
  Multicomplex<S> bad = bicomplex<S>();
  bad.ops[1].set_block({1, 2}, Mat<S>(Mat<S>::Identity(1, 1) * S(2)));
  ValidationReport vr = validate_multicomplex(bad);
  CHECK_FALSE(vr.ok);
  CHECK(vr.message.find("relation") != std::string::npos);
}

TEST_CASE_TEMPLATE("strict morphisms", S, Fp, Rational) {
  Fp::set_modulus(7);
  auto lm = lambda_mc<S>(1);
  CHECK(mc_identity(lm).validate().ok);
  MultiMorphism<S> bad{lm, lm, BigradedMap<S>(lm->module, lm->module, {0, 0})};
  Mat<S> blk = Mat<S>::Zero(2, 2);
  blk(0, 0) = S(1);
  bad.map.set_block({0, 0}, std::move(blk));
  CHECK_FALSE(bad.validate().ok);
}

TEST_CASE_TEMPLATE("totalization", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("a 1-multicomplex totalizes to its column filtration") {
    Multicomplex<S> m;
    m.module.set_dim({0, 0}, 1);
    m.module.set_dim({0, 1}, 1);
    BigradedMap<S> d0(m.module, m.module, {0, 1});
    d0.set_block({0, 0}, Mat<S>::Identity(1, 1));
    m.ops = {d0};
    TotData<S> t = tot(share_mc(std::move(m)));
    CHECK(validate_filtered(*t.fc).ok);
    CHECK(t.fc->dim(0) == 1);
    CHECK(t.fc->dim(1) == 1);
    CHECK(t.fc->dmat(0) == Mat<S>::Identity(1, 1));
    // E_0 recovers (A, d_0)
    SSPtr<S> e = spectral_sequence(t.fc);
    CHECK(e->module_at(0).dim({0, 0}) == 1);
    CHECK(e->module_at(0).dim({0, 1}) == 1);
    CHECK_FALSE(is_zero(e->stored_page(0).differential.block({0, 0})));
  }

  SUBCASE("tot of the lambda multicomplex is lambda_fc, on the nose") {
    for (int r = 0; r <= 3; ++r) CHECK(*tot(lambda_mc<S>(r)).fc == *lambda_fc<S>(r));
  }

  SUBCASE("a two-term bicomplex with invertible d_1 dies at page 2") {
    Multicomplex<S> m;
    m.module.set_dim({1, 1}, 1);
    m.module.set_dim({0, 1}, 1);
    BigradedMap<S> d0 = BigradedMap<S>::zero(m.module, m.module, {0, 1});
    BigradedMap<S> d1(m.module, m.module, {-1, 0});
    d1.set_block({1, 1}, Mat<S>::Identity(1, 1));
    m.ops = {d0, d1};
    SSPtr<S> e = eprime(share_mc(std::move(m)));
    CHECK(e->module_at(1).total_dim() == 2);
    CHECK_FALSE(e->stored_page(1).differential.is_zero());
    CHECK(e->module_at(2).trivial());
  }
}

TEST_CASE_TEMPLATE("E prime", S, Fp, Rational) {
  Fp::set_modulus(7);
  for (int r = 0; r <= 3; ++r)
    CHECK(find_isomorphism(eprime(lambda_mc<S>(r)), lambda<S>(r)).has_value());
  // zero
  Multicomplex<S> z;
  CHECK(eprime(share_mc(std::move(z)))->module_at(0).trivial());
  // random multicomplexes produce valid towers
  GenSpec spec;
  for (int t = 0; t < 5; ++t) {
    Rng rng(mix_seed(97, static_cast<std::uint64_t>(t)));
    auto a = gen_multicomplex<S>(spec, rng);
    CHECK(eprime(a)->validate().ok);
  }
}

TEST_CASE_TEMPLATE("multicomplex paths", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("the unit law: P_r(R) = Λ_r") {
    Multicomplex<S> unit;
    unit.module.set_dim({0, 0}, 1);
    auto up = share_mc(std::move(unit));
    for (int r = 0; r <= 2; ++r) CHECK(*mc_path<S>(r, up).mc == *lambda_mc<S>(r));
  }

  SUBCASE("E' takes the multicomplex path to the spectral path") {
    GenSpec spec;
    for (int t = 0; t < 3; ++t) {
      Rng rng(mix_seed(101, static_cast<std::uint64_t>(t)));
      auto a = gen_multicomplex<S>(spec, rng);
      for (int r = 0; r <= 2; ++r) {
        McPath<S> mp = mc_path<S>(r, a);
        SSPtr<S> lhs = eprime(mp.mc);
        PathSpace<S> ps = path<S>(r, eprime(a));
        CHECK(find_isomorphism(lhs, ps.ss, {}, mix_seed(5, t, r)).has_value());
      }
    }
  }

  SUBCASE("boundary contracts of the multicomplex path") {
    auto lm = lambda_mc<S>(1);
    McPath<S> mp = mc_path<S>(1, lm);
    CHECK(compose(mp.d_minus, mp.iota).map == mc_identity(lm).map);
    CHECK(compose(mp.d_plus, mp.iota).map == mc_identity(lm).map);
  }
}

TEST_CASE_TEMPLATE("multicomplex pullbacks", S, Fp, Rational) {
  Fp::set_modulus(7);
  GenSpec spec;
  Rng rng(103);
  auto u = gen_multicomplex<S>(spec, rng);
  auto b = gen_multicomplex<S>(spec, rng);
  MultiMorphism<S> g = gen_mc_morphism(u, b, rng);
  McPullback<S> pb = mc_pullback(g, mc_identity(b));
  CHECK(pb.x->module.total_dim() == u->module.total_dim());
  CHECK(pb.pi_u.map.blockwise_invertible());
}

TEST_CASE_TEMPLATE("strict homotopies", S, Fp, Rational) {
  Fp::set_modulus(7);
  GenSpec spec;
  Rng rng(107);
  auto a = gen_multicomplex<S>(spec, rng);
  auto b = gen_multicomplex<S>(spec, rng);
  for (int r = 0; r <= 2; ++r) {
    McPath<S> mp = mc_path<S>(r, b);
    MultiMorphism<S> f = gen_mc_morphism(a, b, rng);
    // h = ι∘f certifies f ≃ f
    MultiMorphism<S> h = compose(mp.iota, f);
    CHECK(mc_strict_homotopy_check(mp, h.map, f, f));
    // a random strict morphism into the path certifies its own endpoints
    McMapSpace<S> sp = mc_map_space(a, mp.mc);
    Vec<S> c(sp.dim());
    for (Index j = 0; j < sp.dim(); ++j) c(j) = rng.chance(60) ? rng.template scalar<S>() : S(0);
    MultiMorphism<S> h2 = sp.morphism(c);
    CHECK(mc_strict_homotopy_check(mp, h2.map, compose(mp.d_minus, h2), compose(mp.d_plus, h2)));
    // corrupting a boundary component is rejected
    for (auto& [pq, d] : a->module.support()) {
      if (b->module.dim(pq) == 0) continue;
      BigradedMap<S> corrupted = h.map;
      Mat<S> blk = corrupted.block(pq);
      blk(0, 0) += S(1);  // the x strand sits first, so this moves ∂^-∘h
      corrupted.set_block(pq, std::move(blk));
      CHECK_FALSE(mc_strict_homotopy_check(mp, corrupted, f, f));
      break;
    }
  }
}

TEST_CASE_TEMPLATE("tot is functorial and additive", S, Fp, Rational) {
  Fp::set_modulus(7);
  GenSpec spec;
  for (int t = 0; t < 4; ++t) {
    Rng rng(mix_seed(109, static_cast<std::uint64_t>(t)));
    auto a = gen_multicomplex<S>(spec, rng);
    auto b = gen_multicomplex<S>(spec, rng);
    auto c = gen_multicomplex<S>(spec, rng);
    MultiMorphism<S> f = gen_mc_morphism(a, b, rng);
    MultiMorphism<S> g = gen_mc_morphism(b, c, rng);
    TotData<S> ta = tot(a), tb = tot(b), tc = tot(c);
    CHECK(compose(tot_morphism(tb, tc, g), tot_morphism(ta, tb, f)) ==
          tot_morphism(ta, tc, compose(g, f)));
    MultiMorphism<S> f2 = gen_mc_morphism(a, b, rng);
    MultiMorphism<S> sum{a, b, f.map + f2.map};
    CHECK(tot_morphism(ta, tb, sum) ==
          FcMorphism<S>::unchecked(ta.fc, tb.fc, tot_morphism(ta, tb, f).n_min, [&] {
            auto m1 = tot_morphism(ta, tb, f);
            auto m2 = tot_morphism(ta, tb, f2);
            std::vector<Mat<S>> ms;
            for (int n = m1.n_min; n < m1.n_min + static_cast<int>(m1.maps.size()); ++n)
              ms.push_back(m1.map_at(n) + m2.map_at(n));
            return ms;
          }()));
  }
}
