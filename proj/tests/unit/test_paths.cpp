#include <doctest.h>

#include "sseq/fixtures.hpp"
#include "sseq/gen.hpp"
#include "sseq/paths.hpp"
#include "sseq/representables.hpp"

using namespace sseq;

TEST_CASE_TEMPLATE("lambda fixtures", S, Fp, Rational) {
  Fp::set_modulus(7);
  for (int r = 0; r <= 4; ++r) {
    SSPtr<S> lam = lambda<S>(r);
    CHECK(lam->validate().ok);
    CHECK(lam->top() == r + 1);
    for (int m = 0; m <= r; ++m) {
      CHECK(lam->module_at(m).dim({0, 0}) == 2);
      CHECK(lam->module_at(m).dim({-r, 1 - r}) == 1);
      if (m < r) CHECK(lam->stored_page(m).differential.is_zero());
    }
    Mat<S> dr = lam->stored_page(r).differential.block({0, 0});
    CHECK(dr(0, 0) == S(-1));  // d_r(e_-) = -u
    CHECK(dr(0, 1) == S(1));   // d_r(e_+) = u
    CHECK(lam->module_at(r + 1).total_dim() == 1);
    CHECK(lam->module_at(r + 1).dim({0, 0}) == 1);
  }
  // lambda(0) puts u at (0,1)
  CHECK(lambda<S>(0)->module_at(0).dim({0, 1}) == 1);
}

TEST_CASE_TEMPLATE("the r-path of a spectral sequence", S, Fp, Rational) {
  Fp::set_modulus(7);
  auto r00 = ring_at<S>(0, 0);

  SUBCASE("P(0; R(0,0)) is lambda(0), middle summand at (0,1)") {
    PathSpace<S> ps = path<S>(0, r00);
    CHECK(ps.ss->module_at(0).dim({0, 0}) == 2);
    CHECK(ps.ss->module_at(0).dim({0, 1}) == 1);
    CHECK(ps.ss->module_at(1).total_dim() == 1);
    CHECK(find_isomorphism(ps.ss, lambda<S>(0)).has_value());
  }

  SUBCASE("section and boundary contracts") {
    GenSpec spec;
    for (int t = 0; t < 4; ++t) {
      Rng rng(mix_seed(41, static_cast<std::uint64_t>(t)));
      auto a = gen_spectral<S>(spec, rng);
      for (Index r = 0; r <= 2; ++r) {
        PathSpace<S> ps = path<S>(r, a);
        CHECK(ps.ss->validate().ok);
        CHECK(compose(ps.d_minus, ps.iota) == identity_morphism(a));
        CHECK(compose(ps.d_plus, ps.iota) == identity_morphism(a));
        CHECK(is_Er_quasi_iso(ps.iota, r));
        CHECK(is_acyclic_r_fibration(ps.d_minus, r));
        CHECK(is_acyclic_r_fibration(ps.d_plus, r));
        ProductResult<S> aa = product(a, a);
        CHECK(is_r_fibration(pair_into_product(aa, ps.d_minus, ps.d_plus), r));
      }
    }
  }
}

TEST_CASE_TEMPLATE("paths of morphisms", S, Fp, Rational) {
  Fp::set_modulus(7);
  SpectralMorphism<S> f = fixture_f_into_s<S>();
  for (Index r = 0; r <= 2; ++r) {
    PathSpace<S> pa = path<S>(r, f.source_ptr());
    PathSpace<S> pb = path<S>(r, f.target_ptr());
    SpectralMorphism<S> pf = path_morphism(pa, pb, f);
    CHECK(pf.validate().ok);
    CHECK(path_morphism(pa, pa, identity_morphism(f.source_ptr())) == identity_morphism(pa.ss));
    CHECK(path_morphism(pa, pb, zero_morphism(f.source_ptr(), f.target_ptr())) ==
          zero_morphism(pa.ss, pb.ss));
    // naturality with the structure maps
    CHECK(compose(pb.d_minus, pf) == compose(f, pa.d_minus));
    CHECK(compose(pb.d_plus, pf) == compose(f, pa.d_plus));
    CHECK(compose(pf, pa.iota) == compose(pb.iota, f));
  }
  // the middle strand carries no sign: at page 1, P(1;f) acts as +f_1 there
  PathSpace<S> pa = path<S>(1, f.source_ptr());
  PathSpace<S> pb = path<S>(1, f.target_ptr());
  SpectralMorphism<S> pf = path_morphism(pa, pb, f);
  BigradedMap<S> mid = compose(pb.middle_projection(1),
                               compose(pf.page(1), pa.middle_injection(1)));
  CHECK(mid == f.page(1));
}

TEST_CASE_TEMPLATE("path functoriality on samples", S, Fp, Rational) {
  Fp::set_modulus(7);
  GenSpec spec;
  for (int t = 0; t < 4; ++t) {
    Rng rng(mix_seed(43, static_cast<std::uint64_t>(t)));
    auto a = gen_spectral<S>(spec, rng);
    auto b = gen_spectral<S>(spec, rng);
    auto c = gen_spectral<S>(spec, rng);
    auto f = gen_morphism(a, b, rng);
    auto g = gen_morphism(b, c, rng);
    if (!f || !g) continue;
    for (Index r = 0; r <= 2; ++r) {
      PathSpace<S> pa = path<S>(r, a);
      PathSpace<S> pb = path<S>(r, b);
      PathSpace<S> pc = path<S>(r, c);
      CHECK(path_morphism(pa, pc, compose(*g, *f)) ==
            compose(path_morphism(pb, pc, *g), path_morphism(pa, pb, *f)));
    }
  }
}

TEST_CASE_TEMPLATE("mapping path space", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("u = identity on R(0,0), r = 0") {
    auto r00 = ring_at<S>(0, 0);
    MappingPath<S> mp = mapping_path_space<S>(0, identity_morphism(r00));
    CHECK(mp.ss->module_at(0).dim({0, 0}) == 2);
    CHECK(mp.ss->module_at(0).dim({0, 1}) == 1);
    CHECK(mp.ss->module_at(1).total_dim() == 1);
    CHECK(compose(mp.p, mp.i) == identity_morphism(r00));
    CHECK(compose(mp.rho, mp.i) == identity_morphism(r00));
  }

  SUBCASE("u = 0 embeds the source as the first summand") {
    auto a = fixture_s<S>();
    auto b = ring_at<S>(0, 0);
    MappingPath<S> mp = mapping_path_space<S>(1, zero_morphism(a, b));
    CHECK(compose(mp.rho, mp.i) == identity_morphism(a));
    CHECK(is_r_fibration(mp.p, 1));
    for (Index m = 0; m <= 1; ++m) CHECK(mp.p.page(m).blockwise_surjective());
  }

  SUBCASE("factoring Example 4.6's morphism at r = 1") {
    SpectralMorphism<S> f = fixture_f_into_s<S>();
    MappingPath<S> mp = mapping_path_space<S>(1, f);
    CHECK(compose(mp.p, mp.i) == f);
    CHECK(is_r_fibration(mp.p, 1));
    CHECK(is_acyclic_r_fibration(mp.rho, 1));
    CHECK(compose(mp.rho, mp.i) == identity_morphism(f.source_ptr()));
  }
}

TEST_CASE_TEMPLATE("r-homotopies", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("reflexivity via the solver") {
    SpectralMorphism<S> f = fixture_f_into_s<S>();
    auto w = find_r_homotopy(f, f, 1);
    REQUIRE(w.has_value());
    CHECK(is_r_homotopy(*w));
    for (auto& hm : w->hhat) CHECK(hm.is_zero());
  }

  SUBCASE("the explicit contraction of the path space") {
    GenSpec spec;
    for (int t = 0; t < 3; ++t) {
      Rng rng(mix_seed(47, static_cast<std::uint64_t>(t)));
      auto a = gen_spectral<S>(spec, rng);
      for (Index r = 0; r <= 2; ++r) {
        PathSpace<S> ps = path<S>(r, a);
        RHomotopy<S> h = path_contraction_homotopy(ps);
        CHECK(is_r_homotopy(h));
      }
    }
  }

  SUBCASE("1 and 0 on R(0,0) are not homotopic") {
    auto r00 = ring_at<S>(0, 0);
    for (Index r = 0; r <= 2; ++r)
      CHECK_FALSE(find_r_homotopy(identity_morphism(r00), zero_morphism(r00, r00), r).has_value());
  }

  SUBCASE("homotopy equivalences") {
    auto r00 = ring_at<S>(0, 0);
    auto eq_id = is_r_homotopy_equivalence(identity_morphism(r00), 1);
    REQUIRE(eq_id.has_value());
    CHECK(is_r_homotopy(eq_id->fg_to_id));
    CHECK(is_r_homotopy(eq_id->gf_to_id));

    // ι_A is an r-homotopy equivalence (Prop 6.7)
    GenSpec spec;
    Rng rng(53);
    auto a = gen_spectral<S>(spec, rng);
    for (Index r = 0; r <= 1; ++r) {
      PathSpace<S> ps = path<S>(r, a);
      auto eq = is_r_homotopy_equivalence(ps.iota, r);
      REQUIRE(eq.has_value());
      CHECK(is_r_homotopy(eq->fg_to_id));
      CHECK(is_r_homotopy(eq->gf_to_id));
      CHECK(is_Er_quasi_iso(ps.iota, r));  // S_r ⊆ E_r
    }

    // inclusion into a disk-padded object: the disk is r-contractible
    auto d = disk<S>(1, 0, 0);
    ProductResult<S> pr = product(r00, d);
    auto eq2 = is_r_homotopy_equivalence(pr.inc_a, 1);
    REQUIRE(eq2.has_value());
    CHECK(is_r_homotopy(eq2->fg_to_id));
    CHECK(is_r_homotopy(eq2->gf_to_id));

    // the zero map R -> R is not an equivalence
    CHECK_FALSE(is_r_homotopy_equivalence(zero_morphism(r00, r00), 1).has_value());
  }
}
