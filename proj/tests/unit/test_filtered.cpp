#include <doctest.h>

#include "sseq/filtered.hpp"
#include "sseq/gen.hpp"
#include "sseq/paths.hpp"
#include "sseq/representables.hpp"

using namespace sseq;

namespace {

// x in degree 0 at level 1, dx = y in degree 1 at level 0
template <class S>
FcPtr<S> two_generator() {
  FilteredComplex<S> a;
  a.n_min = 0;
  a.levels = {{1}, {0}};
  Mat<S> d0(1, 1);
  d0(0, 0) = S(1);
  a.d = {d0, Mat<S>::Zero(0, 1)};
  return share_fc(std::move(a));
}

}  // namespace

TEST_CASE_TEMPLATE("Z_r and B_r page formulas", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("the two-generator complex") {
    FcPtr<S> a = two_generator<S>();
    CHECK(validate_filtered(*a).ok);
    auto [z, b] = zr_br(*a, 1, 1, 0);  // Z_1 at filtration 1, degree 0
    CHECK(z.cols() == 1);              // span{x}: dx = y has level 0 = 1 - 1
    CHECK(b.cols() == 0);
    auto [z2, b2] = zr_br(*a, 2, 1, 0);  // F_{-1} A^1 = 0 kills x
    CHECK(z2.cols() == 0);
  }

  SUBCASE("trivial filtration reduces to cycles and boundaries") {
    // everything at level 0: for r >= 1, Z_r = ker d and B_r ⊇ im d
    FilteredComplex<S> a;
    a.n_min = 0;
    a.levels = {{0, 0}, {0}};
    Mat<S> d0(1, 2);
    d0(0, 0) = S(1);
    d0(0, 1) = S(1);
    a.d = {d0, Mat<S>::Zero(0, 1)};
    FcPtr<S> ap = share_fc(std::move(a));
    auto [z, b] = zr_br(*ap, 1, 0, 0);
    CHECK(z.cols() == kernel_basis(ap->dmat(0)).cols());
    auto [z1, b1] = zr_br(*ap, 1, 0, 1);
    CHECK(b1.cols() == 1);  // im d in degree 1
  }

  SUBCASE("zero complex") {
    FilteredComplex<S> a;
    a.n_min = 0;
    a.levels = {{}};
    a.d = {Mat<S>::Zero(0, 0)};
    auto [z, b] = zr_br(a, 1, 0, 0);
    CHECK(z.cols() == 0);
    CHECK(b.cols() == 0);
  }
}

TEST_CASE_TEMPLATE("the spectral sequence of a filtered complex", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("two-generator complex is the disk D_1(1,1)") {
    SSPtr<S> e = spectral_sequence(two_generator<S>());
    CHECK(e->validate().ok);
    CHECK(e->module_at(1).dim({1, 1}) == 1);
    CHECK(e->module_at(1).dim({0, 1}) == 1);
    CHECK(e->stored_page(1).differential.block({1, 1}).cols() == 1);
    CHECK_FALSE(is_zero(e->stored_page(1).differential.block({1, 1})));
    CHECK(e->module_at(2).trivial());
    CHECK(find_isomorphism(e, disk<S>(1, 1, 1)).has_value());
  }

  SUBCASE("zero differential, trivial filtration: E_0 is the associated graded") {
    FilteredComplex<S> a;
    a.n_min = 0;
    a.levels = {{0, 0}, {0}};
    a.d = {Mat<S>::Zero(1, 2), Mat<S>::Zero(0, 1)};
    SSPtr<S> e = spectral_sequence(share_fc(std::move(a)));
    CHECK(e->module_at(0).dim({0, 0}) == 2);
    CHECK(e->module_at(0).dim({0, 1}) == 1);
    for (Index m = 0; m <= e->top(); ++m) {
      CHECK(e->stored_page(m).differential.is_zero());
      CHECK(e->module_at(m) == e->module_at(0));
    }
  }

  SUBCASE("E(lambda_fc(r)) is lambda(r)") {
    for (int r = 0; r <= 3; ++r) {
      SSPtr<S> e = spectral_sequence(lambda_fc<S>(r));
      auto iso = find_isomorphism(e, lambda<S>(r));
      CHECK(iso.has_value());
    }
  }
}

TEST_CASE_TEMPLATE("E on morphisms", S, Fp, Rational) {
  Fp::set_modulus(7);
  FcPtr<S> a = two_generator<S>();
  EFunctorData<S> ea = e_functor(a);
  CHECK(e_of_morphism(ea, ea, fc_identity(a)) == identity_morphism(ea.ss));
  CHECK(e_of_morphism(ea, ea, fc_zero(a, a)) == zero_morphism(ea.ss, ea.ss));
}

TEST_CASE_TEMPLATE("filtered fibrations and weak equivalences", S, Fp, Rational) {
  Fp::set_modulus(7);
  FcPtr<S> a = two_generator<S>();
  EFunctorData<S> ea = e_functor(a);
  CHECK(is_fc_fibration(ea, ea, fc_identity(a), 1));
  CHECK(is_fc_weq(ea, ea, fc_identity(a), 1));

  // 0 -> A with A nonzero is not a fibration
  FilteredComplex<S> z;
  z.n_min = 0;
  z.levels = {{}};
  z.d = {Mat<S>::Zero(0, 0)};
  FcPtr<S> zp = share_fc(std::move(z));
  EFunctorData<S> ez = e_functor(zp);
  CHECK_FALSE(is_fc_fibration(ez, ea, fc_zero(zp, a), 0));

  // a split projection is a fibration
  FcProduct<S> pr = fc_product(a, a);
  EFunctorData<S> ep = e_functor(pr.ss);
  CHECK(is_fc_fibration(ep, ea, pr.proj_a, 1));
}

TEST_CASE_TEMPLATE("filtered r-homotopy and the filtered path", S, Fp, Rational) {
  Fp::set_modulus(7);
  FcPtr<S> a = two_generator<S>();

  SUBCASE("h = 0 certifies f ≃ f") {
    CHECK(filtered_r_homotopy_check<S>({}, 0, fc_identity(a), fc_identity(a), 1));
    CHECK_FALSE(filtered_r_homotopy_check<S>({}, 0, fc_identity(a), fc_zero(a, a), 1));
  }

  SUBCASE("E(lambda_fc tensor B) is the path of E(B)") {
    GenSpec spec;
    for (int t = 0; t < 3; ++t) {
      Rng rng(mix_seed(73, static_cast<std::uint64_t>(t)));
      FcPtr<S> b = gen_filtered<S>(spec, rng);
      for (int r = 0; r <= 2; ++r) {
        FcPath<S> fp = fc_path<S>(r, b);
        CHECK(validate_filtered(*fp.total).ok);
        CHECK(fp.d_minus.validate().ok);
        CHECK(fp.iota.validate().ok);
        SSPtr<S> lhs = spectral_sequence(fp.total);
        PathSpace<S> ps = path<S>(r, spectral_sequence(b));
        CHECK(find_isomorphism(lhs, ps.ss, {}, mix_seed(3, t, r)).has_value());
      }
    }
  }

  SUBCASE("sampled filtered homotopies satisfy Def 2.5") {
    GenSpec spec;
    Rng rng(79);
    FcPtr<S> a2 = gen_filtered<S>(spec, rng);
    FcPtr<S> b = gen_filtered<S>(spec, rng);
    for (int r = 0; r <= 2; ++r) {
      FcPath<S> fp = fc_path<S>(r, b);
      FcMapSpace<S> sp = fc_map_space(a2, fp.total);
      Vec<S> c(sp.dim());
      for (Index j = 0; j < sp.dim(); ++j) c(j) = rng.chance(60) ? rng.template scalar<S>() : S(0);
      FcMorphism<S> h = sp.morphism(c);
      CHECK(h.validate().ok);
      FcMorphism<S> f = compose(fp.d_minus, h);
      FcMorphism<S> g = compose(fp.d_plus, h);
      std::vector<Mat<S>> hmat;
      for (int n = h.n_min; n < h.n_min + static_cast<int>(h.maps.size()); ++n)
        hmat.push_back(h.map_at(n).middleRows(fp.y_off(n), b->dim(n - 1)));
      CHECK(filtered_r_homotopy_check(hmat, h.n_min, f, g, r));
    }
  }
}

TEST_CASE_TEMPLATE("filtered pullbacks", S, Fp, Rational) {
  Fp::set_modulus(7);
  FcPtr<S> a = two_generator<S>();

  SUBCASE("pullback along the identity") {
    GenSpec spec;
    Rng rng(83);
    FcPtr<S> u = gen_filtered<S>(spec, rng);
    FcMorphism<S> g = gen_fc_morphism(u, a, rng);
    FcPullback<S> pb = pullback_fc(g, fc_identity(a));
    for (int n = pb.x->n_min; n <= pb.x->n_max(); ++n)
      CHECK(is_invertible(pb.pi_u.map_at(n)));  // X ≅ U
  }

  SUBCASE("pullback along zero is a kernel") {
    FcProduct<S> pr = fc_product(a, a);
    FcMorphism<S> z = fc_zero(a, a);
    FcPullback<S> pb = pullback_fc(z, pr.proj_a);
    // X = A ⊕ ker(proj_a) = A ⊕ A
    for (int n = a->n_min; n <= a->n_max(); ++n) CHECK(pb.x->dim(n) == 2 * a->dim(n));
  }

  SUBCASE("E maps pullbacks of acyclic fibrations to pagewise pullbacks") {
    GenSpec spec;
    for (int t = 0; t < 3; ++t) {
      Rng rng(mix_seed(89, static_cast<std::uint64_t>(t)));
      FcPtr<S> b = gen_filtered<S>(spec, rng);
      FcPtr<S> u = gen_filtered<S>(spec, rng);
      for (int r = 0; r <= 1; ++r) {
        FcPath<S> fp = fc_path<S>(r, b);
        FcMorphism<S> p = fp.d_minus;
        FcMorphism<S> g = gen_fc_morphism(u, b, rng);
        FcPullback<S> pb = pullback_fc(g, p);
        EFunctorData<S> eu = e_functor(u), eb = e_functor(b), et = e_functor(fp.total),
                        ex = e_functor(pb.x);
        PullbackResult<S> pe = pullback_surjection(e_of_morphism(eu, eb, g), e_of_morphism(et, eb, p));
        auto med = pe.mediating(e_of_morphism(ex, eu, pb.pi_u), e_of_morphism(ex, et, pb.pi_a));
        REQUIRE(med.has_value());
        for (Index m = 0; m < med->stored_pages(); ++m) CHECK(med->page(m).blockwise_invertible());
      }
    }
  }
}
