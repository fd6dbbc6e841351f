#include <doctest.h>

#include "sseq/fixtures.hpp"
#include "sseq/gen.hpp"
#include "sseq/io.hpp"
#include "sseq/representables.hpp"

using namespace sseq;

TEST_CASE_TEMPLATE("round trips through the document format", S, Fp, Rational) {
  Fp::set_modulus(7);

  SUBCASE("spectral objects") {
    for (const auto& ss : {ring_at<S>(0, 0), fixture_s<S>(), fixture_t<S>(), lambda<S>(2),
                           disk<S>(1, 0, 0), sphere<S>(2, -1, 1)}) {
      std::string doc = io::print_spectral(*ss);
      auto parsed = io::parse_document<S>(doc);
      REQUIRE(parsed.spectral);
      CHECK(*parsed.spectral == *ss);
      CHECK(io::print_spectral(*parsed.spectral) == doc);
    }
  }

  SUBCASE("morphisms") {
    for (const auto& f : {fixture_f_into_s<S>(), fixture_pi_from_t<S>(), varphi<S>(1, 0, 0)}) {
      std::string doc = io::print_spectral_morphism(f);
      auto parsed = io::parse_document<S>(doc);
      REQUIRE(parsed.spectral_morphism);
      CHECK(*parsed.spectral_morphism == f);
      CHECK(io::print_spectral_morphism(*parsed.spectral_morphism) == doc);
    }
  }

  SUBCASE("filtered and multicomplex objects") {
    std::string fdoc = io::print_filtered(*lambda_fc<S>(2));
    auto pf = io::parse_document<S>(fdoc);
    REQUIRE(pf.filtered);
    CHECK(*pf.filtered == *lambda_fc<S>(2));
    CHECK(io::print_filtered(*pf.filtered) == fdoc);

    std::string mdoc = io::print_multicomplex(*lambda_mc<S>(2));
    auto pm = io::parse_document<S>(mdoc);
    REQUIRE(pm.multicomplex);
    CHECK(*pm.multicomplex == *lambda_mc<S>(2));
    CHECK(io::print_multicomplex(*pm.multicomplex) == mdoc);
  }

  SUBCASE("generated objects, both object kinds of morphism") {
    GenSpec spec;
    Rng rng(113);
    FcPtr<S> a = gen_filtered<S>(spec, rng);
    FcPtr<S> b = gen_filtered<S>(spec, rng);
    FcMorphism<S> f = gen_fc_morphism(a, b, rng);
    std::string doc = io::print_filtered_morphism(f);
    auto parsed = io::parse_document<S>(doc);
    REQUIRE(parsed.filtered_morphism);
    CHECK(io::print_filtered_morphism(*parsed.filtered_morphism) == doc);

    McPtr<S> ma = gen_multicomplex<S>(spec, rng);
    McPtr<S> mb = gen_multicomplex<S>(spec, rng);
    MultiMorphism<S> mf = gen_mc_morphism(ma, mb, rng);
    std::string mdoc = io::print_multicomplex_morphism(mf);
    auto mparsed = io::parse_document<S>(mdoc);
    REQUIRE(mparsed.multicomplex_morphism);
    CHECK(io::print_multicomplex_morphism(*mparsed.multicomplex_morphism) == mdoc);
  }
}

TEST_CASE("invariant violations are reported with the validator's message") {
  Fp::set_modulus(7);
  // a 1-page tower whose differential does not square to zero
  std::string doc =
      "sseq v1\n"
      "field Fp:7\n"
      "kind spectral\n"
      "pages 2\n"
      "page 0\n"
      "module 3\n"
      "(0,0) 1\n"
      "(0,1) 1\n"
      "(0,2) 1\n"
      "differential 2\n"
      "block (0,0) 1 1\n"
      "1\n"
      "block (0,1) 1 1\n"
      "1\n"
      "page 1\n"
      "module 0\n"
      "differential 0\n"
      "charmaps 1\n"
      "charmap 0 0\n";
  try {
    io::parse_document<Fp>(doc);
    FAIL("expected an invariant violation");
  } catch (const InvariantError& e) {
    CHECK(std::string(e.what()).find("(0,0)") != std::string::npos);
  }
}

TEST_CASE("syntax errors carry line numbers") {
  Fp::set_modulus(7);
  CHECK_THROWS_AS(io::parse_document<Fp>("sseq v1\nfield Fp:7\nkind spectral\npages x\n"), ParseError);
  CHECK_THROWS_AS(io::parse_document<Fp>("sseq v2\n"), ParseError);
  CHECK_THROWS_AS(io::parse_document<Fp>("sseq v1\nfield Q\nkind spectral\npages 1\n"), ParseError);
  try {
    io::parse_document<Fp>("sseq v1\nfield Fp:7\nkind spectral\npages 1\npage 0\nmodule 1\nbad\n");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 6);
  }
}

TEST_CASE("the cokernel fixture fails validation on parse") {
  Fp::set_modulus(7);
  std::string doc = io::print_spectral(pagewise_cokernel(fixture_f_into_s<Fp>()));
  CHECK_THROWS_AS(io::parse_document<Fp>(doc), InvariantError);
}
