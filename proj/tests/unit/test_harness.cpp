#include <doctest.h>

#include "sseq/harness.hpp"

using namespace sseq;

TEST_CASE("harness runs are deterministic and clean at small scale") {
  Fp::set_modulus(7);
  harness::Config cfg;
  cfg.gen.seed = 42;
  cfg.gen.trials = 6;
  for (const auto& name : harness::check_names()) {
    harness::Report r1 = harness::run_check<Fp>(name, cfg);
    harness::Report r2 = harness::run_check<Fp>(name, cfg);
    CHECK(r1.ok());
    CHECK(r1.render() == r2.render());
    CHECK(r1.assertions > 0);
  }
}

TEST_CASE("degenerate generator bounds produce zero objects, checks still pass") {
  Fp::set_modulus(7);
  harness::Config cfg;
  cfg.gen.seed = 1;
  cfg.gen.trials = 3;
  cfg.gen.max_dim = 0;
  for (const auto& name : {"two_out_of_three", "axiom_D", "homotopy"}) {
    harness::Report rep = harness::run_check<Fp>(name, cfg);
    CHECK(rep.ok());
  }
  GenSpec z = cfg.gen;
  Rng rng(1);
  CHECK(gen_spectral<Fp>(z, rng)->module_at(0).trivial());
}

TEST_CASE("seeded generation is reproducible") {
  Fp::set_modulus(7);
  GenSpec spec;
  Rng r1(42), r2(42);
  CHECK(*gen_filtered<Fp>(spec, r1) == *gen_filtered<Fp>(spec, r2));
  CHECK(*gen_multicomplex<Fp>(spec, r1) == *gen_multicomplex<Fp>(spec, r2));
}

TEST_CASE("mutation mode reports counterexamples") {
  Fp::set_modulus(7);
  harness::Config cfg;
  cfg.gen.seed = 42;
  cfg.gen.trials = 8;
  cfg.mutate = true;
  CHECK_FALSE(harness::run_check<Fp>("axiom_C", cfg).ok());
  CHECK_FALSE(harness::run_check<Fp>("rlp", cfg).ok());
}

TEST_CASE("failed trials replay in isolation") {
  Fp::set_modulus(7);
  harness::Config cfg;
  cfg.gen.seed = 42;
  cfg.gen.trials = 8;
  cfg.mutate = true;
  harness::Report rep = harness::run_check<Fp>("axiom_C", cfg);
  REQUIRE_FALSE(rep.ok());
  harness::Config replay = cfg;
  replay.only_trial = rep.failed_trials.front();
  harness::Report rep2 = harness::run_check<Fp>("axiom_C", replay);
  CHECK_FALSE(rep2.ok());
  CHECK(rep2.failed_trials.front() == rep.failed_trials.front());
}

TEST_CASE("counterexample documents replay through the parser") {
  Fp::set_modulus(7);
  harness::Config cfg;
  cfg.gen.seed = 42;
  cfg.gen.trials = 4;
  cfg.mutate = true;
  harness::Report rep = harness::run_check<Fp>("axiom_C", cfg);
  REQUIRE_FALSE(rep.ok());
  // extract the first serialized counterexample and re-parse it
  std::string all;
  bool in_doc = false;
  for (auto& line : rep.failure_lines) {
    if (line.rfind("begin counterexample", 0) == 0) {
      in_doc = true;
      continue;
    }
    if (line.rfind("end counterexample", 0) == 0) break;
    if (in_doc) all += line + "\n";
  }
  REQUIRE_FALSE(all.empty());
  auto doc = io::parse_document<Fp>(all);
  CHECK(doc.spectral_morphism.has_value());
}
