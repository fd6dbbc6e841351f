#pragma once

#include <sstream>

#include "sseq/fixtures.hpp"
#include "sseq/gen.hpp"
#include "sseq/io.hpp"

namespace sseq {
namespace harness {

struct Config {
  GenSpec gen;
  std::vector<int> rs{0, 1, 2};
  bool mutate = false;        // corrupt one predicate to prove the harness can fail
  long only_trial = -1;       // replay a single trial index (or -1 for all)
};

struct Report {
  std::string name;
  std::string field;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<int> rs;
  bool mutate = false;
  long assertions = 0;
  std::vector<long> failed_trials;
  std::vector<std::string> failure_lines;

  bool ok() const { return failed_trials.empty(); }

  std::string render() const {
    std::ostringstream os;
    os << "check " << name << " field=" << field << " seed=" << seed << " trials=" << trials << " rs=";
    for (size_t i = 0; i < rs.size(); ++i) os << (i ? "," : "") << rs[i];
    if (mutate) os << " mutate=1";
    os << '\n';
    for (auto& l : failure_lines) os << l << '\n';
    os << "RESULT status=" << (ok() ? "ok" : "fail") << " check=" << name << " seed=" << seed
       << " trials=" << trials << " assertions=" << assertions << " failures=" << failed_trials.size()
       << " failed_trials=";
    for (size_t i = 0; i < failed_trials.size(); ++i) os << (i ? "," : "") << failed_trials[i];
    os << '\n';
    return os.str();
  }
};

namespace detail {

template <class S>
struct Trial {
  Report* rep;
  long index;
  int r;
  bool failed = false;

  void require(bool cond, const std::string& what, const std::vector<std::pair<std::string, std::string>>& docs = {}) {
    ++rep->assertions;
    if (cond) return;
    if (!failed) rep->failed_trials.push_back(index);
    failed = true;
    rep->failure_lines.push_back("trial " + std::to_string(index) + " r=" + std::to_string(r) +
                                 " FAIL: " + what);
    for (auto& [name, doc] : docs) {
      rep->failure_lines.push_back("begin counterexample " + name + " trial=" + std::to_string(index));
      rep->failure_lines.push_back(doc);
      rep->failure_lines.push_back("end counterexample " + name);
    }
  }
};

// run one function per (trial, r) with a per-trial deterministic seed
template <class S, class F>
Report run(const std::string& name, const Config& cfg, F&& body) {
  Report rep;
  rep.name = name;
  rep.field = field_name<S>();
  rep.seed = cfg.gen.seed;
  rep.trials = cfg.gen.trials;
  rep.rs = cfg.rs;
  rep.mutate = cfg.mutate;
  for (long t = 0; t < cfg.gen.trials; ++t) {
    if (cfg.only_trial >= 0 && t != cfg.only_trial) continue;
    for (int r : cfg.rs) {
      Rng rng(mix_seed(cfg.gen.seed, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(r)));
      Trial<S> trial{&rep, t, r};
      body(trial, rng, r);
    }
  }
  return rep;
}

// ----- manufactured morphisms -------------------------------------------

// weak equivalences come in recognizable shapes: path/mapping-path sections
// and retractions, product swaps, identities
template <class S>
SpectralMorphism<S> make_weq(const Config& cfg, Rng& rng, int r) {
  SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
  switch (rng.below(4)) {
    case 0:
      return path<S>(r, a).iota;
    case 1:
      return path<S>(r, a).d_minus;
    case 2: {
      SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
      auto u = gen_morphism(a, b, rng);
      return mapping_path_space<S>(r, u ? *u : zero_morphism(a, b)).rho;
    }
    default: {
      SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
      ProductResult<S> ab = product(a, b);
      ProductResult<S> ba = product(b, a);
      return pair_into_product(ba, ab.proj_b, ab.proj_a);  // the swap isomorphism
    }
  }
}

// acyclic r-fibrations (mutate = false) or mere r-fibrations that fail
// acyclicity generically (mutate = true, for sensitivity runs)
template <class S>
SpectralMorphism<S> make_acyclic_fibration(const Config& cfg, Rng& rng, int r) {
  SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
  if (cfg.mutate) {
    // projection X × D_{r+1} -> X is a fibration but not an E_r-equivalence
    int half = std::max(1, cfg.gen.window / 2);
    SSPtr<S> d = disk<S>(r + 1, rng.range(-half, half), rng.range(-half, half));
    return product(a, d).proj_a;
  }
  switch (rng.below(3)) {
    case 0: {
      SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
      auto u = gen_morphism(a, b, rng);
      return mapping_path_space<S>(r, u ? *u : zero_morphism(a, b)).rho;
    }
    case 1:
      return path<S>(r, a).d_minus;
    default: {
      int half = std::max(1, cfg.gen.window / 2);
      int k = r == 0 ? 0 : rng.range(0, r);
      SSPtr<S> d = disk<S>(k, rng.range(-half, half), rng.range(-half, half));
      return product(a, d).proj_a;
    }
  }
}

template <class S>
SpectralMorphism<S> make_any_morphism(const Config& cfg, Rng& rng, int r) {
  switch (rng.below(6)) {
    case 0: {
      SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
      return identity_morphism(a);
    }
    case 1: {
      SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
      SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
      return zero_morphism(a, b);
    }
    case 2:
      return make_weq<S>(cfg, rng, r);
    case 3:
      return make_acyclic_fibration<S>(cfg, rng, r);
    case 4: {
      SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
      PathSpace<S> ps = path<S>(r, a);
      ProductResult<S> aa = product(a, a);
      return pair_into_product(aa, ps.d_minus, ps.d_plus);
    }
    default: {
      SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
      SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
      auto f = gen_morphism(a, b, rng, cfg.gen.density);
      return f ? *f : zero_morphism(a, b);
    }
  }
}

// a commuting square (a, b) : u -> u' solved jointly at page 0
template <class S>
std::optional<std::pair<SpectralMorphism<S>, SpectralMorphism<S>>> gen_square(
    const SpectralMorphism<S>& u, const SpectralMorphism<S>& u2, Rng& rng) {
  const SSPtr<S>&sa = u.source_ptr(), &sb = u.target_ptr();
  const SSPtr<S>&ta = u2.source_ptr(), &tb = u2.target_ptr();
  MapLayout<S> la = MapLayout<S>::make(sa->module_at(0), ta->module_at(0), {0, 0});
  MapLayout<S> lb = MapLayout<S>::make(sb->module_at(0), tb->module_at(0), {0, 0});
  Index ka = std::max(sa->top(), ta->top());
  Index kb = std::max(sb->top(), tb->top());
  Index kk = std::max({ka, kb, u.stored_pages() - 1, u2.stored_pages() - 1});
  TransportCtx<S> ctxa(*sa, *ta, kk);
  TransportCtx<S> ctxb(*sb, *tb, kk);
  auto residual = [&](const Vec<S>& x) {
    std::vector<S> out;
    auto as = ctxa.run(la.unvec(x.topRows(la.total)));
    auto bs = ctxb.run(lb.unvec(x.bottomRows(lb.total)));
    for (Index m = 0; m <= kk; ++m) {
      append_entries(out, BigradedMap<S>(compose(ta->page(m).differential, as[static_cast<size_t>(m)]) -
                                         compose(as[static_cast<size_t>(m)], sa->page(m).differential)));
      append_entries(out, BigradedMap<S>(compose(tb->page(m).differential, bs[static_cast<size_t>(m)]) -
                                         compose(bs[static_cast<size_t>(m)], sb->page(m).differential)));
      append_entries(out, BigradedMap<S>(compose(u2.page(m), as[static_cast<size_t>(m)]) -
                                         compose(bs[static_cast<size_t>(m)], u.page(m))));
    }
    return out;
  };
  AffineSolution<S> sol = solve_affine<S>(la.total + lb.total, residual);
  if (!sol.solvable) return std::nullopt;
  Vec<S> x = sol.particular;
  if (sol.kernel.cols() > 0) {
    Vec<S> c(sol.kernel.cols());
    for (Index j = 0; j < c.rows(); ++j) c(j) = rng.chance(60) ? rng.scalar<S>() : S(0);
    x += sol.kernel.lazyProduct(c);
  }
  try {
    auto a = SpectralMorphism<S>::derive(la.unvec(x.topRows(la.total)), sa, ta);
    auto b = SpectralMorphism<S>::derive(lb.unvec(x.bottomRows(lb.total)), sb, tb);
    return std::make_pair(std::move(a), std::move(b));
  } catch (const NotAMorphism&) {
    return std::nullopt;
  }
}

}  // namespace detail

// ---------------------------------------------------------------- checks

// two-out-of-three for E_r-quasi-isomorphisms, over composable pairs drawn
// from a pool rich in genuine weak equivalences
template <class S>
Report check_two_out_of_three(const Config& cfg) {
  return detail::run<S>("two_out_of_three", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
    PathSpace<S> ps = path<S>(r, a);
    SpectralMorphism<S> f, g;
    switch (rng.below(4)) {
      case 0:
        f = ps.iota;
        g = rng.chance(50) ? ps.d_minus : ps.d_plus;
        break;
      case 1: {
        SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
        auto u = gen_morphism(a, b, rng);
        MappingPath<S> mp = mapping_path_space<S>(r, u ? *u : zero_morphism(a, b));
        f = mp.i;
        g = rng.chance(50) ? mp.p : mp.rho;
        break;
      }
      case 2: {
        SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
        auto h1 = gen_morphism(a, b, rng);
        f = h1 ? *h1 : zero_morphism(a, b);
        SSPtr<S> c = gen_spectral<S>(cfg.gen, rng);
        auto h2 = gen_morphism(b, c, rng);
        g = h2 ? *h2 : zero_morphism(b, c);
        break;
      }
      default: {
        SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
        ProductResult<S> ab = product(a, b);
        ProductResult<S> ba = product(b, a);
        f = pair_into_product(ba, ab.proj_b, ab.proj_a);  // the swap isomorphism A×B -> B×A
        g = ba.proj_b;                                    // projection back to A
        break;
      }
    }
    bool w1 = is_Er_quasi_iso(f, r);
    bool w2 = is_Er_quasi_iso(g, r);
    bool w3 = is_Er_quasi_iso(compose(g, f), r);
    int count = int(w1) + int(w2) + int(w3);
    bool bad = (count == 2);
    if (cfg.mutate) bad = (count == 2) || (count == 3 && !w1);  // unreachable arm; keep honest
    t.require(!bad,
              "two-out-of-three violated (w(f)=" + std::to_string(w1) + " w(g)=" + std::to_string(w2) +
                  " w(gf)=" + std::to_string(w3) + ")",
              {{"f", io::print_spectral_morphism(f)}, {"g", io::print_spectral_morphism(g)}});
  });
}

// axiom (C): the pullback of an acyclic r-fibration along any map exists and
// is an acyclic r-fibration (and pullbacks preserve surjections)
template <class S>
Report check_axiom_c(const Config& cfg) {
  return detail::run<S>("axiom_C", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SpectralMorphism<S> p = detail::make_acyclic_fibration<S>(cfg, rng, r);
    if (!cfg.mutate) {
      t.require(is_acyclic_r_fibration(p, r), "manufactured map is not an acyclic fibration",
                {{"p", io::print_spectral_morphism(p)}});
    }
    SSPtr<S> v = gen_spectral<S>(cfg.gen, rng);
    auto gm = gen_morphism(v, p.target_ptr(), rng);
    SpectralMorphism<S> g = gm ? *gm : zero_morphism(v, p.target_ptr());
    PullbackResult<S> pb = pullback_surjection(g, p);
    t.require(is_surjection(pb.pi_u), "pullback projection is not a surjection",
              {{"p", io::print_spectral_morphism(p)}, {"g", io::print_spectral_morphism(g)}});
    t.require(is_acyclic_r_fibration(pb.pi_u, r), "pullback of acyclic fibration is not acyclic",
              {{"p", io::print_spectral_morphism(p)}, {"g", io::print_spectral_morphism(g)}});
  });
}

// axiom (D): u = p ∘ i through the mapping path space, i right inverse to the
// acyclic fibration ρ; plus functoriality of the factorization on squares
template <class S>
Report check_axiom_d(const Config& cfg) {
  return detail::run<S>("axiom_D", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SpectralMorphism<S> u = detail::make_any_morphism<S>(cfg, rng, r);
    MappingPath<S> mp = mapping_path_space<S>(r, u);
    t.require(compose(mp.p, mp.i) == u, "p∘i ≠ u", {{"u", io::print_spectral_morphism(u)}});
    t.require(is_r_fibration(mp.p, r), "p is not an r-fibration", {{"u", io::print_spectral_morphism(u)}});
    t.require(compose(mp.rho, mp.i) == identity_morphism(u.source_ptr()), "ρ∘i ≠ 1",
              {{"u", io::print_spectral_morphism(u)}});
    bool rho_acyclic = is_acyclic_r_fibration(mp.rho, r);
    if (cfg.mutate) rho_acyclic = is_acyclic_r_fibration(mp.p, r);  // wrong map on purpose
    t.require(rho_acyclic, "ρ is not an acyclic r-fibration", {{"u", io::print_spectral_morphism(u)}});

    SpectralMorphism<S> u2 = detail::make_any_morphism<S>(cfg, rng, r);
    auto square = detail::gen_square(u, u2, rng);
    if (square) {
      MappingPath<S> mp2 = mapping_path_space<S>(r, u2);
      SpectralMorphism<S> m = mapping_path_induced(mp, mp2, square->first, square->second);
      t.require(compose(m, mp.i) == compose(mp2.i, square->first), "factorization not natural in i",
                {{"u", io::print_spectral_morphism(u)}, {"u2", io::print_spectral_morphism(u2)}});
      t.require(compose(mp2.p, m) == compose(square->second, mp.p), "factorization not natural in p",
                {{"u", io::print_spectral_morphism(u)}, {"u2", io::print_spectral_morphism(u2)}});
      t.require(compose(mp2.rho, m) == compose(square->first, mp.rho), "factorization not natural in ρ",
                {{"u", io::print_spectral_morphism(u)}, {"u2", io::print_spectral_morphism(u2)}});
    }
  });
}

// Def 4.7(4): for a weak equivalence g, the triple (w,f,s) = (i, p, ρ) has
// g = f(g)∘w(g), s(g)∘w(g) = 1, with f(g), s(g) acyclic fibrations
template <class S>
Report check_partial_brown(const Config& cfg) {
  return detail::run<S>("partial_brown", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SpectralMorphism<S> g = cfg.mutate ? detail::make_any_morphism<S>(cfg, rng, r)
                                       : detail::make_weq<S>(cfg, rng, r);
    if (!cfg.mutate)
      t.require(is_Er_quasi_iso(g, r), "manufactured map is not a weak equivalence",
                {{"g", io::print_spectral_morphism(g)}});
    else if (is_Er_quasi_iso(g, r))
      return;  // mutation wants non-equivalences
    MappingPath<S> mp = mapping_path_space<S>(r, g);
    t.require(compose(mp.p, mp.i) == g, "g ≠ f(g)∘w(g)", {{"g", io::print_spectral_morphism(g)}});
    t.require(compose(mp.rho, mp.i) == identity_morphism(g.source_ptr()), "s(g)∘w(g) ≠ 1",
              {{"g", io::print_spectral_morphism(g)}});
    t.require(is_acyclic_r_fibration(mp.rho, r), "s(g) not an acyclic fibration",
              {{"g", io::print_spectral_morphism(g)}});
    t.require(is_acyclic_r_fibration(mp.p, r), "f(g) not an acyclic fibration",
              {{"g", io::print_spectral_morphism(g)}});
  });
}

// direct predicates against the lifting-property characterizations
template <class S>
Report check_rlp(const Config& cfg) {
  return detail::run<S>("rlp", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SpectralMorphism<S> f = detail::make_any_morphism<S>(cfg, rng, r);
    bool direct_fib = is_r_fibration(f, r);
    bool lifted_fib = rfib_via_rlp(f, r);
    t.require(direct_fib == lifted_fib,
              "J'_r lifting disagrees with the direct r-fibration predicate (direct=" +
                  std::to_string(direct_fib) + ")",
              {{"f", io::print_spectral_morphism(f)}});
    bool direct_acyclic = is_acyclic_r_fibration(f, r);
    bool lifted_acyclic = acyclic_rfib_via_rlp(f, r);
    if (cfg.mutate) lifted_acyclic = lifted_fib;  // deliberately wrong comparison
    t.require(direct_acyclic == lifted_acyclic,
              "I'_r lifting disagrees with the direct acyclic-fibration predicate (direct=" +
                  std::to_string(direct_acyclic) + ")",
              {{"f", io::print_spectral_morphism(f)}});
  });
}

// predicate algebra: acyclic = qiso ∧ surjection, monotonicity in r,
// derive round-trip, homology functoriality, pullback universal property
template <class S>
Report check_predicates(const Config& cfg) {
  return detail::run<S>("predicates", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SpectralMorphism<S> f = detail::make_any_morphism<S>(cfg, rng, r);
    bool acyclic = is_acyclic_r_fibration(f, r);
    bool split = is_Er_quasi_iso(f, r) && is_surjection(f);
    t.require(acyclic == split, "acyclic fibration ≠ surjective E_r-equivalence",
              {{"f", io::print_spectral_morphism(f)}});
    if (is_Er_quasi_iso(f, r))
      t.require(is_Er_quasi_iso(f, r + 1), "E_r ⊄ E_{r+1}", {{"f", io::print_spectral_morphism(f)}});
    if (is_r_fibration(f, r + 1))
      t.require(is_r_fibration(f, r), "Fib_{r+1} ⊄ Fib_r", {{"f", io::print_spectral_morphism(f)}});
    // a morphism is determined by its 0-page
    SpectralMorphism<S> rebuilt = SpectralMorphism<S>::derive(f.page(0), f.source_ptr(), f.target_ptr());
    t.require(rebuilt == f, "derive(f_0) does not round-trip", {{"f", io::print_spectral_morphism(f)}});
    // pullback universal property against a random cone
    SpectralMorphism<S> p = detail::make_acyclic_fibration<S>(cfg, rng, r);
    auto gm = gen_morphism(gen_spectral<S>(cfg.gen, rng), p.target_ptr(), rng);
    if (gm) {
      PullbackResult<S> pb = pullback_surjection(*gm, p);
      // cone from the pullback itself must mediate to the identity
      auto med = pb.mediating(pb.pi_u, pb.pi_a);
      t.require(med.has_value() && *med == identity_morphism(pb.ss), "universal property fails on itself",
                {{"p", io::print_spectral_morphism(p)}});
    }
  });
}

// homotopy closure: extraction, reflexivity, symmetry, transitivity,
// composition compatibility, and the explicit path contraction witness
template <class S>
Report check_homotopy(const Config& cfg) {
  return detail::run<S>("homotopy", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    SSPtr<S> a = gen_spectral<S>(cfg.gen, rng);
    SSPtr<S> b = gen_spectral<S>(cfg.gen, rng);
    PathSpace<S> pb = path<S>(r, b);
    HomSpace<S> hs = hom_space(a, pb.ss);
    SpectralMorphism<S> h;
    if (hs.dim() > 0) {
      Vec<S> c(hs.dim());
      for (Index j = 0; j < hs.dim(); ++j) c(j) = rng.chance(cfg.gen.density) ? rng.scalar<S>() : S(0);
      h = hs.morphism(c);
    } else {
      auto f0 = gen_morphism(a, b, rng);
      h = compose(pb.iota, f0 ? *f0 : zero_morphism(a, b));
    }
    SpectralMorphism<S> f = compose(pb.d_minus, h);
    SpectralMorphism<S> g = compose(pb.d_plus, h);
    RHomotopy<S> w;
    w.r = r;
    w.f = cfg.mutate ? g : f;  // mutation: swap endpoints without negating the witness
    w.g = cfg.mutate ? f : g;
    for (Index m = 0; m <= r; ++m) w.hhat.push_back(compose(pb.middle_projection(m), h.page(m)));
    t.require(is_r_homotopy(w), "extracted witness rejected",
              {{"h", io::print_spectral_morphism(h)}});

    // reflexivity: the zero witness certifies f ≃ f
    RHomotopy<S> refl;
    refl.r = r;
    refl.f = f;
    refl.g = f;
    for (Index m = 0; m <= r; ++m)
      refl.hhat.push_back(BigradedMap<S>::zero(a->module_at(m), b->module_at(m),
                                               {static_cast<int>(r), static_cast<int>(r) - 1}));
    t.require(is_r_homotopy(refl), "zero witness rejected for f ≃ f");

    // symmetry: negated witness certifies g ≃ f
    RHomotopy<S> sym;
    sym.r = r;
    sym.f = g;
    sym.g = f;
    for (auto& hm : w.hhat) sym.hhat.push_back(hm * S(-1));
    if (!cfg.mutate) t.require(is_r_homotopy(sym), "negated witness rejected for symmetry");

    // transitivity: a second homotopy starting at g, witnesses add
    std::vector<PageConstraint<S>> extra{[&](const std::vector<BigradedMap<S>>& pages) {
      std::vector<BigradedMap<S>> out;
      for (size_t m = 0; m < pages.size(); ++m)
        out.push_back(compose(pb.d_minus.page(static_cast<Index>(m)), pages[m]) -
                      g.page(static_cast<Index>(m)));
      return out;
    }};
    HomSpace<S> hs2 = hom_space(a, pb.ss, extra);
    if (hs2.solvable()) {
      Vec<S> c2(hs2.dim());
      for (Index j = 0; j < hs2.dim(); ++j) c2(j) = rng.chance(cfg.gen.density) ? rng.scalar<S>() : S(0);
      SpectralMorphism<S> h2 = hs2.morphism(c2);
      SpectralMorphism<S> k = compose(pb.d_plus, h2);
      RHomotopy<S> trans;
      trans.r = r;
      trans.f = f;
      trans.g = k;
      for (Index m = 0; m <= r; ++m)
        trans.hhat.push_back(w.hhat[static_cast<size_t>(m)] +
                             compose(pb.middle_projection(m), h2.page(m)));
      if (!cfg.mutate) t.require(is_r_homotopy(trans), "summed witnesses rejected for transitivity");
    } else {
      t.require(false, "no homotopy out of g although ι∘g exists");
    }

    // compatibility with composition on both sides
    SSPtr<S> c = gen_spectral<S>(cfg.gen, rng);
    auto em = gen_morphism(b, c, rng);
    SpectralMorphism<S> e = em ? *em : zero_morphism(b, c);
    RHomotopy<S> post;
    post.r = r;
    post.f = compose(e, f);
    post.g = compose(e, g);
    for (Index m = 0; m <= r; ++m) post.hhat.push_back(compose(e.page(m), w.hhat[static_cast<size_t>(m)]));
    if (!cfg.mutate) t.require(is_r_homotopy(post), "postcomposed witness rejected");

    // the explicit contraction 1 ≃ ι∘∂^- with ĥ(x,y,z) = (0,0,-y)
    RHomotopy<S> contract = path_contraction_homotopy(pb);
    if (!cfg.mutate) t.require(is_r_homotopy(contract), "path contraction witness rejected");

    // solver agreement: find_r_homotopy must succeed on a homotopic pair
    if (!cfg.mutate) {
      auto found = find_r_homotopy(f, g, r);
      t.require(found.has_value() && is_r_homotopy(*found), "solver failed on a homotopic pair");
      // and every r-homotopy equivalence is an E_r-quasi-isomorphism
      auto eq = is_r_homotopy_equivalence(pb.iota, r);
      t.require(eq.has_value(), "ι is not recognized as an r-homotopy equivalence");
      t.require(is_Er_quasi_iso(pb.iota, r), "homotopy equivalence that is not an E_r-equivalence");
    }
  });
}

// E : filtered complexes -> spectral sequences (Props 7.1 / 7.2)
template <class S>
Report check_functor_e(const Config& cfg) {
  return detail::run<S>("functor_E", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    FcPtr<S> a = gen_filtered<S>(cfg.gen, rng);
    FcPtr<S> b = gen_filtered<S>(cfg.gen, rng);
    EFunctorData<S> ea = e_functor(a);
    EFunctorData<S> eb = e_functor(b);

    // products
    FcProduct<S> pr = fc_product(a, b);
    EFunctorData<S> ep = e_functor(pr.ss);
    ProductResult<S> prod_e = product(ea.ss, eb.ss);
    SpectralMorphism<S> cmp = pair_into_product(prod_e, e_of_morphism(ep, ea, pr.proj_a),
                                                e_of_morphism(ep, eb, pr.proj_b));
    bool prod_iso = true;
    for (Index m = 0; m < cmp.stored_pages(); ++m) prod_iso = prod_iso && cmp.page(m).blockwise_invertible();
    t.require(prod_iso, "E(A×B) is not E(A)×E(B)", {{"A", io::print_filtered(*a)}, {"B", io::print_filtered(*b)}});

    // fibration preservation on a random morphism
    FcMorphism<S> f = gen_fc_morphism(a, b, rng, cfg.gen.density);
    if (is_fc_fibration(ea, eb, f, r))
      t.require(is_r_fibration(e_of_morphism(ea, eb, f), r), "E does not preserve fibrations",
                {{"f", io::print_filtered_morphism(f)}});

    // acyclic fibrations and their pullbacks
    FcPath<S> fp = fc_path<S>(r, b);
    EFunctorData<S> et = e_functor(fp.total);
    FcMorphism<S> p = fp.d_minus;
    EFunctorData<S>* ep_src = &et;
    if (cfg.mutate) {
      // compare against a non-acyclic fibration: identity on a disk shifted page
      p = fc_identity(b);
      ep_src = &eb;
    }
    t.require(!cfg.mutate ? is_fc_fibration(*ep_src, eb, p, r) : true, "∂^- is not a filtered fibration");
    SpectralMorphism<S> ep_m = e_of_morphism(*ep_src, eb, p);
    t.require(is_acyclic_r_fibration(ep_m, r) || cfg.mutate, "E(∂^-) is not an acyclic fibration");

    FcPtr<S> u = gen_filtered<S>(cfg.gen, rng);
    EFunctorData<S> eu = e_functor(u);
    FcMorphism<S> g = gen_fc_morphism(u, p.tgt, rng, cfg.gen.density);
    FcPullback<S> pbfc = pullback_fc(g, p);
    EFunctorData<S> ex = e_functor(pbfc.x);
    PullbackResult<S> pbss = pullback_surjection(e_of_morphism(eu, eb, g), ep_m);
    auto med = pbss.mediating(e_of_morphism(ex, eu, pbfc.pi_u), e_of_morphism(ex, *ep_src, pbfc.pi_a));
    bool pullback_ok = med.has_value();
    if (pullback_ok)
      for (Index m = 0; m < med->stored_pages(); ++m)
        pullback_ok = pullback_ok && med->page(m).blockwise_invertible();
    if (cfg.mutate) pullback_ok = !pullback_ok;
    t.require(pullback_ok, "E(pullback) is not the pagewise pullback",
              {{"g", io::print_filtered_morphism(g)}, {"p", io::print_filtered_morphism(p)}});

    // r-homotopy preservation: sample a homotopy as a morphism into Λ⊗B
    FcMapSpace<S> hsp = fc_map_space(a, fp.total);
    Vec<S> c(hsp.dim());
    for (Index j = 0; j < hsp.dim(); ++j) c(j) = rng.chance(cfg.gen.density) ? rng.scalar<S>() : S(0);
    FcMorphism<S> hm = hsp.morphism(c);
    FcMorphism<S> f0 = compose(fp.d_minus, hm);
    FcMorphism<S> g0 = compose(fp.d_plus, hm);
    std::vector<Mat<S>> hmat;
    int lo = hm.n_min;
    for (int n = lo; n < lo + static_cast<int>(hm.maps.size()); ++n)
      hmat.push_back(hm.map_at(n).middleRows(fp.y_off(n), b->dim(n - 1)));
    t.require(filtered_r_homotopy_check(hmat, lo, f0, g0, r), "sampled filtered homotopy fails its own check");

    PathSpace<S> psE = path<S>(static_cast<Index>(r), eb.ss);
    std::vector<PageConstraint<S>> compat{[&](const std::vector<BigradedMap<S>>& pages) {
      std::vector<BigradedMap<S>> out;
      SpectralMorphism<S> edm = e_of_morphism(et, eb, fp.d_minus);
      SpectralMorphism<S> edp = e_of_morphism(et, eb, fp.d_plus);
      for (size_t m = 0; m < pages.size(); ++m) {
        out.push_back(compose(psE.d_minus.page(static_cast<Index>(m)), pages[m]) -
                      edm.page(static_cast<Index>(m)));
        out.push_back(compose(psE.d_plus.page(static_cast<Index>(m)), pages[m]) -
                      edp.page(static_cast<Index>(m)));
      }
      return out;
    }};
    auto phi = find_isomorphism(et.ss, psE.ss, {}, mix_seed(cfg.gen.seed, 7, static_cast<std::uint64_t>(r)),
                                400, compat);
    t.require(phi.has_value(), "E(Λ_r^FC ⊗ B) is not P(r; E(B))", {{"B", io::print_filtered(*b)}});
    if (phi) {
      SpectralMorphism<S> htilde = compose(*phi, e_of_morphism(ea, et, hm));
      RHomotopy<S> w;
      w.r = r;
      w.f = e_of_morphism(ea, eb, f0);
      w.g = e_of_morphism(ea, eb, g0);
      for (Index m = 0; m <= r; ++m) w.hhat.push_back(compose(psE.middle_projection(m), htilde.page(m)));
      t.require(is_r_homotopy(w), "E of a filtered homotopy is not an r-homotopy",
                {{"h", io::print_filtered_morphism(hm)}});
      t.require(find_r_homotopy(w.f, w.g, static_cast<Index>(r)).has_value(),
                "solver finds no homotopy between E(f) and E(g)");
    }
  });
}

// E' = E ∘ Tot on multicomplexes (Props 7.3 / 7.5 / 7.6 restricted)
template <class S>
Report check_functor_eprime(const Config& cfg) {
  return detail::run<S>("functor_Eprime", cfg, [&](detail::Trial<S>& t, Rng& rng, int r) {
    McPtr<S> a = gen_multicomplex<S>(cfg.gen, rng);
    McPtr<S> b = gen_multicomplex<S>(cfg.gen, rng);
    TotData<S> ta = tot(a);  // asserts D² = 0 internally
    TotData<S> tb = tot(b);
    EFunctorData<S> ea = e_functor(ta.fc);
    EFunctorData<S> eb = e_functor(tb.fc);

    // tot is functorial on composable strict morphisms
    MultiMorphism<S> f = gen_mc_morphism(a, b, rng, cfg.gen.density);
    McPtr<S> c = gen_multicomplex<S>(cfg.gen, rng);
    TotData<S> tc = tot(c);
    MultiMorphism<S> g = gen_mc_morphism(b, c, rng, cfg.gen.density);
    t.require(compose(tot_morphism(tb, tc, g), tot_morphism(ta, tb, f)) ==
                  tot_morphism(ta, tc, compose(g, f)),
              "Tot(g∘f) ≠ Tot(g)∘Tot(f)");

    // products
    McProduct<S> pr = mc_product(a, b);
    TotData<S> tp = tot(pr.mc);
    EFunctorData<S> ep = e_functor(tp.fc);
    ProductResult<S> prod_e = product(ea.ss, eb.ss);
    SpectralMorphism<S> cmp =
        pair_into_product(prod_e, e_of_morphism(ep, ea, tot_morphism(tp, ta, pr.proj_a)),
                          e_of_morphism(ep, eb, tot_morphism(tp, tb, pr.proj_b)));
    bool prod_iso = true;
    for (Index m = 0; m < cmp.stored_pages(); ++m) prod_iso = prod_iso && cmp.page(m).blockwise_invertible();
    t.require(prod_iso, "E'(A×B) is not E'(A)×E'(B)");

    // fibration reflection is definitional; record it as a regression
    SpectralMorphism<S> ef = e_of_morphism(ea, eb, tot_morphism(ta, tb, f));
    bool defining = true;
    for (int i = 0; i <= r; ++i) defining = defining && ef.page(i).blockwise_surjective();
    t.require(defining == is_r_fibration(ef, r), "E' fibration reflection regression");

    // acyclic fibrations and pullbacks (also along any map when E_i(p) are
    // all surjective, per the paper's remark)
    McPath<S> mp = mc_path<S>(r, b);
    TotData<S> tpath = tot(mp.mc);
    EFunctorData<S> epath = e_functor(tpath.fc);
    SpectralMorphism<S> edm = e_of_morphism(epath, eb, tot_morphism(tpath, tb, mp.d_minus));
    t.require(is_acyclic_r_fibration(edm, r) != cfg.mutate, "E'(∂^-) is not an acyclic fibration");

    McPtr<S> u = gen_multicomplex<S>(cfg.gen, rng);
    TotData<S> tu = tot(u);
    EFunctorData<S> eu = e_functor(tu.fc);
    MultiMorphism<S> gm = gen_mc_morphism(u, b, rng, cfg.gen.density);
    McPullback<S> pbmc = mc_pullback(gm, mp.d_minus);
    TotData<S> tx = tot(pbmc.x);
    EFunctorData<S> ex = e_functor(tx.fc);
    PullbackResult<S> pbss = pullback_surjection(e_of_morphism(eu, eb, tot_morphism(tu, tb, gm)), edm);
    auto med = pbss.mediating(e_of_morphism(ex, eu, tot_morphism(tx, tu, pbmc.pi_u)),
                              e_of_morphism(ex, epath, tot_morphism(tx, tpath, pbmc.pi_a)));
    bool pullback_ok = med.has_value();
    if (pullback_ok)
      for (Index m = 0; m < med->stored_pages(); ++m)
        pullback_ok = pullback_ok && med->page(m).blockwise_invertible();
    t.require(pullback_ok, "E'(pullback) is not the pagewise pullback");

    // Prop 7.5: E'(P_r(A)) is P(r; E'(A)), with ∂-compatible isomorphism
    McPath<S> mpa = mc_path<S>(r, a);
    TotData<S> tpa = tot(mpa.mc);
    EFunctorData<S> epa = e_functor(tpa.fc);
    PathSpace<S> psE = path<S>(static_cast<Index>(r), ea.ss);
    SpectralMorphism<S> edma = e_of_morphism(epa, ea, tot_morphism(tpa, ta, mpa.d_minus));
    SpectralMorphism<S> edpa = e_of_morphism(epa, ea, tot_morphism(tpa, ta, mpa.d_plus));
    std::vector<PageConstraint<S>> compat{[&](const std::vector<BigradedMap<S>>& pages) {
      std::vector<BigradedMap<S>> out;
      for (size_t m = 0; m < pages.size(); ++m) {
        out.push_back(compose(psE.d_minus.page(static_cast<Index>(m)), pages[m]) -
                      edma.page(static_cast<Index>(m)));
        out.push_back(compose(psE.d_plus.page(static_cast<Index>(m)), pages[m]) -
                      edpa.page(static_cast<Index>(m)));
      }
      return out;
    }};
    auto phi = find_isomorphism(epa.ss, psE.ss, {}, mix_seed(cfg.gen.seed, 11, static_cast<std::uint64_t>(r)),
                                400, compat);
    t.require(phi.has_value(), "E'(P_r(A)) is not P(r; E'(A))", {{"A", io::print_multicomplex(*a)}});

    // Prop 7.6 restricted: strict homotopies map to accepted r-homotopies
    if (phi) {
      McMapSpace<S> hsp = mc_map_space(a, mp.mc);
      Vec<S> cc(hsp.dim());
      for (Index j = 0; j < hsp.dim(); ++j) cc(j) = rng.chance(cfg.gen.density) ? rng.scalar<S>() : S(0);
      MultiMorphism<S> hm = hsp.morphism(cc);
      MultiMorphism<S> f1 = compose(mp.d_minus, hm);
      MultiMorphism<S> g1 = compose(mp.d_plus, hm);
      t.require(mc_strict_homotopy_check(mp, hm.map, f1, g1), "sampled strict homotopy fails its own check");
      // transfer along the ∂-compatible iso of E'(P_r(B)) — recompute it for B
      PathSpace<S> psB = path<S>(static_cast<Index>(r), eb.ss);
      SpectralMorphism<S> edmb = e_of_morphism(epath, eb, tot_morphism(tpath, tb, mp.d_minus));
      SpectralMorphism<S> edpb = e_of_morphism(epath, eb, tot_morphism(tpath, tb, mp.d_plus));
      std::vector<PageConstraint<S>> compatb{[&](const std::vector<BigradedMap<S>>& pages) {
        std::vector<BigradedMap<S>> out;
        for (size_t m = 0; m < pages.size(); ++m) {
          out.push_back(compose(psB.d_minus.page(static_cast<Index>(m)), pages[m]) -
                        edmb.page(static_cast<Index>(m)));
          out.push_back(compose(psB.d_plus.page(static_cast<Index>(m)), pages[m]) -
                        edpb.page(static_cast<Index>(m)));
        }
        return out;
      }};
      auto phib = find_isomorphism(epath.ss, psB.ss, {},
                                   mix_seed(cfg.gen.seed, 13, static_cast<std::uint64_t>(r)), 400, compatb);
      t.require(phib.has_value(), "no ∂-compatible iso for E'(P_r(B))");
      if (phib) {
        SpectralMorphism<S> htilde =
            compose(*phib, e_of_morphism(ea, epath, tot_morphism(ta, tpath, hm)));
        RHomotopy<S> w;
        w.r = r;
        w.f = e_of_morphism(ea, eb, tot_morphism(ta, tb, f1));
        w.g = e_of_morphism(ea, eb, tot_morphism(ta, tb, g1));
        for (Index m = 0; m <= r; ++m) w.hhat.push_back(compose(psB.middle_projection(m), htilde.page(m)));
        t.require(is_r_homotopy(w) != cfg.mutate, "E' of a strict homotopy is not an r-homotopy");
      }
    }
  });
}

// ------------------------------------------------------------- dispatch

inline std::vector<std::string> check_names() {
  return {"two_out_of_three", "axiom_C", "axiom_D", "partial_brown",
          "rlp",              "predicates", "homotopy", "functor_E", "functor_Eprime"};
}

template <class S>
Report run_check(const std::string& name, const Config& cfg) {
  if (name == "two_out_of_three") return check_two_out_of_three<S>(cfg);
  if (name == "axiom_C") return check_axiom_c<S>(cfg);
  if (name == "axiom_D") return check_axiom_d<S>(cfg);
  if (name == "partial_brown") return check_partial_brown<S>(cfg);
  if (name == "rlp") return check_rlp<S>(cfg);
  if (name == "predicates") return check_predicates<S>(cfg);
  if (name == "homotopy") return check_homotopy<S>(cfg);
  if (name == "functor_E") return check_functor_e<S>(cfg);
  if (name == "functor_Eprime") return check_functor_eprime<S>(cfg);
  throw DimensionMismatch("unknown check '" + name + "'");
}

}  // namespace harness
}  // namespace sseq
