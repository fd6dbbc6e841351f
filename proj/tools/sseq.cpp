// sseq — spectral sequence engine CLI.
//
// Subcommands: fixture, validate, pages, predicates, rlp, factor, homotopy,
// tot, ss, fuzz. Exit codes: 0 success, 1 usage error, 2 parse/invariant
// failure, 3 counterexample found.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "sseq/fixtures.hpp"
#include "sseq/harness.hpp"
#include "sseq/io.hpp"
#include "sseq/representables.hpp"

using namespace sseq;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string default_field(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SSEQ_FIELD")) return env;
  return "Fp:7";
}

// activate the field named by spec ("Fp:<p>" or "Q") and call fn with a tag
template <class F>
int with_field(const std::string& spec, F&& fn) {
  if (spec == "Q") return fn(Rational(0));
  if (spec.rfind("Fp:", 0) == 0) {
    Fp::set_modulus(static_cast<std::uint32_t>(std::stoul(spec.substr(3))));
    return fn(Fp(0));
  }
  std::cerr << "unknown field '" << spec << "' (use Fp:<prime> or Q)\n";
  return 1;
}

// file-based commands take the field from the document header; an explicit
// --field must agree
template <class F>
int with_document_field(const std::string& text, const std::string& flag, F&& fn) {
  io::Header h = io::peek_header(text);
  if (!flag.empty() && flag != h.field)
    throw ParseError(0, "--field " + flag + " does not match document field " + h.field);
  return with_field(h.field, std::forward<F>(fn));
}

struct FixtureName {
  std::string base;
  std::vector<int> args;
};

FixtureName parse_fixture_name(const std::string& name) {
  auto open = name.find('(');
  if (open == std::string::npos) return {name, {}};
  if (name.back() != ')') throw ParseError(0, "bad fixture name " + name);
  FixtureName fx{name.substr(0, open), {}};
  std::string inner = name.substr(open + 1, name.size() - open - 2);
  std::istringstream is(inner);
  std::string tok;
  while (std::getline(is, tok, ',')) fx.args.push_back(std::stoi(tok));
  return fx;
}

template <class S>
std::string fixture_document(const FixtureName& fx) {
  auto want = [&](size_t n) {
    if (fx.args.size() != n)
      throw ParseError(0, "fixture " + fx.base + " needs " + std::to_string(n) + " arguments");
  };
  if (fx.base == "R") {
    want(2);
    return io::print_spectral(*ring_at<S>(fx.args[0], fx.args[1]));
  }
  if (fx.base == "S") return io::print_spectral(*fixture_s<S>());
  if (fx.base == "T") return io::print_spectral(*fixture_t<S>());
  if (fx.base == "f_S") return io::print_spectral_morphism(fixture_f_into_s<S>());
  if (fx.base == "pi_T") return io::print_spectral_morphism(fixture_pi_from_t<S>());
  if (fx.base == "coker_f_S") return io::print_spectral(pagewise_cokernel(fixture_f_into_s<S>()));
  if (fx.base == "lambda") {
    want(1);
    return io::print_spectral(*lambda<S>(fx.args[0]));
  }
  if (fx.base == "disk") {
    want(3);
    return io::print_spectral(*disk<S>(fx.args[0], fx.args[1], fx.args[2]));
  }
  if (fx.base == "sphere") {
    want(3);
    return io::print_spectral(*sphere<S>(fx.args[0], fx.args[1], fx.args[2]));
  }
  if (fx.base == "varphi") {
    want(3);
    return io::print_spectral_morphism(varphi<S>(fx.args[0], fx.args[1], fx.args[2]));
  }
  if (fx.base == "lambda_fc") {
    want(1);
    return io::print_filtered(*lambda_fc<S>(fx.args[0]));
  }
  if (fx.base == "lambda_mc") {
    want(1);
    return io::print_multicomplex(*lambda_mc<S>(fx.args[0]));
  }
  throw ParseError(0, "unknown fixture " + fx.base +
                          " (try R(p,n), S, T, f_S, pi_T, coker_f_S, lambda(r), disk(r,p,n), "
                          "sphere(r,p,n), varphi(r,p,n), lambda_fc(r), lambda_mc(r))");
}

template <class S>
SSPtr<S> as_spectral(const io::Document<S>& doc) {
  if (doc.spectral) return doc.spectral;
  if (doc.filtered) return spectral_sequence(doc.filtered);
  if (doc.multicomplex) return eprime(doc.multicomplex);
  throw ParseError(0, "expected a spectral, filtered or multicomplex document");
}

template <class S>
void print_pages(std::ostream& os, const SpectralSequence<S>& ss, long page) {
  auto show = [&](Index m) {
    os << "page " << m << '\n';
    RComplex<S> c = ss.page(m);
    if (c.module.trivial()) os << "(zero)\n";
    for (auto& [pq, d] : c.module.support()) os << pq.str() << ' ' << d << '\n';
  };
  if (page >= 0) {
    show(page);
  } else {
    for (Index m = 0; m <= ss.top(); ++m) show(m);
  }
  os << "stabilizes at page " << ss.top() << '\n';
}

int guarded(int argc, char** argv);

}  // namespace

int main(int argc, char** argv) {
  try {
    return guarded(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 2;
  } catch (const NotASurjection& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return 2;
  } catch (const NotAMorphism& e) {
    std::cerr << "not a morphism: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

namespace {

int guarded(int argc, char** argv) {
  CLI::App app{"spectral sequence engine"};
  app.require_subcommand(1);
  std::string field_flag;
  app.add_option("--field", field_flag, "coefficient field: Fp:<prime> or Q");

  // fixture
  auto* fixture_cmd = app.add_subcommand("fixture", "print a named fixture document");
  std::string fixture_name;
  fixture_cmd->add_option("name", fixture_name, "e.g. \"lambda(1)\", \"S\", \"pi_T\"")->required();

  // validate / pages / tot / ss
  auto* validate_cmd = app.add_subcommand("validate", "parse a document and run its validator");
  std::string validate_file;
  validate_cmd->add_option("file", validate_file)->required();

  auto* pages_cmd = app.add_subcommand("pages", "print page dimension tables");
  std::string pages_file;
  long pages_page = -1;
  pages_cmd->add_option("file", pages_file)->required();
  pages_cmd->add_option("--page", pages_page, "show a single page");

  auto* tot_cmd = app.add_subcommand("tot", "totalize a multicomplex to a filtered complex");
  std::string tot_file;
  tot_cmd->add_option("file", tot_file)->required();

  auto* ss_cmd = app.add_subcommand("ss", "associated spectral sequence of a filtered complex or multicomplex");
  std::string ss_file;
  ss_cmd->add_option("file", ss_file)->required();

  // predicates / rlp / factor / homotopy
  auto* pred_cmd = app.add_subcommand("predicates", "surjection / E_r-quasi-iso / fibration verdicts");
  std::string pred_file;
  long pred_r = 0;
  pred_cmd->add_option("file", pred_file)->required();
  pred_cmd->add_option("--r", pred_r)->required();

  auto* rlp_cmd = app.add_subcommand("rlp", "direct vs lifting-property fibration verdicts");
  std::string rlp_file;
  long rlp_r = 0;
  rlp_cmd->add_option("file", rlp_file)->required();
  rlp_cmd->add_option("--r", rlp_r)->required();

  auto* factor_cmd = app.add_subcommand("factor", "mapping path space factorization u = p∘i");
  std::string factor_file, factor_outdir;
  long factor_r = 0;
  factor_cmd->add_option("file", factor_file)->required();
  factor_cmd->add_option("--r", factor_r)->required();
  factor_cmd->add_option("--out-dir", factor_outdir, "write pbar.txt, i.txt, p.txt here instead of stdout");

  auto* hom_cmd = app.add_subcommand("homotopy", "decide f ≃_r g and print a witness");
  std::string hom_f, hom_g;
  long hom_r = 0;
  hom_cmd->add_option("f", hom_f)->required();
  hom_cmd->add_option("g", hom_g)->required();
  hom_cmd->add_option("--r", hom_r)->required();

  // fuzz
  auto* fuzz_cmd = app.add_subcommand("fuzz", "randomized axiom / functor checks");
  std::string fuzz_check;
  std::uint64_t fuzz_seed = 42;
  int fuzz_trials = 100;
  std::vector<int> fuzz_rs;
  long fuzz_trial = -1;
  int fuzz_window = 4, fuzz_dim = 3;
  bool fuzz_mutate = false, fuzz_list = false;
  fuzz_cmd->add_option("--check", fuzz_check, "check name (see --list)");
  fuzz_cmd->add_flag("--list", fuzz_list, "list available checks");
  fuzz_cmd->add_option("--seed", fuzz_seed);
  fuzz_cmd->add_option("--trials", fuzz_trials);
  fuzz_cmd->add_option("--r", fuzz_rs, "page indices (repeatable; default 0 1 2)");
  fuzz_cmd->add_option("--trial", fuzz_trial, "replay a single trial index");
  fuzz_cmd->add_option("--window", fuzz_window, "support window for generated objects");
  fuzz_cmd->add_option("--dim", fuzz_dim, "max dimension per bidegree");
  fuzz_cmd->add_flag("--mutate", fuzz_mutate, "corrupt a predicate to demonstrate sensitivity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*fixture_cmd) {
    FixtureName fx = parse_fixture_name(fixture_name);
    return with_field(default_field(field_flag), [&](auto tag) {
      using S = decltype(tag);
      std::cout << fixture_document<S>(fx);
      return 0;
    });
  }

  if (*validate_cmd) {
    std::string text = read_file(validate_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      try {
        io::parse_document<S>(text);
      } catch (const InvariantError& e) {
        std::cout << "invalid: " << e.what() << '\n';
        return 2;
      }
      std::cout << "ok\n";
      return 0;
    });
  }

  if (*pages_cmd) {
    std::string text = read_file(pages_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      print_pages(std::cout, *as_spectral(doc), pages_page);
      return 0;
    });
  }

  if (*tot_cmd) {
    std::string text = read_file(tot_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      if (!doc.multicomplex) throw ParseError(0, "tot needs a multicomplex document");
      std::cout << io::print_filtered(*tot(doc.multicomplex).fc);
      return 0;
    });
  }

  if (*ss_cmd) {
    std::string text = read_file(ss_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      if (!doc.filtered && !doc.multicomplex)
        throw ParseError(0, "ss needs a filtered or multicomplex document");
      std::cout << io::print_spectral(*as_spectral(doc));
      return 0;
    });
  }

  if (*pred_cmd) {
    std::string text = read_file(pred_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      if (!doc.spectral_morphism) throw ParseError(0, "predicates needs a spectral-morphism document");
      const auto& f = *doc.spectral_morphism;
      std::cout << "surjection: " << (is_surjection(f) ? "true" : "false") << '\n';
      std::cout << "E_r-quasi-iso (r=" << pred_r << "): " << (is_Er_quasi_iso(f, pred_r) ? "true" : "false")
                << '\n';
      std::cout << "r-fibration (r=" << pred_r << "): " << (is_r_fibration(f, pred_r) ? "true" : "false")
                << '\n';
      std::cout << "acyclic r-fibration (r=" << pred_r << "): "
                << (is_acyclic_r_fibration(f, pred_r) ? "true" : "false") << '\n';
      return 0;
    });
  }

  if (*rlp_cmd) {
    std::string text = read_file(rlp_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      if (!doc.spectral_morphism) throw ParseError(0, "rlp needs a spectral-morphism document");
      const auto& f = *doc.spectral_morphism;
      bool dfib = is_r_fibration(f, rlp_r);
      bool lfib = rfib_via_rlp(f, static_cast<int>(rlp_r));
      bool dac = is_acyclic_r_fibration(f, rlp_r);
      bool lac = acyclic_rfib_via_rlp(f, static_cast<int>(rlp_r));
      std::cout << "r-fibration direct: " << (dfib ? "true" : "false") << '\n';
      std::cout << "r-fibration via J'_r lifting: " << (lfib ? "true" : "false") << '\n';
      std::cout << "acyclic direct: " << (dac ? "true" : "false") << '\n';
      std::cout << "acyclic via I'_r lifting: " << (lac ? "true" : "false") << '\n';
      bool agree = (dfib == lfib) && (dac == lac);
      std::cout << "agreement: " << (agree ? "yes" : "NO") << '\n';
      return agree ? 0 : 3;
    });
  }

  if (*factor_cmd) {
    std::string text = read_file(factor_file);
    return with_document_field(text, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc = io::parse_document<S>(text);
      if (!doc.spectral_morphism) throw ParseError(0, "factor needs a spectral-morphism document");
      MappingPath<S> mp = mapping_path_space<S>(factor_r, *doc.spectral_morphism);
      std::string pbar = io::print_spectral(*mp.ss);
      std::string idoc = io::print_spectral_morphism(mp.i);
      std::string pdoc = io::print_spectral_morphism(mp.p);
      if (!factor_outdir.empty()) {
        for (auto& [name, content] :
             {std::pair<std::string, std::string*>{"pbar.txt", &pbar}, {"i.txt", &idoc}, {"p.txt", &pdoc}}) {
          std::ofstream out(factor_outdir + "/" + name);
          if (!out) throw ParseError(0, "cannot write to " + factor_outdir);
          out << *content;
        }
        std::cout << "wrote pbar.txt, i.txt, p.txt to " << factor_outdir << '\n';
      } else {
        std::cout << pbar << idoc << pdoc;
      }
      return 0;
    });
  }

  if (*hom_cmd) {
    std::string text_f = read_file(hom_f);
    std::string text_g = read_file(hom_g);
    return with_document_field(text_f, field_flag, [&](auto tag) {
      using S = decltype(tag);
      auto doc_f = io::parse_document<S>(text_f);
      auto doc_g = io::parse_document<S>(text_g);
      if (!doc_f.spectral_morphism || !doc_g.spectral_morphism)
        throw ParseError(0, "homotopy needs two spectral-morphism documents");
      const auto& f = *doc_f.spectral_morphism;
      const auto& g = *doc_g.spectral_morphism;
      if (!parallel(f, g)) throw ParseError(0, "the morphisms are not parallel");
      auto w = find_r_homotopy(f, g, hom_r);
      if (!w) {
        std::cout << "homotopic: no\n";
        return 0;
      }
      std::cout << "homotopic: yes\n";
      std::ostringstream os;
      for (Index m = 0; m <= w->r; ++m)
        io::print_blocks(os, "hhat " + std::to_string(m), w->hhat[static_cast<size_t>(m)]);
      std::cout << os.str();
      return 0;
    });
  }

  if (*fuzz_cmd) {
    if (fuzz_list) {
      for (auto& n : harness::check_names()) std::cout << n << '\n';
      return 0;
    }
    if (fuzz_check.empty()) {
      std::cerr << "fuzz: --check is required (or --list)\n";
      return 1;
    }
    return with_field(default_field(field_flag), [&](auto tag) {
      using S = decltype(tag);
      harness::Config cfg;
      cfg.gen.seed = fuzz_seed;
      cfg.gen.trials = fuzz_trials;
      cfg.gen.window = fuzz_window;
      cfg.gen.max_dim = fuzz_dim;
      if (!fuzz_rs.empty()) cfg.rs = fuzz_rs;
      cfg.mutate = fuzz_mutate;
      cfg.only_trial = fuzz_trial;
      harness::Report rep = harness::run_check<S>(fuzz_check, cfg);
      std::cout << rep.render();
      return rep.ok() ? 0 : 3;
    });
  }

  return 1;
}

}  // namespace
