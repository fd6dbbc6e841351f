#pragma once

#include <sstream>
#include <string>
#include <variant>

#include "sseq/multicomplex.hpp"
#include "sseq/paths.hpp"

// Line-oriented document format shared by the CLI and the fixture library.
// Grammar in docs/FORMAT.md. One object per document:
//
//   sseq v1
//   field Fp:7 | Q
//   kind spectral | filtered | multicomplex | spectral-morphism |
//        filtered-morphism | multicomplex-morphism
//   <body>
//
// Matrices are row-major with explicit shape; bidegrees are "(p,q)" tokens;
// scalars print as residues mod p or as a/b rationals.

namespace sseq {
namespace io {

// ---------------------------------------------------------------- printing

template <class S>
std::string scalar_str(const S& x) {
  return x.str();
}

template <class S>
void print_matrix(std::ostringstream& os, const Mat<S>& m) {
  if (m.cols() == 0) return;  // parse side skips zero-width rows too
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << scalar_str(m(i, j));
    }
    os << '\n';
  }
}

template <class S>
void print_blocks(std::ostringstream& os, const std::string& head, const BigradedMap<S>& f) {
  std::vector<std::pair<Bidegree, Mat<S>>> blocks;
  for (auto& [pq, d] : f.source().support()) {
    Mat<S> b = f.block(pq);
    if (b.rows() == 0 || b.cols() == 0 || is_zero(b)) continue;
    blocks.emplace_back(pq, std::move(b));
  }
  os << head << ' ' << blocks.size() << '\n';
  for (auto& [pq, b] : blocks) {
    os << "block " << pq.str() << ' ' << b.rows() << ' ' << b.cols() << '\n';
    print_matrix(os, b);
  }
}

inline void print_module(std::ostringstream& os, const BigradedModule& m) {
  os << "module " << m.support().size() << '\n';
  for (auto& [pq, d] : m.support()) os << pq.str() << ' ' << d << '\n';
}

template <class S>
void print_spectral_body(std::ostringstream& os, const SpectralSequence<S>& ss) {
  os << "pages " << ss.top() + 1 << '\n';
  for (Index m = 0; m <= ss.top(); ++m) {
    os << "page " << m << '\n';
    print_module(os, ss.stored_page(m).module);
    print_blocks(os, "differential", ss.stored_page(m).differential);
  }
  os << "charmaps " << ss.charmap_count() << '\n';
  for (Index m = 0; m < ss.charmap_count(); ++m) print_blocks(os, "charmap " + std::to_string(m), ss.charmap(m));
}

template <class S>
void print_filtered_body(std::ostringstream& os, const FilteredComplex<S>& a) {
  os << "nmin " << a.n_min << '\n' << "degrees " << a.degrees() << '\n';
  for (int n = a.n_min; n <= a.n_max(); ++n) {
    os << "degree " << n << ' ' << a.dim(n);
    for (int l : a.levels_at(n)) os << ' ' << l;
    os << '\n';
  }
  for (int n = a.n_min; n <= a.n_max(); ++n) {
    Mat<S> d = a.dmat(n);
    os << "dmat " << n << ' ' << d.rows() << ' ' << d.cols() << '\n';
    print_matrix(os, d);
  }
}

template <class S>
void print_multicomplex_body(std::ostringstream& os, const Multicomplex<S>& a) {
  print_module(os, a.module);
  os << "operators " << a.order() + 1 << '\n';
  for (int i = 0; i <= a.order(); ++i) print_blocks(os, "operator " + std::to_string(i), a.op(i));
}

template <class S>
std::string header(const std::string& kind) {
  return "sseq v1\nfield " + field_name<S>() + "\nkind " + kind + "\n";
}

template <class S>
std::string print_spectral(const SpectralSequence<S>& ss) {
  std::ostringstream os;
  os << header<S>("spectral");
  print_spectral_body(os, ss);
  return os.str();
}

template <class S>
std::string print_filtered(const FilteredComplex<S>& a) {
  std::ostringstream os;
  os << header<S>("filtered");
  print_filtered_body(os, a);
  return os.str();
}

template <class S>
std::string print_multicomplex(const Multicomplex<S>& a) {
  std::ostringstream os;
  os << header<S>("multicomplex");
  print_multicomplex_body(os, a);
  return os.str();
}

template <class S>
std::string print_spectral_morphism(const SpectralMorphism<S>& f) {
  std::ostringstream os;
  os << header<S>("spectral-morphism") << "source\n";
  print_spectral_body(os, f.source());
  os << "endsource\ntarget\n";
  print_spectral_body(os, f.target());
  os << "endtarget\nmaps " << f.stored_pages() << '\n';
  for (Index m = 0; m < f.stored_pages(); ++m) print_blocks(os, "map " + std::to_string(m), f.page(m));
  return os.str();
}

template <class S>
std::string print_filtered_morphism(const FcMorphism<S>& f) {
  std::ostringstream os;
  os << header<S>("filtered-morphism") << "source\n";
  print_filtered_body(os, *f.src);
  os << "endsource\ntarget\n";
  print_filtered_body(os, *f.tgt);
  os << "endtarget\n";
  int lo = std::min(f.src->n_min, f.tgt->n_min);
  int hi = std::max(f.src->n_max(), f.tgt->n_max());
  os << "maps " << hi - lo + 1 << ' ' << lo << '\n';
  for (int n = lo; n <= hi; ++n) {
    Mat<S> m = f.map_at(n);
    os << "map " << n << ' ' << m.rows() << ' ' << m.cols() << '\n';
    print_matrix(os, m);
  }
  return os.str();
}

template <class S>
std::string print_multicomplex_morphism(const MultiMorphism<S>& f) {
  std::ostringstream os;
  os << header<S>("multicomplex-morphism") << "source\n";
  print_multicomplex_body(os, *f.src);
  os << "endsource\ntarget\n";
  print_multicomplex_body(os, *f.tgt);
  os << "endtarget\n";
  print_blocks(os, "map", f.map);
  return os.str();
}

// ---------------------------------------------------------------- parsing

class Lines {
 public:
  explicit Lines(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
      ++no;
      std::istringstream ls(line);
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (toks.empty() || toks[0][0] == '#') continue;
      lines_.emplace_back(no, std::move(toks));
    }
  }

  bool done() const { return at_ >= lines_.size(); }
  int line_no() const { return done() ? last_no() : lines_[at_].first; }
  int last_no() const { return lines_.empty() ? 0 : lines_.back().first; }

  const std::vector<std::string>& peek() const {
    if (done()) throw ParseError(last_no(), "unexpected end of document");
    return lines_[at_].second;
  }
  std::vector<std::string> take() {
    auto t = peek();
    ++at_;
    return t;
  }
  std::vector<std::string> expect(const std::string& tag, size_t min_tokens) {
    auto t = take();
    if (t[0] != tag) throw ParseError(line_no(), "expected '" + tag + "', got '" + t[0] + "'");
    if (t.size() < min_tokens)
      throw ParseError(line_no(), "'" + tag + "' needs " + std::to_string(min_tokens - 1) + " arguments");
    return t;
  }

 private:
  std::vector<std::pair<int, std::vector<std::string>>> lines_;
  size_t at_ = 0;
};

inline long to_int(const Lines& ls, const std::string& tok) {
  try {
    size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(ls.line_no(), "expected an integer, got '" + tok + "'");
  }
}

inline Bidegree to_bidegree(const Lines& ls, const std::string& tok) {
  if (tok.size() < 5 || tok.front() != '(' || tok.back() != ')')
    throw ParseError(ls.line_no(), "expected a bidegree '(p,q)', got '" + tok + "'");
  auto comma = tok.find(',');
  if (comma == std::string::npos) throw ParseError(ls.line_no(), "bidegree missing comma: " + tok);
  return {static_cast<int>(to_int(ls, tok.substr(1, comma - 1))),
          static_cast<int>(to_int(ls, tok.substr(comma + 1, tok.size() - comma - 2)))};
}

template <class S>
S to_scalar(const Lines& ls, const std::string& tok) {
  try {
    return parse_scalar<S>(tok);
  } catch (const std::exception&) {
    throw ParseError(ls.line_no(), "bad field element '" + tok + "'");
  }
}

template <class S>
Mat<S> parse_matrix(Lines& ls, Index rows, Index cols) {
  Mat<S> m(rows, cols);
  if (cols == 0) return m;  // zero-width rows print as nothing
  for (Index i = 0; i < rows; ++i) {
    auto t = ls.take();
    if (static_cast<Index>(t.size()) != cols)
      throw ParseError(ls.line_no(), "matrix row with " + std::to_string(t.size()) + " entries, expected " +
                                         std::to_string(cols));
    for (Index j = 0; j < cols; ++j) m(i, j) = to_scalar<S>(ls, t[static_cast<size_t>(j)]);
  }
  return m;
}

inline BigradedModule parse_module(Lines& ls) {
  auto t = ls.expect("module", 2);
  long k = to_int(ls, t[1]);
  BigradedModule m;
  for (long i = 0; i < k; ++i) {
    auto e = ls.take();
    if (e.size() < 2) throw ParseError(ls.line_no(), "module entry needs '(p,q) dim'");
    m.set_dim(to_bidegree(ls, e[0]), to_int(ls, e[1]));
  }
  return m;
}

template <class S>
BigradedMap<S> parse_blocks(Lines& ls, const std::string& tag, size_t count_at, BigradedModule src,
                            BigradedModule tgt, Bidegree shift) {
  auto t = ls.expect(tag, count_at + 1);
  long k = to_int(ls, t[count_at]);
  BigradedMap<S> f(std::move(src), std::move(tgt), shift);
  for (long i = 0; i < k; ++i) {
    auto b = ls.expect("block", 4);
    Bidegree pq = to_bidegree(ls, b[1]);
    Index rows = to_int(ls, b[2]), cols = to_int(ls, b[3]);
    f.set_block_unchecked(pq, parse_matrix<S>(ls, rows, cols));
  }
  return f;
}

template <class S>
SpectralSequence<S> parse_spectral_body(Lines& ls) {
  auto t = ls.expect("pages", 2);
  long count = to_int(ls, t[1]);
  if (count < 1) throw ParseError(ls.line_no(), "a spectral sequence needs at least one page");
  std::vector<RComplex<S>> pages;
  for (long m = 0; m < count; ++m) {
    auto pg = ls.expect("page", 2);
    if (to_int(ls, pg[1]) != m) throw ParseError(ls.line_no(), "pages must appear in order 0,1,...");
    RComplex<S> page;
    page.module = parse_module(ls);
    page.r = static_cast<int>(m);
    Bidegree shift{-static_cast<int>(m), 1 - static_cast<int>(m)};
    page.differential = parse_blocks<S>(ls, "differential", 1, page.module, page.module, shift);
    pages.push_back(std::move(page));
  }
  auto cm = ls.expect("charmaps", 2);
  long ccount = to_int(ls, cm[1]);
  // source modules of the ψ are the homology of the parsed pages; compute on
  // the fly so stored blocks can be validated against them
  std::vector<BigradedMap<S>> psis;
  for (long m = 0; m < ccount; ++m) {
    BigradedModule h;
    if (static_cast<size_t>(m) < pages.size() && validate_rcomplex(pages[static_cast<size_t>(m)]).ok)
      h = homology(pages[static_cast<size_t>(m)]).H;
    BigradedModule next;
    if (static_cast<size_t>(m + 1) < pages.size()) next = pages[static_cast<size_t>(m + 1)].module;
    psis.push_back(parse_blocks<S>(ls, "charmap", 2, std::move(h), std::move(next), {0, 0}));
  }
  return SpectralSequence<S>::make(std::move(pages), std::move(psis));
}

template <class S>
FilteredComplex<S> parse_filtered_body(Lines& ls) {
  FilteredComplex<S> a;
  a.n_min = static_cast<int>(to_int(ls, ls.expect("nmin", 2)[1]));
  long degs = to_int(ls, ls.expect("degrees", 2)[1]);
  for (long i = 0; i < degs; ++i) {
    auto t = ls.expect("degree", 3);
    if (to_int(ls, t[1]) != a.n_min + i) throw ParseError(ls.line_no(), "degrees must appear in order");
    long dim = to_int(ls, t[2]);
    if (static_cast<long>(t.size()) != 3 + dim)
      throw ParseError(ls.line_no(), "degree line needs one level per basis vector");
    std::vector<int> lv;
    for (long j = 0; j < dim; ++j) lv.push_back(static_cast<int>(to_int(ls, t[static_cast<size_t>(3 + j)])));
    a.levels.push_back(std::move(lv));
  }
  for (long i = 0; i < degs; ++i) {
    auto t = ls.expect("dmat", 4);
    if (to_int(ls, t[1]) != a.n_min + i) throw ParseError(ls.line_no(), "dmats must appear in order");
    a.d.push_back(parse_matrix<S>(ls, to_int(ls, t[2]), to_int(ls, t[3])));
  }
  return a;
}

template <class S>
Multicomplex<S> parse_multicomplex_body(Lines& ls) {
  Multicomplex<S> a;
  a.module = parse_module(ls);
  long ops = to_int(ls, ls.expect("operators", 2)[1]);
  for (long i = 0; i < ops; ++i)
    a.ops.push_back(parse_blocks<S>(ls, "operator", 2, a.module, a.module,
                                    {-static_cast<int>(i), 1 - static_cast<int>(i)}));
  return a;
}

// ---------------------------------------------------------------- documents

template <class S>
struct Document {
  std::string kind;
  SSPtr<S> spectral;
  FcPtr<S> filtered;
  McPtr<S> multicomplex;
  std::optional<SpectralMorphism<S>> spectral_morphism;
  std::optional<FcMorphism<S>> filtered_morphism;
  std::optional<MultiMorphism<S>> multicomplex_morphism;
};

struct Header {
  std::string field;
  std::string kind;
};

inline Header peek_header(const std::string& text) {
  Lines ls(text);
  auto v = ls.expect("sseq", 2);
  if (v[1] != "v1") throw ParseError(ls.line_no(), "unsupported format version " + v[1]);
  auto f = ls.expect("field", 2);
  auto k = ls.expect("kind", 2);
  return {f[1], k[1]};
}

template <class S>
void check_valid(const ValidationReport& vr) {
  if (!vr.ok) throw InvariantError(vr.message);
}

template <class S>
Document<S> parse_document(const std::string& text) {
  Lines ls(text);
  auto v = ls.expect("sseq", 2);
  if (v[1] != "v1") throw ParseError(ls.line_no(), "unsupported format version " + v[1]);
  auto f = ls.expect("field", 2);
  if (f[1] != field_name<S>())
    throw ParseError(ls.line_no(), "document field " + f[1] + " does not match active field " + field_name<S>());
  Document<S> doc;
  doc.kind = ls.expect("kind", 2)[1];

  if (doc.kind == "spectral") {
    auto ss = share(parse_spectral_body<S>(ls));
    check_valid<S>(ss->validate());
    doc.spectral = ss;
  } else if (doc.kind == "filtered") {
    auto fc = share_fc(parse_filtered_body<S>(ls));
    check_valid<S>(validate_filtered(*fc));
    doc.filtered = fc;
  } else if (doc.kind == "multicomplex") {
    auto mc = share_mc(parse_multicomplex_body<S>(ls));
    check_valid<S>(validate_multicomplex(*mc));
    doc.multicomplex = mc;
  } else if (doc.kind == "spectral-morphism") {
    ls.expect("source", 1);
    auto src = share(parse_spectral_body<S>(ls));
    ls.expect("endsource", 1);
    ls.expect("target", 1);
    auto tgt = share(parse_spectral_body<S>(ls));
    ls.expect("endtarget", 1);
    check_valid<S>(src->validate());
    check_valid<S>(tgt->validate());
    long count = to_int(ls, ls.expect("maps", 2)[1]);
    std::vector<BigradedMap<S>> maps;
    for (long m = 0; m < count; ++m)
      maps.push_back(parse_blocks<S>(ls, "map", 2, src->module_at(m), tgt->module_at(m), {0, 0}));
    auto mor = SpectralMorphism<S>::unchecked(src, tgt, std::move(maps));
    check_valid<S>(mor.validate());
    doc.spectral_morphism = std::move(mor);
  } else if (doc.kind == "filtered-morphism") {
    ls.expect("source", 1);
    auto src = share_fc(parse_filtered_body<S>(ls));
    ls.expect("endsource", 1);
    ls.expect("target", 1);
    auto tgt = share_fc(parse_filtered_body<S>(ls));
    ls.expect("endtarget", 1);
    check_valid<S>(validate_filtered(*src));
    check_valid<S>(validate_filtered(*tgt));
    auto t = ls.expect("maps", 3);
    long count = to_int(ls, t[1]);
    int lo = static_cast<int>(to_int(ls, t[2]));
    std::vector<Mat<S>> maps;
    for (long i = 0; i < count; ++i) {
      auto mh = ls.expect("map", 4);
      if (to_int(ls, mh[1]) != lo + i) throw ParseError(ls.line_no(), "maps must appear in order");
      maps.push_back(parse_matrix<S>(ls, to_int(ls, mh[2]), to_int(ls, mh[3])));
    }
    auto mor = FcMorphism<S>::unchecked(src, tgt, lo, std::move(maps));
    check_valid<S>(mor.validate());
    doc.filtered_morphism = std::move(mor);
  } else if (doc.kind == "multicomplex-morphism") {
    ls.expect("source", 1);
    auto src = share_mc(parse_multicomplex_body<S>(ls));
    ls.expect("endsource", 1);
    ls.expect("target", 1);
    auto tgt = share_mc(parse_multicomplex_body<S>(ls));
    ls.expect("endtarget", 1);
    check_valid<S>(validate_multicomplex(*src));
    check_valid<S>(validate_multicomplex(*tgt));
    BigradedMap<S> map = parse_blocks<S>(ls, "map", 1, src->module, tgt->module, {0, 0});
    MultiMorphism<S> mor{src, tgt, std::move(map)};
    check_valid<S>(mor.validate());
    doc.multicomplex_morphism = std::move(mor);
  } else {
    throw ParseError(ls.line_no(), "unknown kind '" + doc.kind + "'");
  }
  if (!ls.done()) throw ParseError(ls.line_no(), "trailing content after document body");
  return doc;
}

}  // namespace io
}  // namespace sseq
