#include "pimsner/leavitt.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "pimsner/error.hpp"

namespace pimsner {

Quiver Quiver::make(std::vector<std::string> vertices,
                    const std::vector<std::tuple<std::string, std::string, std::string>>& edges) {
  Quiver q;
  for (auto& v : vertices) {
    if (q.vpos_.count(v)) throw SemanticError(v, "duplicate vertex");
    q.vpos_[v] = q.vertices_.size();
    q.vertices_.push_back(v);
  }
  q.out_.resize(q.vertices_.size());
  for (auto& [name, s, r] : edges) {
    if (q.epos_.count(name)) throw SemanticError(name, "duplicate edge");
    if (q.vpos_.count(name)) throw SemanticError(name, "edge name clashes with a vertex");
    auto si = q.vpos_.find(s), ri = q.vpos_.find(r);
    if (si == q.vpos_.end()) throw SemanticError(s, "undeclared vertex");
    if (ri == q.vpos_.end()) throw SemanticError(r, "undeclared vertex");
    q.epos_[name] = q.edges_.size();
    q.out_[si->second].push_back(q.edges_.size());
    q.edges_.push_back({name, si->second, ri->second});
  }
  for (std::size_t v = 0; v < q.vertices_.size(); ++v)
    if (!q.out_[v].empty()) q.regular_.push_back(v);
  return q;
}

Quiver Quiver::rose(std::size_t d) {
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (std::size_t i = 1; i <= d; ++i) edges.emplace_back("e" + std::to_string(i), "v", "v");
  return make({"v"}, edges);
}

std::size_t Quiver::vertex_index(const std::string& name) const {
  auto it = vpos_.find(name);
  if (it == vpos_.end()) throw SemanticError(name, "no such vertex");
  return it->second;
}

std::size_t Quiver::edge_index(const std::string& name) const {
  auto it = epos_.find(name);
  if (it == epos_.end()) throw SemanticError(name, "no such edge");
  return it->second;
}

std::string Quiver::to_dsl() const {
  std::ostringstream os;
  os << "vertices:";
  for (auto& v : vertices_) os << " " << v;
  os << "\nedges:\n";
  for (auto& e : edges_) os << "  " << e.name << ": " << vertices_[e.source] << " -> " << vertices_[e.range] << "\n";
  return os.str();
}

namespace {

bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct LineScanner {
  const std::string& s;
  int line;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }
  int column() const { return static_cast<int>(pos) + 1; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, column(), msg); }
  std::string name(const char* what) {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && name_char(s[pos])) ++pos;
    if (start == pos) {
      if (pos >= s.size()) fail(std::string("expected ") + what + ", found end of line");
      fail(std::string("expected ") + what + ", found '" + s[pos] + "'");
    }
    return s.substr(start, pos - start);
  }
  void expect(const std::string& tok) {
    skip_ws();
    if (s.compare(pos, tok.size(), tok) != 0) fail("expected '" + tok + "'");
    pos += tok.size();
  }
  bool keyword(const std::string& kw) {
    skip_ws();
    if (s.compare(pos, kw.size(), kw) != 0) return false;
    std::size_t after = pos + kw.size();
    pos = after;
    return true;
  }
};

}  // namespace

Quiver Quiver::parse(const std::string& text) {
  enum class State { Start, Vertices, Edges } state = State::Start;
  std::vector<std::string> vertices;
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::map<std::string, int> line_of;
  auto parse_edge = [&](LineScanner& sc) {
    std::string name = sc.name("edge name");
    sc.expect(":");
    std::string s = sc.name("source vertex");
    sc.expect("->");
    std::string r = sc.name("range vertex");
    if (!sc.at_end()) sc.fail("unexpected text after edge");
    line_of[name] = line_no;
    line_of.try_emplace(s, line_no);
    line_of.try_emplace(r, line_no);
    edges.emplace_back(name, s, r);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    auto hash = raw.find('#');
    std::string body = hash == std::string::npos ? raw : raw.substr(0, hash);
    LineScanner sc{body, line_no};
    if (sc.at_end()) continue;
    std::size_t save = sc.pos;
    if (sc.keyword("vertices:")) {
      if (state != State::Start) {
        sc.pos = save;
        sc.fail("duplicate or misplaced 'vertices:' section");
      }
      state = State::Vertices;
      while (!sc.at_end()) {
        vertices.push_back(sc.name("vertex name"));
        line_of[vertices.back()] = line_no;
      }
      continue;
    }
    sc.pos = save;
    if (sc.keyword("edges:")) {
      if (state != State::Vertices) {
        sc.pos = save;
        sc.fail(state == State::Start ? "'edges:' before 'vertices:'" : "duplicate 'edges:' section");
      }
      state = State::Edges;
      if (!sc.at_end()) parse_edge(sc);
      continue;
    }
    sc.pos = save;
    switch (state) {
      case State::Start: sc.fail("expected 'vertices:'");
      case State::Vertices:
        while (!sc.at_end()) {
          vertices.push_back(sc.name("vertex name"));
          line_of[vertices.back()] = line_no;
        }
        break;
      case State::Edges: parse_edge(sc); break;
    }
  }
  if (state == State::Start) throw ParseError(line_no + 1, 1, "missing 'vertices:' section");
  try {
    return make(vertices, edges);
  } catch (const SemanticError& e) {
    auto it = line_of.find(e.symbol());
    if (it == line_of.end()) throw;
    throw SemanticError(e.symbol(), e.detail(), it->second);
  }
}

// ---------------------------------------------------------------------------

AdjacencyData adjacency(const Quiver& q) {
  const std::size_t n = q.vertices().size();
  AdjacencyData d;
  d.full = IntMatrix(n, n);
  for (auto& e : q.edges()) d.full(e.source, e.range) += 1;
  d.regular = q.regular();
  d.reduced = IntMatrix(n, d.regular.size());
  d.theorem_map = IntMatrix(n, d.regular.size());
  for (std::size_t j = 0; j < d.regular.size(); ++j) {
    std::size_t v = d.regular[j];
    for (std::size_t y = 0; y < n; ++y) {
      d.reduced(y, j) = d.full(y, v);
      d.theorem_map(y, j) = (y == v ? 1 : 0) - d.full(v, y);
    }
  }
  return d;
}

CorrespondencePtr quiver_correspondence(const Quiver& q, const CoeffRing& k) {
  RingPtr R = make_direct_sum(k, q.vertices(), "k^(Q0)");
  std::vector<Generator> x, xp;
  std::vector<RingElement> unit;
  for (auto& v : q.vertices()) unit.push_back(RingElement::basis(R, v));
  for (auto& e : q.edges()) {
    x.push_back({e.name, unit[e.range]});
    xp.push_back({e.name + "*", unit[e.range]});
  }
  ModulePtr m = FunctionalModule::create(R, "X_Q", x, xp, [&](std::size_t bp, std::size_t b) {
    return bp == b ? unit[q.edges()[b].range] : RingElement(R);
  });
  std::vector<std::size_t> sources;
  for (auto& e : q.edges()) sources.push_back(e.source);
  auto left = [m, sources, R](const std::string& s, std::size_t b) {
    if (R->intern(s) != sources[b]) return XVector(m);
    return XVector::basis(m, b);
  };
  auto right = [m, sources, R](std::size_t bp, const std::string& s) {
    if (R->intern(s) != sources[bp]) return XpVector(m);
    return XpVector::basis(m, bp);
  };
  std::vector<std::string> names;
  for (auto& e : q.edges()) names.push_back(e.name);
  ModulePtr target = make_free_module(R, names);
  FunctionalHom h{m, target, {}, {}};
  for (auto& e : q.edges()) {
    std::string g = free_generator_name(e.name, q.vertices()[e.range]);
    h.U.push_back(XVector::basis(target, g));
    h.V.push_back(XpVector::basis(target, g));
  }
  std::vector<RingElement> ideal;
  for (auto v : q.regular()) ideal.push_back(unit[v]);
  return Correspondence::create(m, left, right, h, ideal, "X_Q");
}

// ---------------------------------------------------------------------------

std::shared_ptr<const LeavittAlgebra> LeavittAlgebra::make(const Quiver& q, const CoeffRing& k) {
  std::shared_ptr<LeavittAlgebra> a(new LeavittAlgebra(q));
  for (auto v : q.regular()) a->special_[v] = q.out_edges(v).front();
  const LeavittAlgebra* self = a.get();
  PresentationSpec spec;
  spec.name = "L(Q)";
  spec.is_element = [self](const std::string& s) {
    auto w = self->decode(s);
    return w && self->is_normal(*w);
  };
  spec.multiply = [self](const std::string& x, const std::string& y) { return self->multiply(x, y); };
  spec.local_units = [self](const std::string& s) {
    auto w = *self->decode(s);
    std::vector<std::string> out{self->quiver_.vertices()[self->src(w.p, w.vertex)]};
    std::string other = self->quiver_.vertices()[self->src(w.q, w.vertex)];
    if (other != out.front()) out.push_back(other);
    return out;
  };
  spec.idempotents = q.vertices();
  for (auto& v : q.vertices()) spec.generators.push_back(v);
  for (auto& e : q.edges()) {
    spec.generators.push_back(e.name + "|");
    spec.generators.push_back("|" + e.name);
  }
  a->ring_ = make_free_quotient(k, spec);
  return a;
}

std::size_t LeavittAlgebra::src(const std::vector<std::size_t>& path, std::size_t v) const {
  return path.empty() ? v : quiver_.edges()[path.front()].source;
}

std::string LeavittAlgebra::encode(const Word& w) const {
  if (w.p.empty() && w.q.empty()) return quiver_.vertices()[w.vertex];
  std::string s;
  for (std::size_t i = 0; i < w.p.size(); ++i) s += (i ? "." : "") + quiver_.edges()[w.p[i]].name;
  s += "|";
  for (std::size_t i = 0; i < w.q.size(); ++i) s += (i ? "." : "") + quiver_.edges()[w.q[i]].name;
  return s;
}

std::optional<LeavittAlgebra::Word> LeavittAlgebra::decode(const std::string& sym) const {
  Word w;
  auto bar = sym.find('|');
  if (bar == std::string::npos) {
    try {
      w.vertex = quiver_.vertex_index(sym);
    } catch (const SemanticError&) {
      return std::nullopt;
    }
    return w;
  }
  auto split = [&](const std::string& part, std::vector<std::size_t>& out) {
    if (part.empty()) return true;
    std::stringstream ss(part);
    std::string tok;
    while (std::getline(ss, tok, '.')) {
      try {
        out.push_back(quiver_.edge_index(tok));
      } catch (const SemanticError&) {
        return false;
      }
    }
    for (std::size_t i = 0; i + 1 < out.size(); ++i)
      if (quiver_.edges()[out[i]].range != quiver_.edges()[out[i + 1]].source) return false;
    return true;
  };
  if (!split(sym.substr(0, bar), w.p) || !split(sym.substr(bar + 1), w.q)) return std::nullopt;
  if (w.p.empty() && w.q.empty()) return std::nullopt;
  std::size_t rp = w.p.empty() ? 0 : quiver_.edges()[w.p.back()].range;
  std::size_t rq = w.q.empty() ? 0 : quiver_.edges()[w.q.back()].range;
  if (!w.p.empty() && !w.q.empty() && rp != rq) return std::nullopt;
  w.vertex = w.p.empty() ? rq : rp;
  return w;
}

bool LeavittAlgebra::is_normal(const Word& w) const {
  if (w.p.empty() || w.q.empty() || w.p.back() != w.q.back()) return true;
  std::size_t e = w.p.back();
  auto it = special_.find(quiver_.edges()[e].source);
  return it == special_.end() || it->second != e;
}

long LeavittAlgebra::degree(const std::string& sym) const {
  auto w = decode(sym);
  if (!w) throw SemanticError(sym, "not a Leavitt path word");
  return static_cast<long>(w->p.size()) - static_cast<long>(w->q.size());
}

void LeavittAlgebra::reduce(const Word& w, const mpq_class& c,
                            std::map<std::string, mpq_class>& out) const {
  if (is_normal(w)) {
    out[encode(w)] += c;
    return;
  }
  // p^ e e* q^* = p^ q^* - sum_{f != e, s(f) = v} p^ f f* q^*
  std::size_t e = w.p.back();
  std::size_t v = quiver_.edges()[e].source;
  Word base{std::vector<std::size_t>(w.p.begin(), w.p.end() - 1),
            std::vector<std::size_t>(w.q.begin(), w.q.end() - 1), v};
  reduce(base, c, out);
  for (std::size_t f : quiver_.out_edges(v)) {
    if (f == e) continue;
    Word t = base;
    t.p.push_back(f);
    t.q.push_back(f);
    t.vertex = quiver_.edges()[f].range;
    reduce(t, -c, out);
  }
}

NamedTerms LeavittAlgebra::multiply(const std::string& a, const std::string& b) const {
  Word x = *decode(a), y = *decode(b);
  // (p1 q1*)(p2 q2*): contract q1* p2.
  const auto& q1 = x.q;
  const auto& p2 = y.p;
  std::size_t common = 0;
  while (common < q1.size() && common < p2.size() && q1[common] == p2[common]) ++common;
  Word r;
  if (common == q1.size() && common == p2.size()) {
    if (src(q1, x.vertex) != src(p2, y.vertex)) return {};
    r = {x.p, y.q, y.vertex};
  } else if (common == q1.size()) {
    // p2 = q1 t
    if (q1.empty() && x.vertex != src(p2, y.vertex)) return {};
    r.p = x.p;
    r.p.insert(r.p.end(), p2.begin() + static_cast<long>(common), p2.end());
    r.q = y.q;
    r.vertex = y.vertex;
  } else if (common == p2.size()) {
    // q1 = p2 t
    if (p2.empty() && y.vertex != src(q1, x.vertex)) return {};
    r.p = x.p;
    r.q = y.q;
    r.q.insert(r.q.end(), q1.begin() + static_cast<long>(common), q1.end());
    r.vertex = x.vertex;
  } else {
    return {};
  }
  std::map<std::string, mpq_class> out;
  reduce(r, 1, out);
  NamedTerms terms;
  for (auto& [s, c] : out)
    if (c != 0) terms.emplace_back(s, c);
  return terms;
}

RingElement LeavittAlgebra::vertex(const std::string& v) const { return RingElement::basis(ring_, v); }

RingElement LeavittAlgebra::edge(const std::string& e) const {
  quiver_.edge_index(e);
  return RingElement::basis(ring_, e + "|");
}

RingElement LeavittAlgebra::ghost(const std::string& e) const {
  quiver_.edge_index(e);
  return RingElement::basis(ring_, "|" + e);
}

RingElement LeavittAlgebra::word(const Word& w) const {
  std::map<std::string, mpq_class> out;
  reduce(w, 1, out);
  NamedTerms terms(out.begin(), out.end());
  return RingElement::from_terms(ring_, terms);
}

RingElement lpa_mul(const RingElement& a, const RingElement& b) {
  if (a.ring() != b.ring()) throw RingMismatch("lpa_mul (different quivers)");
  return a * b;
}

// ---------------------------------------------------------------------------

std::map<int, CoeffGroup> field_presets(const CoeffRing& k) {
  std::map<int, CoeffGroup> p{{-1, CoeffGroup::zero()}, {0, CoeffGroup::free(1)}};
  switch (k.kind()) {
    case CoeffRing::Kind::Integers: p[1] = CoeffGroup::cyclic(2); break;
    case CoeffRing::Kind::Rationals: p[1] = CoeffGroup::cyclic(2).add(CoeffGroup::countable_free()); break;
    case CoeffRing::Kind::Modular:
      if (!k.is_field())
        throw DomainError("K-group presets need a field; Z/" + k.modulus().get_str() + " is not one");
      p[1] = k.modulus() == 2 ? CoeffGroup::zero() : CoeffGroup::cyclic(k.modulus() - 1);
      break;
  }
  return p;
}

LesReport k_groups(const Quiver& q, const std::map<int, CoeffGroup>& presets) {
  return evaluate_les(adjacency(q).theorem_map, presets);
}

LesReport crossed_product_k_groups(const IntMatrix& alpha, const std::map<int, CoeffGroup>& presets) {
  if (alpha.rows() != alpha.cols())
    throw DomainError("alpha must be square, got " + std::to_string(alpha.rows()) + "x" +
                      std::to_string(alpha.cols()));
  return evaluate_les(IntMatrix::identity(alpha.rows()) - alpha, presets);
}

std::map<int, CoeffGroup> pv_presets() {
  return {{0, CoeffGroup::free(1)}, {1, CoeffGroup::free(1)}};
}

IntMatrix induced_k0_matrix(const CorrespondencePtr& c) {
  const RingPtr& R = c->ring();
  auto comps = R->k0_components();
  if (!comps) throw DomainError("K0 of ring " + R->name() + " is not available as a component sum");
  if (!c->hom()) throw DomainError("correspondence has no functional hom");
  const FunctionalHom& h = *c->hom();
  const CoeffRing& k = R->coeff();
  IntMatrix m(comps->size(), c->ideal().size());
  for (std::size_t j = 0; j < c->ideal().size(); ++j) {
    const RingElement& i = c->ideal()[j];
    CompactOperator rho = induced_compact_map(h, c->compact_left_action(i));
    for (std::size_t y = 0; y < comps->size(); ++y) {
      SymbolId sym = R->intern((*comps)[y]);
      // [i] component: rank of the 1x1 matrix (i_y).
      mpq_class iy = 0;
      for (auto& t : i.terms())
        if (t.sym == sym) iy = t.coeff;
      long own = (iy != 0) ? 1 : 0;
      if (iy != 0 && iy != 1) throw DomainError("ideal generator is not a component idempotent");
      // rank of the y-part of rho as a matrix over k
      std::map<std::size_t, std::size_t> rows, cols;
      std::vector<std::tuple<std::size_t, std::size_t, mpq_class>> vals;
      for (auto& [key, v] : rho.entries())
        for (auto& t : v.terms())
          if (t.sym == sym) {
            auto r = rows.emplace(key.first, rows.size()).first->second;
            auto cc = cols.emplace(key.second, cols.size()).first->second;
            vals.emplace_back(r, cc, t.coeff);
          }
      RationalRows a(rows.size(), std::vector<mpq_class>(cols.size(), 0));
      for (auto& [r, cc, v] : vals) a[r][cc] = v;
      long rk = static_cast<long>(rank_over(a, cols.size(), k));
      m(y, j) = own - rk;
    }
  }
  return m;
}

}  // namespace pimsner
