#include "pimsner/selfsim.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <random>
#include <set>
#include <sstream>

#include "pimsner/error.hpp"
#include "pimsner/leavitt.hpp"

namespace pimsner {

GroupWord::GroupWord(const std::vector<GroupLetter>& letters) {
  for (auto& l : letters) {
    if (!letters_.empty() && letters_.back().gen == l.gen && letters_.back().exp == -l.exp)
      letters_.pop_back();
    else
      letters_.push_back(l);
  }
}

GroupWord GroupWord::generator(std::size_t g, int exp) { return GroupWord({{g, exp}}); }

GroupWord GroupWord::inverse() const {
  GroupWord out;
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.letters_.push_back({it->gen, -it->exp});
  return out;
}

GroupWord GroupWord::operator*(const GroupWord& o) const {
  std::vector<GroupLetter> all = letters_;
  all.insert(all.end(), o.letters_.begin(), o.letters_.end());
  return GroupWord(all);
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct WordToken {
  std::string name;
  long power = 1;
};

// Syntax only; returns nullopt with an offset on failure.
std::optional<std::vector<WordToken>> tokenize_word(const std::string& s, std::size_t& bad) {
  std::vector<WordToken> out;
  std::size_t i = 0;
  auto sep = [](char c) { return c == '.' || c == '*' || std::isspace(static_cast<unsigned char>(c)); };
  while (i < s.size()) {
    if (sep(s[i])) {
      ++i;
      continue;
    }
    if (!ident_start(s[i])) {
      bad = i;
      return std::nullopt;
    }
    std::size_t j = i;
    while (j < s.size() && ident_char(s[j])) ++j;
    WordToken t{s.substr(i, j - i), 1};
    if (j < s.size() && s[j] == '^') {
      std::size_t k = j + 1;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      std::size_t digits = k;
      while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
      if (k == digits) {
        bad = j;
        return std::nullopt;
      }
      t.power = std::stol(s.substr(j + 1, k - j - 1));
      j = k;
    }
    out.push_back(t);
    i = j;
  }
  return out;
}

void check_name(const std::string& n) {
  if (n.empty() || !ident_start(n[0]) || !std::all_of(n.begin(), n.end(), ident_char))
    throw SemanticError(n, "invalid generator name");
  if (n == "e" || n == "perm") throw SemanticError(n, "reserved generator name");
}

}  // namespace

SelfSimilarPtr SelfSimilarGroup::make(std::vector<std::string> alphabet,
                                      const std::vector<GeneratorRecursion>& gens) {
  std::shared_ptr<SelfSimilarGroup> g(new SelfSimilarGroup());
  if (alphabet.size() < 2)
    throw SemanticError(std::to_string(alphabet.size()), "alphabet needs at least two letters");
  for (auto& x : alphabet) {
    if (x.empty() || std::any_of(x.begin(), x.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
      throw SemanticError(x, "invalid letter");
    if (g->letter_pos_.count(x)) throw SemanticError(x, "duplicate letter");
    g->letter_pos_[x] = g->alphabet_.size();
    g->alphabet_.push_back(x);
    if (x.size() != 1) g->single_char_ = false;
  }
  const std::size_t d = g->alphabet_.size();
  for (auto& r : gens) {
    check_name(r.name);
    if (g->gen_pos_.count(r.name)) throw SemanticError(r.name, "duplicate generator");
    g->gen_pos_[r.name] = g->names_.size();
    g->names_.push_back(r.name);
  }
  for (auto& r : gens) {
    if (r.perm.size() != d) throw SemanticError(r.name, "permutation has the wrong size");
    std::vector<std::size_t> inv(d, d);
    for (std::size_t x = 0; x < d; ++x) {
      if (r.perm[x] >= d || inv[r.perm[x]] != d) throw SemanticError(r.name, "sigma is not a permutation");
      inv[r.perm[x]] = x;
    }
    if (r.restrictions.size() != d)
      throw SemanticError(r.name, "expected " + std::to_string(d) + " restrictions");
    std::vector<GroupWord> rest;
    for (auto& w : r.restrictions) rest.push_back(g->word(w));
    g->perm_.push_back(r.perm);
    g->inv_perm_.push_back(inv);
    g->rest_.push_back(rest);
  }
  return g;
}

SelfSimilarPtr SelfSimilarGroup::odometer() { return make({"0", "1"}, {{"a", {1, 0}, {"e", "a"}}}); }

SelfSimilarPtr SelfSimilarGroup::trivial(std::size_t d) {
  std::vector<std::string> alpha;
  for (std::size_t i = 0; i < d; ++i) alpha.push_back(std::to_string(i));
  return make(alpha, {});
}

SelfSimilarPtr SelfSimilarGroup::parse(const std::string& text) {
  std::vector<std::string> alphabet;
  bool have_alphabet = false;
  std::vector<GeneratorRecursion> gens;
  std::vector<std::vector<std::vector<std::string>>> cycles;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  int alphabet_line = 0;
  std::vector<int> gen_lines;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw.substr(0, raw.find('#'));
    std::size_t pos = 0;
    auto skip = [&] {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    };
    auto fail = [&](const std::string& msg) -> void {
      throw ParseError(line, static_cast<int>(pos) + 1, msg);
    };
    skip();
    if (pos >= s.size()) continue;
    if (!have_alphabet) {
      if (s.compare(pos, 9, "alphabet:") != 0) fail("expected 'alphabet:'");
      pos += 9;
      std::istringstream ls(s.substr(pos));
      std::string x;
      while (ls >> x) alphabet.push_back(x);
      have_alphabet = true;
      alphabet_line = line;
      continue;
    }
    std::size_t start = pos;
    while (pos < s.size() && ident_char(s[pos])) ++pos;
    if (pos == start) fail("expected a generator name");
    GeneratorRecursion r;
    r.name = s.substr(start, pos - start);
    skip();
    if (pos >= s.size() || s[pos] != '=') fail("expected '='");
    ++pos;
    std::vector<std::vector<std::string>> gen_cycles;
    bool have_tuple = false;
    while (true) {
      skip();
      if (pos >= s.size()) break;
      if (have_tuple) fail("unexpected text after the restriction tuple");
      if (s[pos] != '(') fail("expected '('");
      std::size_t close = s.find(')', pos);
      if (close == std::string::npos) fail("unclosed '('");
      std::string inner = s.substr(pos + 1, close - pos - 1);
      std::istringstream is(inner);
      std::string first;
      is >> first;
      if (first == "perm") {
        std::vector<std::string> cyc;
        std::string x;
        while (is >> x) cyc.push_back(x);
        gen_cycles.push_back(cyc);
      } else {
        std::size_t from = 0;
        while (true) {
          std::size_t comma = inner.find(',', from);
          std::string part = inner.substr(from, comma == std::string::npos ? std::string::npos : comma - from);
          std::size_t bad = 0;
          if (!tokenize_word(part, bad)) {
            pos = pos + 1 + from + bad;
            fail("malformed group word");
          }
          std::size_t a = part.find_first_not_of(" \t\r");
          std::size_t b = part.find_last_not_of(" \t\r");
          if (a == std::string::npos) {
            pos = pos + 1 + from;
            fail("empty restriction");
          }
          r.restrictions.push_back(part.substr(a, b - a + 1));
          if (comma == std::string::npos) break;
          from = comma + 1;
        }
        have_tuple = true;
      }
      pos = close + 1;
    }
    if (!have_tuple) fail("missing restriction tuple");
    gens.push_back(r);
    cycles.push_back(gen_cycles);
    gen_lines.push_back(line);
  }
  if (!have_alphabet) throw ParseError(line + 1, 1, "missing 'alphabet:' line");
  try {
    return build_parsed(alphabet, gens, cycles);
  } catch (const SemanticError& e) {
    if (e.line()) throw;
    int where = alphabet_line;
    for (std::size_t g = gens.size(); g-- > 0;) {
      bool hit = gens[g].name == e.symbol();
      for (auto& c : cycles[g]) hit = hit || std::find(c.begin(), c.end(), e.symbol()) != c.end();
      for (auto& w : gens[g].restrictions) {
        std::size_t bad = 0;
        if (auto toks = tokenize_word(w, bad))
          for (auto& t : *toks) hit = hit || t.name == e.symbol();
      }
      if (hit) where = gen_lines[g];
      if (hit && gens[g].name == e.symbol()) break;
    }
    throw SemanticError(e.symbol(), e.detail(), where);
  }
}

SelfSimilarPtr SelfSimilarGroup::build_parsed(const std::vector<std::string>& alphabet,
                                              std::vector<GeneratorRecursion> gens,
                                              const std::vector<std::vector<std::vector<std::string>>>& cycles) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < alphabet.size(); ++i) pos[alphabet[i]] = i;
  for (std::size_t g = 0; g < gens.size(); ++g) {
    std::vector<std::size_t> perm(alphabet.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    // Cycles compose right to left.
    for (auto it = cycles[g].rbegin(); it != cycles[g].rend(); ++it) {
      std::vector<std::size_t> idx;
      for (auto& x : *it) {
        auto f = pos.find(x);
        if (f == pos.end()) throw SemanticError(x, "unknown letter");
        if (std::find(idx.begin(), idx.end(), f->second) != idx.end())
          throw SemanticError(gens[g].name, "sigma is not a permutation");
        idx.push_back(f->second);
      }
      std::vector<std::size_t> c(perm.size());
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = i;
      for (std::size_t k = 0; k < idx.size(); ++k) c[idx[k]] = idx[(k + 1) % idx.size()];
      for (auto& v : perm) v = c[v];
    }
    gens[g].perm = perm;
  }
  return make(alphabet, gens);
}

std::size_t SelfSimilarGroup::letter_index(const std::string& x) const {
  auto it = letter_pos_.find(x);
  if (it == letter_pos_.end()) throw SemanticError(x, "unknown letter");
  return it->second;
}

std::size_t SelfSimilarGroup::generator_index(const std::string& g) const {
  auto it = gen_pos_.find(g);
  if (it == gen_pos_.end()) throw SemanticError(g, "unknown generator");
  return it->second;
}

GroupWord SelfSimilarGroup::word(const std::string& text) const {
  std::size_t bad = 0;
  auto toks = tokenize_word(text, bad);
  if (!toks) throw SemanticError(text, "malformed group word");
  std::vector<GroupLetter> letters;
  for (auto& t : *toks) {
    if (t.name == "e") continue;
    std::size_t g = generator_index(t.name);
    int exp = t.power < 0 ? -1 : 1;
    for (long k = 0; k < std::labs(t.power); ++k) letters.push_back({g, exp});
  }
  return GroupWord(letters);
}

std::string SelfSimilarGroup::format(const GroupWord& g) const {
  if (g.is_identity()) return "e";
  std::string out;
  for (auto& l : g.letters()) {
    if (!out.empty()) out += ".";
    out += names_[l.gen];
    if (l.exp < 0) out += "^-1";
  }
  return out;
}

AlphabetWord SelfSimilarGroup::letters(const std::string& text) const {
  AlphabetWord w;
  if (single_char_) {
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) w.push_back(letter_index(std::string(1, c)));
    return w;
  }
  std::istringstream in(text);
  std::string x;
  while (in >> x) w.push_back(letter_index(x));
  return w;
}

std::string SelfSimilarGroup::format(const AlphabetWord& w) const {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!single_char_ && i) out += " ";
    out += alphabet_[w[i]];
  }
  return out;
}

std::size_t SelfSimilarGroup::act_letter(const GroupWord& g, std::size_t x) const {
  const auto& ls = g.letters();
  for (auto it = ls.rbegin(); it != ls.rend(); ++it) x = it->exp > 0 ? perm_[it->gen][x] : inv_perm_[it->gen][x];
  return x;
}

GroupWord SelfSimilarGroup::restriction(const GroupWord& g, std::size_t x) const {
  const auto& ls = g.letters();
  std::vector<GroupWord> parts(ls.size());
  for (std::size_t i = ls.size(); i-- > 0;) {
    const GroupLetter& l = ls[i];
    if (l.exp > 0) {
      parts[i] = rest_[l.gen][x];
      x = perm_[l.gen][x];
    } else {
      std::size_t y = inv_perm_[l.gen][x];
      parts[i] = rest_[l.gen][y].inverse();
      x = y;
    }
  }
  std::vector<GroupLetter> all;
  for (auto& p : parts) all.insert(all.end(), p.letters().begin(), p.letters().end());
  return GroupWord(all);
}

GroupWord SelfSimilarGroup::restriction(const GroupWord& g, const AlphabetWord& w) const {
  GroupWord cur = g;
  for (std::size_t x : w) {
    if (cur.is_identity()) break;
    cur = restriction(cur, x);
  }
  return cur;
}

AlphabetWord SelfSimilarGroup::act(const GroupWord& g, const AlphabetWord& w) const {
  AlphabetWord out;
  out.reserve(w.size());
  GroupWord cur = g;
  for (std::size_t x : w) {
    if (cur.is_identity()) {
      out.push_back(x);
      continue;
    }
    out.push_back(act_letter(cur, x));
    cur = restriction(cur, x);
  }
  return out;
}

GroupEquality SelfSimilarGroup::trivial_below(
    const GroupWord& f, long depth, std::map<std::pair<GroupWord, long>, GroupEquality>& memo) const {
  if (f.is_identity()) return {true, true};
  if (depth <= 0) return {true, false};
  auto key = std::make_pair(f, depth);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  GroupEquality out{true, true};
  for (std::size_t x = 0; x < alphabet_.size() && out.equal; ++x) {
    if (act_letter(f, x) != x) {
      out = {false, false};
      break;
    }
    GroupEquality c = trivial_below(restriction(f, x), depth - 1, memo);
    out.equal = out.equal && c.equal;
    out.certified = out.certified && c.certified;
  }
  if (!out.equal) out.certified = false;
  memo[key] = out;
  return out;
}

GroupEquality SelfSimilarGroup::equal(const GroupWord& g, const GroupWord& h, long depth) const {
  GroupWord f = g * h.inverse();
  std::map<std::pair<GroupWord, long>, GroupEquality> memo;
  GroupEquality r = trivial_below(f, depth, memo);
  if (!r.equal || r.certified) return r;
  // The closure of f under restriction fixing every letter proves f = e.
  std::set<GroupWord> seen{f};
  std::deque<GroupWord> todo{f};
  while (!todo.empty()) {
    GroupWord s = todo.front();
    todo.pop_front();
    for (std::size_t x = 0; x < alphabet_.size(); ++x) {
      if (act_letter(s, x) != x) return r;
      GroupWord c = restriction(s, x);
      if (c.is_identity() || seen.count(c)) continue;
      if (seen.size() >= 4096 || c.length() > 64) return r;
      seen.insert(c);
      todo.push_back(c);
    }
  }
  r.certified = true;
  return r;
}

bool SelfSimilarGroup::is_trivial(long depth) const {
  for (std::size_t g = 0; g < names_.size(); ++g) {
    GroupEquality r = equal(GroupWord::generator(g), GroupWord(), depth);
    if (!r.equal || !r.certified) return false;
  }
  return true;
}

std::string SelfSimilarGroup::to_dsl() const {
  std::ostringstream os;
  os << "alphabet:";
  for (auto& x : alphabet_) os << " " << x;
  os << "\n";
  for (std::size_t g = 0; g < names_.size(); ++g) {
    os << names_[g] << " = ";
    std::vector<bool> done(alphabet_.size(), false);
    for (std::size_t x = 0; x < alphabet_.size(); ++x) {
      if (done[x] || perm_[g][x] == x) continue;
      os << "(perm";
      for (std::size_t y = x; !done[y]; y = perm_[g][y]) {
        done[y] = true;
        os << " " << alphabet_[y];
      }
      os << ")";
    }
    os << "(";
    for (std::size_t x = 0; x < alphabet_.size(); ++x) os << (x ? ", " : "") << format(rest_[g][x]);
    os << ")\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------

RingElement NekCorrespondence::element(const GroupWord& g, const mpq_class& c) const {
  return RingElement::basis(ring, group->format(g), c);
}

XVector NekCorrespondence::vector(std::size_t x, const GroupWord& g, const mpq_class& c) const {
  return XVector::make(correspondence->module(), x, element(g, c));
}

XpVector NekCorrespondence::dual(const XVector& v) const {
  XpVector out(correspondence->module());
  for (auto& [b, r] : v.components()) {
    NamedTerms t;
    for (auto& [s, c] : r.named_terms()) t.emplace_back(group->format(group->word(s).inverse()), c);
    out.add_term(b, RingElement::from_terms(ring, t));
  }
  return out;
}

std::vector<std::vector<RingElement>> NekCorrespondence::left_matrix(const GroupWord& g) const {
  std::size_t d = group->degree();
  std::vector<std::vector<RingElement>> m(d, std::vector<RingElement>(d, RingElement(ring)));
  for (std::size_t x = 0; x < d; ++x) m[group->act_letter(g, x)][x] = element(group->restriction(g, x));
  return m;
}

namespace {

struct WordCache {
  SelfSimilarPtr group;
  long depth;
  std::mutex mu;
  std::map<std::pair<std::string, std::string>, bool> eq;
};

}  // namespace

NekCorrespondence build_nek_correspondence(const SelfSimilarPtr& group, const CoeffRing& k, long depth) {
  if (depth < 1) throw DomainError("equality depth must be at least 1");
  NekCorrespondence n;
  n.group = group;
  n.depth = depth;
  auto cache = std::make_shared<WordCache>();
  cache->group = group;
  cache->depth = depth;

  GroupRingSpec spec;
  spec.name = "kG";
  spec.identity = "e";
  spec.multiply = [group](const std::string& a, const std::string& b) {
    return group->format(group->word(a) * group->word(b));
  };
  spec.is_element = [group](const std::string& s) {
    try {
      return group->format(group->word(s)) == s;
    } catch (const Error&) {
      return false;
    }
  };
  for (std::size_t g = 0; g < group->generators().size(); ++g) {
    spec.generators.push_back(group->format(GroupWord::generator(g)));
    spec.generators.push_back(group->format(GroupWord::generator(g, -1)));
  }
  spec.equal = [cache](const std::string& a, const std::string& b) {
    if (a == b) return true;
    auto key = a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    std::lock_guard<std::mutex> lock(cache->mu);
    auto it = cache->eq.find(key);
    if (it != cache->eq.end()) return it->second;
    bool r = cache->group->equal(cache->group->word(a), cache->group->word(b), cache->depth).equal;
    cache->eq[key] = r;
    return r;
  };
  spec.trivial_group = group->is_trivial(depth);
  n.ring = make_group_ring(k, spec);
  const RingPtr& R = n.ring;
  const std::size_t d = group->degree();
  RingElement unit = RingElement::basis(R, "e");

  std::vector<Generator> xs, xps;
  for (auto& x : group->alphabet()) {
    xs.push_back({x, unit});
    xps.push_back({x + "'", unit});
  }
  ModulePtr m = FunctionalModule::create(R, "X_G", xs, xps, [&](std::size_t bp, std::size_t b) {
    return bp == b ? unit : RingElement(R);
  });
  auto left = [group, m, R](const std::string& s, std::size_t b) {
    GroupWord g = group->word(s);
    return XVector::make(m, group->act_letter(g, b), RingElement::basis(R, group->format(group->restriction(g, b))));
  };
  auto right = [group, m, R](std::size_t bp, const std::string& s) {
    GroupWord t = group->word(s);
    std::size_t y = group->act_letter(t.inverse(), bp);
    return XpVector::make(m, y, RingElement::basis(R, group->format(group->restriction(t, y))));
  };
  FunctionalHom h;
  h.source = m;
  h.target = make_free_module(R, group->alphabet());
  for (auto& x : group->alphabet()) {
    std::string f = free_generator_name(x, "e");
    h.U.push_back(XVector::basis(h.target, f));
    h.V.push_back(XpVector::basis(h.target, f));
  }
  n.correspondence = Correspondence::create(m, left, right, h, {unit}, "X_G");
  const auto& c = n.correspondence;

  CheckResult law;
  std::vector<GroupWord> gens;
  for (std::size_t g = 0; g < group->generators().size(); ++g) {
    gens.push_back(GroupWord::generator(g));
    gens.push_back(GroupWord::generator(g, -1));
  }
  for (auto& g : gens)
    for (std::size_t x = 0; x < d; ++x) {
      ++law.checked;
      XVector lhs = c->left(n.element(g), XVector::basis(m, x));
      if (!(lhs == n.vector(group->act_letter(g, x), group->restriction(g, x))))
        law.fail("g.x != g(x).g|_x for g = " + group->format(g) + ", x = " + group->alphabet()[x]);
      GroupWord back = group->restriction(g.inverse(), group->act_letter(g, x)) * group->restriction(g, x);
      if (!group->equal(back, GroupWord(), depth).equal)
        law.fail("g^-1 g does not restrict to e at " + group->alphabet()[x]);
    }
  ++law.checked;
  if (!c->check_left_module()) law.fail("Delta(s) Delta(t) != Delta(st) on generators");
  n.checks.emplace_back("left module law", law);

  CheckResult adj;
  ++adj.checked;
  if (!c->check_adjointable()) adj.fail("pairing is not compatible with the left action");
  n.checks.emplace_back("adjointability", adj);

  CheckResult compact;
  gens.insert(gens.begin(), GroupWord());
  for (auto& g : gens) {
    ++compact.checked;
    auto op = c->try_compact(n.element(g));
    if (!op) {
      compact.fail("left action of " + group->format(g) + " is not compact");
      continue;
    }
    auto mat = n.left_matrix(g);
    for (std::size_t y = 0; y < d; ++y)
      for (std::size_t x = 0; x < d; ++x) {
        auto it = op->entries().find({y, x});
        RingElement got = it == op->entries().end() ? RingElement(R) : it->second;
        if (!(got == mat[y][x]))
          compact.fail("left action of " + group->format(g) + " differs from its matrix at (" +
                       group->alphabet()[y] + ", " + group->alphabet()[x] + ")");
      }
  }
  n.checks.emplace_back("compact left action", compact);

  for (auto& [name, r] : n.checks)
    if (!r.ok) throw InvariantViolation(name + ": " + r.detail);
  return n;
}

RingElement nek_pairing(const NekCorrespondence& n, const XVector& xi, const XVector& eta) {
  if (xi.module() != n.correspondence->module() || eta.module() != n.correspondence->module())
    throw ModuleMismatch("nek_pairing");
  return pair(n.dual(xi), eta);
}

std::optional<LesReport> nek_k_groups(const NekCorrespondence& n, const std::map<int, CoeffGroup>& presets,
                                      const std::optional<IntMatrix>& action) {
  if (action) {
    if (action->rows() != action->cols()) throw DomainError("action matrix must be square");
    return evaluate_les(IntMatrix::identity(action->rows()) - *action, presets);
  }
  if (!n.ring->k0_components()) return std::nullopt;
  return evaluate_les(induced_k0_matrix(n.correspondence), presets);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kEnumerationCap = 100000;

std::vector<AlphabetWord> all_words(std::size_t d, std::size_t n) {
  std::vector<AlphabetWord> out{{}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<AlphabetWord> next;
    next.reserve(out.size() * d);
    for (auto& w : out)
      for (std::size_t x = 0; x < d; ++x) {
        next.push_back(w);
        next.back().push_back(x);
      }
    out.swap(next);
  }
  return out;
}

bool enumerable(std::size_t d, std::size_t n) {
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= d;
    if (total > kEnumerationCap) return false;
  }
  return true;
}

GroupWord random_group_word(std::mt19937_64& rng, std::size_t gens, std::size_t max_len) {
  if (gens == 0) return GroupWord();
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  std::vector<GroupLetter> ls;
  for (std::size_t i = 0; i < len; ++i)
    ls.push_back({std::uniform_int_distribution<std::size_t>(0, gens - 1)(rng), (rng() & 1) ? 1 : -1});
  return GroupWord(ls);
}

AlphabetWord random_alphabet_word(std::mt19937_64& rng, std::size_t d, std::size_t max_len) {
  std::size_t len = std::uniform_int_distribution<std::size_t>(0, max_len)(rng);
  AlphabetWord w(len);
  for (auto& x : w) x = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
  return w;
}

}  // namespace

SelfSimilarSuite selfsim_suite(const SelfSimilarGroup& G, long depth, std::uint64_t seed, std::size_t samples) {
  SelfSimilarSuite out;
  const std::size_t d = G.degree();
  std::mt19937_64 rng(seed);
  std::vector<GroupWord> gens;
  for (std::size_t g = 0; g < G.generators().size(); ++g) {
    gens.push_back(GroupWord::generator(g));
    gens.push_back(GroupWord::generator(g, -1));
  }

  std::vector<std::vector<AlphabetWord>> levels;
  for (std::size_t n = 0; n <= static_cast<std::size_t>(std::max(depth, 0L)); ++n) {
    if (!enumerable(d, n)) {
      out.bijectivity.skipped += 1;
      out.recursion.skipped += 1;
      continue;
    }
    levels.push_back(all_words(d, n));
  }

  for (auto& level : levels) {
    if (level.front().empty()) continue;
    std::size_t n = level.front().size();
    out.bijectivity.degrees.push_back(n);
    for (auto& g : gens) {
      std::set<AlphabetWord> images;
      for (auto& w : level) {
        ++out.bijectivity.checked;
        AlphabetWord v = G.act(g, w);
        if (v.size() != w.size()) out.bijectivity.fail("act changes length for " + G.format(g));
        images.insert(v);
      }
      if (images.size() != level.size()) out.bijectivity.fail("act is not injective for " + G.format(g));
    }
  }

  auto recursion_at = [&](const GroupWord& g, std::size_t x, const AlphabetWord& w) {
    ++out.recursion.checked;
    AlphabetWord xw{x};
    xw.insert(xw.end(), w.begin(), w.end());
    AlphabetWord lhs = G.act(g, xw);
    AlphabetWord rhs{G.act_letter(g, x)};
    AlphabetWord tail = G.act(G.restriction(g, x), w);
    rhs.insert(rhs.end(), tail.begin(), tail.end());
    if (lhs != rhs)
      out.recursion.fail("g(xw) != g(x) g|_x(w) for g = " + G.format(g) + ", xw = " + G.format(xw));
    // Letterwise composition against the product.
    AlphabetWord step = xw;
    const auto& ls = g.letters();
    for (auto it = ls.rbegin(); it != ls.rend(); ++it) step = G.act(GroupWord::generator(it->gen, it->exp), step);
    if (step != lhs) out.recursion.fail("act of a product differs from composition for " + G.format(g));
  };
  for (auto& level : levels) {
    if (level.front().size() + 1 > static_cast<std::size_t>(depth)) continue;
    out.recursion.degrees.push_back(level.front().size() + 1);
    for (auto& g : gens)
      for (std::size_t x = 0; x < d; ++x)
        for (auto& w : level) recursion_at(g, x, w);
  }
  std::size_t tail_len = depth > 0 ? static_cast<std::size_t>(depth - 1) : 0;
  for (std::size_t i = 0; i < samples; ++i) {
    GroupWord g = random_group_word(rng, G.generators().size(), 4);
    for (std::size_t x = 0; x < d; ++x) recursion_at(g, x, random_alphabet_word(rng, d, tail_len));
  }

  long sub = std::max(depth - 1, 0L);
  auto cocycle_at = [&](const GroupWord& g, const GroupWord& h) {
    for (std::size_t x = 0; x < d; ++x) {
      ++out.cocycle.checked;
      GroupWord lhs = G.restriction(g * h, x);
      GroupWord rhs = G.restriction(g, G.act_letter(h, x)) * G.restriction(h, x);
      if (!G.equal(lhs, rhs, sub).equal)
        out.cocycle.fail("(gh)|_x != g|_h(x) h|_x for g = " + G.format(g) + ", h = " + G.format(h));
    }
  };
  for (auto& g : gens)
    for (auto& h : gens) cocycle_at(g, h);
  for (std::size_t i = 0; i < samples; ++i)
    cocycle_at(random_group_word(rng, G.generators().size(), 4), random_group_word(rng, G.generators().size(), 4));
  // Restriction along a word is the iterated letter restriction.
  for (auto& level : levels) {
    if (level.front().size() < 2) continue;
    out.cocycle.degrees.push_back(level.front().size());
    for (auto& g : gens)
      for (auto& w : level) {
        ++out.cocycle.checked;
        AlphabetWord u(w.begin(), w.begin() + 1), v(w.begin() + 1, w.end());
        GroupWord a = G.restriction(g, w);
        GroupWord b = G.restriction(G.restriction(g, u), v);
        if (!G.equal(a, b, sub).equal) out.cocycle.fail("g|_uv != (g|_u)|_v for g = " + G.format(g));
      }
  }
  return out;
}

}  // namespace pimsner
