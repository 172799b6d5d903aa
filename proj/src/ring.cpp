#include "pimsner/ring.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pimsner/error.hpp"

namespace pimsner {

namespace {

bool parse_long(const std::string& s, long& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stol(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

// "E[i,j]" -> (i, j)
bool split_matrix_unit(const std::string& s, std::string& i, std::string& j) {
  if (s.size() < 5 || s.rfind("E[", 0) != 0 || s.back() != ']') return false;
  auto comma = s.find(',');
  if (comma == std::string::npos) return false;
  i = s.substr(2, comma - 2);
  j = s.substr(comma + 1, s.size() - comma - 2);
  return true;
}

}  // namespace

std::string matrix_unit_symbol(const std::string& i, const std::string& j) {
  return "E[" + i + "," + j + "]";
}

std::string laurent_symbol(long n, const std::string& variable) {
  return variable + "^" + std::to_string(n);
}

std::string RingDescriptor::kind_name() const {
  switch (kind_) {
    case Kind::DirectSum: return "direct_sum";
    case Kind::Matrix: return "matrix";
    case Kind::Laurent: return "laurent";
    case Kind::GroupRing: return "group_ring";
    case Kind::FreeQuotient: return "free_quotient";
  }
  return "?";
}

bool RingDescriptor::syntax_ok(const std::string& sym) const {
  switch (kind_) {
    case Kind::DirectSum: return index_pos_.count(sym) > 0;
    case Kind::Matrix: {
      std::string i, j;
      return split_matrix_unit(sym, i, j) && index_pos_.count(i) && index_pos_.count(j);
    }
    case Kind::Laurent: {
      long n;
      return sym.size() > variable_.size() + 1 && sym.rfind(variable_ + "^", 0) == 0 &&
             parse_long(sym.substr(variable_.size() + 1), n);
    }
    case Kind::GroupRing: return group_.is_element && group_.is_element(sym);
    case Kind::FreeQuotient: return presentation_.is_element && presentation_.is_element(sym);
  }
  return false;
}

bool RingDescriptor::is_symbol(const std::string& sym) const { return syntax_ok(sym); }

SymbolId RingDescriptor::intern_unchecked(const std::string& sym) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = ids_.find(sym);
  if (it != ids_.end()) return it->second;
  auto id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(sym);
  ids_.emplace(sym, id);
  return id;
}

SymbolId RingDescriptor::intern(const std::string& sym) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(sym);
    if (it != ids_.end()) return it->second;
  }
  if (!syntax_ok(sym)) throw SemanticError(sym, "symbol does not belong to ring " + name_);
  return intern_unchecked(sym);
}

std::string RingDescriptor::symbol(SymbolId id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return symbols_.at(id);
}

std::vector<std::pair<SymbolId, mpq_class>> RingDescriptor::compute_mul(SymbolId a,
                                                                         SymbolId b) const {
  std::vector<std::pair<SymbolId, mpq_class>> out;
  const std::string sa = symbol(a);
  const std::string sb = symbol(b);
  switch (kind_) {
    case Kind::DirectSum:
    case Kind::Matrix:
      break;  // handled in basis_mul
    case Kind::Laurent: {
      long m, n;
      parse_long(sa.substr(variable_.size() + 1), m);
      parse_long(sb.substr(variable_.size() + 1), n);
      out.emplace_back(intern_unchecked(laurent_symbol(m + n, variable_)), 1);
      break;
    }
    case Kind::GroupRing:
      out.emplace_back(intern_unchecked(group_.multiply(sa, sb)), 1);
      break;
    case Kind::FreeQuotient:
      for (auto& [sym, c] : presentation_.multiply(sa, sb)) {
        if (c == 0) continue;
        out.emplace_back(intern(sym), c);
      }
      break;
  }
  return out;
}

std::vector<std::pair<SymbolId, mpq_class>> RingDescriptor::basis_mul(SymbolId a,
                                                                       SymbolId b) const {
  if (kind_ == Kind::DirectSum) {
    if (a == b) return {{a, 1}};
    return {};
  }
  if (kind_ == Kind::Matrix) {
    const auto n = static_cast<SymbolId>(index_.size());
    if (a % n != b / n) return {};
    return {{(a / n) * n + b % n, 1}};
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 32) | b;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = mul_cache_.find(key);
    if (it != mul_cache_.end()) return it->second;
  }
  auto out = compute_mul(a, b);
  std::lock_guard<std::mutex> lock(mu_);
  mul_cache_.emplace(key, out);
  return out;
}

std::optional<SymbolId> RingDescriptor::unit() const {
  switch (kind_) {
    case Kind::Laurent: return intern(laurent_symbol(0, variable_));
    case Kind::GroupRing: return intern(group_.identity);
    default: return std::nullopt;
  }
}

bool RingDescriptor::has_local_unit_rule() const {
  return kind_ != Kind::FreeQuotient || static_cast<bool>(presentation_.local_units);
}

std::vector<SymbolId> RingDescriptor::local_unit_symbols(SymbolId sym) const {
  switch (kind_) {
    case Kind::DirectSum: return {sym};
    case Kind::Matrix: {
      const auto n = static_cast<SymbolId>(index_.size());
      SymbolId i = sym / n, j = sym % n;
      if (i == j) return {i * n + i};
      return {i * n + i, j * n + j};
    }
    case Kind::Laurent:
    case Kind::GroupRing: return {*unit()};
    case Kind::FreeQuotient: {
      if (!presentation_.local_units)
        throw DomainError("ring " + name_ + " has no local-unit rule");
      std::vector<SymbolId> out;
      for (auto& s : presentation_.local_units(symbol(sym))) out.push_back(intern(s));
      return out;
    }
  }
  return {};
}

std::vector<std::string> RingDescriptor::idempotent_decomposition() const {
  switch (kind_) {
    case Kind::DirectSum: return index_;
    case Kind::Matrix: {
      std::vector<std::string> out;
      for (auto& i : index_) out.push_back(matrix_unit_symbol(i, i));
      return out;
    }
    case Kind::Laurent: return {laurent_symbol(0, variable_)};
    case Kind::GroupRing: return {group_.identity};
    case Kind::FreeQuotient: return presentation_.idempotents;
  }
  return {};
}

std::vector<std::string> RingDescriptor::generators() const {
  switch (kind_) {
    case Kind::DirectSum: return index_;
    case Kind::Matrix: {
      std::vector<std::string> out;
      for (auto& i : index_)
        for (auto& j : index_) out.push_back(matrix_unit_symbol(i, j));
      return out;
    }
    case Kind::Laurent:
      return {laurent_symbol(0, variable_), laurent_symbol(1, variable_),
              laurent_symbol(-1, variable_)};
    case Kind::GroupRing: {
      std::vector<std::string> out{group_.identity};
      out.insert(out.end(), group_.generators.begin(), group_.generators.end());
      return out;
    }
    case Kind::FreeQuotient: return presentation_.generators;
  }
  return {};
}

std::optional<std::vector<std::string>> RingDescriptor::k0_components() const {
  if (kind_ == Kind::DirectSum) return index_;
  if (kind_ == Kind::GroupRing && group_.trivial_group)
    return std::vector<std::string>{group_.identity};
  return std::nullopt;
}

void RingDescriptor::canonicalize(std::vector<Term>& terms) const {
  if (kind_ != Kind::GroupRing || !group_.equal || terms.size() < 2) return;
  std::vector<std::string> names;
  for (auto& t : terms) names.push_back(symbol(t.sym));
  std::vector<bool> dead(terms.size(), false);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (dead[i]) continue;
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      if (dead[j] || !group_.equal(names[i], names[j])) continue;
      bool j_better = names[j].size() < names[i].size() ||
                      (names[j].size() == names[i].size() && names[j] < names[i]);
      if (j_better) {
        terms[j].coeff += terms[i].coeff;
        dead[i] = true;
        break;
      }
      terms[i].coeff += terms[j].coeff;
      dead[j] = true;
    }
  }
  std::vector<Term> kept;
  for (std::size_t i = 0; i < terms.size(); ++i)
    if (!dead[i]) kept.push_back(std::move(terms[i]));
  terms = std::move(kept);
}

RingPtr make_direct_sum(const CoeffRing& k, const std::vector<std::string>& S,
                        const std::string& name) {
  std::shared_ptr<RingDescriptor> r(new RingDescriptor(RingDescriptor::Kind::DirectSum, k, name));
  for (auto& s : S) {
    if (r->index_pos_.count(s)) throw SemanticError(s, "duplicate index");
    r->index_pos_[s] = r->index_.size();
    r->index_.push_back(s);
    r->intern_unchecked(s);
  }
  return r;
}

RingPtr make_matrix_ring(const CoeffRing& k, const std::vector<std::string>& I,
                         const std::string& name) {
  std::shared_ptr<RingDescriptor> r(new RingDescriptor(RingDescriptor::Kind::Matrix, k, name));
  for (auto& s : I) {
    if (r->index_pos_.count(s)) throw SemanticError(s, "duplicate index");
    r->index_pos_[s] = r->index_.size();
    r->index_.push_back(s);
  }
  for (auto& i : I)
    for (auto& j : I) r->intern_unchecked(matrix_unit_symbol(i, j));
  return r;
}

RingPtr make_laurent(const CoeffRing& k, const std::string& variable) {
  std::shared_ptr<RingDescriptor> r(
      new RingDescriptor(RingDescriptor::Kind::Laurent, k, k.spec() + "[" + variable + "^+-1]"));
  r->variable_ = variable;
  return r;
}

RingPtr make_group_ring(const CoeffRing& k, GroupRingSpec spec) {
  std::shared_ptr<RingDescriptor> r(
      new RingDescriptor(RingDescriptor::Kind::GroupRing, k, spec.name));
  r->group_ = std::move(spec);
  return r;
}

RingPtr make_free_quotient(const CoeffRing& k, PresentationSpec spec) {
  std::shared_ptr<RingDescriptor> r(
      new RingDescriptor(RingDescriptor::Kind::FreeQuotient, k, spec.name));
  r->presentation_ = std::move(spec);
  return r;
}

// ---------------------------------------------------------------------------

RingElement RingElement::basis(RingPtr ring, const std::string& sym, const mpq_class& c) {
  RingElement e(ring);
  e.terms_.push_back({ring->intern(sym), c});
  e.normalize();
  return e;
}

RingElement RingElement::from_terms(RingPtr ring, const NamedTerms& terms) {
  RingElement e(ring);
  for (auto& [s, c] : terms) e.terms_.push_back({ring->intern(s), c});
  e.normalize();
  return e;
}

RingElement RingElement::from_ids(RingPtr ring, std::vector<Term> terms) {
  RingElement e(std::move(ring));
  e.terms_ = std::move(terms);
  e.normalize();
  return e;
}

RingElement RingElement::scalar_unit(RingPtr ring, const mpq_class& c) {
  auto u = ring->unit();
  if (!u) throw DomainError("ring " + ring->name() + " is not unital");
  return from_ids(ring, {{*u, c}});
}

void RingElement::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.sym < b.sym; });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!out.empty() && out.back().sym == t.sym)
      out.back().coeff += t.coeff;
    else
      out.push_back(std::move(t));
  }
  if (ring_) ring_->canonicalize(out);
  terms_.clear();
  for (auto& t : out) {
    mpq_class c = ring_ ? ring_->coeff().normalize(t.coeff) : t.coeff;
    if (c != 0) terms_.push_back({t.sym, std::move(c)});
  }
}

mpq_class RingElement::coefficient(const std::string& sym) const {
  if (!ring_->is_symbol(sym)) return 0;
  SymbolId id = ring_->intern(sym);
  for (auto& t : terms_)
    if (t.sym == id) return t.coeff;
  return 0;
}

NamedTerms RingElement::named_terms() const {
  NamedTerms out;
  for (auto& t : terms_) out.emplace_back(ring_->symbol(t.sym), t.coeff);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::string RingElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [s, c] : named_terms()) {
    if (!first) os << " + ";
    first = false;
    if (c == 1)
      os << s;
    else
      os << c.get_str() << "*" << s;
  }
  return os.str();
}

static void check_same(const RingElement& a, const RingElement& b, const char* where) {
  if (a.ring() != b.ring()) throw RingMismatch(where);
}

RingElement RingElement::operator+(const RingElement& o) const {
  RingElement r = *this;
  r += o;
  return r;
}

RingElement& RingElement::operator+=(const RingElement& o) {
  check_same(*this, o, "add");
  if (o.terms_.empty()) return *this;
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  normalize();
  return *this;
}

RingElement RingElement::operator-() const { return scaled(-1); }

RingElement RingElement::operator-(const RingElement& o) const { return *this + (-o); }

RingElement RingElement::scaled(const mpq_class& c) const {
  RingElement r(ring_);
  for (auto& t : terms_) r.terms_.push_back({t.sym, t.coeff * c});
  r.normalize();
  return r;
}

RingElement RingElement::operator*(const RingElement& o) const {
  check_same(*this, o, "mul");
  RingElement r(ring_);
  for (auto& a : terms_)
    for (auto& b : o.terms_)
      for (auto& [s, c] : ring_->basis_mul(a.sym, b.sym))
        r.terms_.push_back({s, a.coeff * b.coeff * c});
  r.normalize();
  return r;
}

bool RingElement::operator==(const RingElement& o) const {
  check_same(*this, o, "equality");
  if (terms_.size() == o.terms_.size()) {
    bool same = true;
    for (std::size_t i = 0; i < terms_.size() && same; ++i)
      same = terms_[i].sym == o.terms_[i].sym && terms_[i].coeff == o.terms_[i].coeff;
    if (same) return true;
  }
  // Oracle-merged group rings may hold equal elements under different words.
  return (*this - o).is_zero();
}

RingElement add(const RingElement& a, const RingElement& b) { return a + b; }
RingElement mul(const RingElement& a, const RingElement& b) { return a * b; }

bool is_idempotent(const RingElement& a) { return a * a == a; }

RingElement local_unit_for(const RingPtr& ring, const std::vector<RingElement>& elements) {
  if (!ring->has_local_unit_rule())
    throw DomainError("ring " + ring->name() + " has no local-unit rule");
  std::set<SymbolId> idems;
  for (auto& e : elements) {
    if (e.ring() != ring) throw RingMismatch("local_unit_for");
    for (auto& t : e.terms())
      for (auto s : ring->local_unit_symbols(t.sym)) idems.insert(s);
  }
  std::vector<Term> terms;
  for (auto s : idems) terms.push_back({s, 1});
  return RingElement::from_ids(ring, std::move(terms));
}

}  // namespace pimsner
