#include "pimsner/fock.hpp"

#include <algorithm>
#include <sstream>

#include "pimsner/error.hpp"

namespace pimsner {

namespace {

Tuple concat(std::uint32_t head, const Tuple& tail) {
  Tuple t;
  t.reserve(tail.size() + 1);
  t.push_back(head);
  t.insert(t.end(), tail.begin(), tail.end());
  return t;
}

Tuple concat(const Tuple& init, std::uint32_t last) {
  Tuple t = init;
  t.push_back(last);
  return t;
}

void same_fock(const FockPtr& a, const FockPtr& b, const char* where) {
  if (a != b) throw ModuleMismatch(where);
}

}  // namespace

// ---------------------------------------------------------------------------
// FockVector

FockVector FockVector::basis(const FockPtr& f, Side s, const FockKey& k) {
  FockVector v(f, s);
  v.add_term(k, f->support(s, k));
  return v;
}

FockVector FockVector::from_ring(const FockPtr& f, Side s, const RingElement& r) {
  if (r.ring() != f->ring()) throw RingMismatch("fock degree 0");
  FockVector v(f, s);
  for (std::uint32_t a = 0; a < f->degree0().size(); ++a) v.add_term({0, {a}}, r);
  return v;
}

FockVector FockVector::from_x(const FockPtr& f, const XVector& x) {
  if (x.module() != f->module()) throw ModuleMismatch("fock vector");
  FockVector v(f, Side::X);
  for (auto& [b, c] : x.components()) v.add_term({1, {static_cast<std::uint32_t>(b)}}, c);
  return v;
}

FockVector FockVector::from_xp(const FockPtr& f, const XpVector& phi) {
  if (phi.module() != f->module()) throw ModuleMismatch("fock vector");
  FockVector v(f, Side::Xp);
  for (auto& [b, c] : phi.components()) v.add_term({1, {static_cast<std::uint32_t>(b)}}, c);
  return v;
}

RingElement FockVector::coefficient(const FockKey& k) const {
  auto it = terms_.find(k);
  if (it == terms_.end()) return RingElement(fock_->ring());
  return it->second;
}

FockVector FockVector::component(std::size_t degree) const {
  FockVector out(fock_, side_);
  for (auto& [k, c] : terms_)
    if (k.degree == degree) out.terms_.emplace(k, c);
  return out;
}

std::optional<std::size_t> FockVector::max_degree() const {
  std::optional<std::size_t> m;
  for (auto& [k, c] : terms_) m = std::max<std::size_t>(m.value_or(0), k.degree);
  return m;
}

std::string FockVector::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [k, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (side_ == Side::X)
      os << "[" << fock_->key_name(side_, k) << "](" << c.to_string() << ")";
    else
      os << "(" << c.to_string() << ")[" << fock_->key_name(side_, k) << "]";
  }
  return os.str();
}

void FockVector::add_term(const FockKey& k, const RingElement& c) {
  if (c.is_zero()) return;
  const RingElement& p = fock_->support(side_, k);
  RingElement n = side_ == Side::X ? p * c : c * p;
  if (n.is_zero()) return;
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(k, std::move(n));
    return;
  }
  it->second += n;
  if (it->second.is_zero()) terms_.erase(it);
}

FockVector FockVector::operator+(const FockVector& o) const {
  if (!fock_) return o;
  if (!o.fock_) return *this;
  same_fock(fock_, o.fock_, "fock vector sum");
  if (side_ != o.side_) throw DomainError("fock vectors on different sides");
  FockVector out = *this;
  for (auto& [k, c] : o.terms_) {
    auto it = out.terms_.find(k);
    if (it == out.terms_.end()) {
      out.terms_.emplace(k, c);
      continue;
    }
    it->second += c;
    if (it->second.is_zero()) out.terms_.erase(it);
  }
  return out;
}

FockVector FockVector::operator-(const FockVector& o) const { return *this + o.scaled(-1); }

FockVector FockVector::scaled(const mpq_class& c) const {
  FockVector out(fock_, side_);
  if (c == 0) return out;
  for (auto& [k, r] : terms_) {
    RingElement s = r.scaled(c);
    if (!s.is_zero()) out.terms_.emplace(k, std::move(s));
  }
  return out;
}

bool FockVector::operator==(const FockVector& o) const {
  if (terms_.empty() && o.terms_.empty()) return true;
  if (side_ != o.side_ || terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  for (auto b = o.terms_.begin(); b != o.terms_.end(); ++a, ++b)
    if (!(a->first == b->first) || a->second != b->second) return false;
  return true;
}

// ---------------------------------------------------------------------------
// TruncatedFock

FockPtr TruncatedFock::create(CorrespondencePtr c, std::size_t depth) {
  std::shared_ptr<TruncatedFock> f(new TruncatedFock());
  f->corr_ = std::move(c);
  f->depth_ = depth;
  const RingPtr& R = f->corr_->ring();
  f->units_ = R->idempotent_decomposition();
  if (f->units_.empty()) throw DomainError("ring has no idempotent decomposition");
  for (auto& u : f->units_) f->unit_elems_.push_back(RingElement::basis(R, u));

  const ModulePtr& m = f->corr_->module();
  std::size_t nx = m->x_gens().size(), np = m->xp_gens().size();
  f->next_x_.assign(nx, std::vector<bool>(nx, false));
  for (std::size_t b = 0; b < nx; ++b)
    for (std::size_t b2 = 0; b2 < nx; ++b2) {
      XVector e = XVector::basis(m, b2);
      XVector y = f->corr_->left(m->x_gens()[b].support, e);
      if (y == e)
        f->next_x_[b][b2] = true;
      else if (!y.is_zero())
        throw DomainError("left action is not diagonal on generator supports");
    }
  f->next_xp_.assign(np, std::vector<bool>(np, false));
  for (std::size_t b = 0; b < np; ++b)
    for (std::size_t b2 = 0; b2 < np; ++b2) {
      XpVector e = XpVector::basis(m, b);
      XpVector y = f->corr_->right(e, m->xp_gens()[b2].support);
      if (y == e)
        f->next_xp_[b][b2] = true;
      else if (!y.is_zero())
        throw DomainError("right action is not diagonal on generator supports");
    }

  for (int side = 0; side < 2; ++side) {
    auto& B = side == 0 ? f->basis_x_ : f->basis_xp_;
    auto& next = side == 0 ? f->next_x_ : f->next_xp_;
    std::size_t n = side == 0 ? nx : np;
    B.resize(depth + 1);
    for (std::uint32_t a = 0; a < f->units_.size(); ++a) B[0].push_back({0, {a}});
    if (depth >= 1)
      for (std::uint32_t b = 0; b < n; ++b) B[1].push_back({1, {b}});
    for (std::size_t d = 2; d <= depth; ++d)
      for (auto& k : B[d - 1])
        for (std::uint32_t b = 0; b < n; ++b)
          if (next[k.tuple.back()][b]) B[d].push_back({static_cast<std::uint32_t>(d), concat(k.tuple, b)});
  }
  return f;
}

const std::vector<FockKey>& TruncatedFock::basis(Side s, std::size_t n) const {
  if (n > depth_) throw DepthError("degree " + std::to_string(n) + " beyond truncation depth");
  return s == Side::X ? basis_x_[n] : basis_xp_[n];
}

std::size_t TruncatedFock::dimension(Side s) const {
  std::size_t n = 0;
  for (auto& b : s == Side::X ? basis_x_ : basis_xp_) n += b.size();
  return n;
}

bool TruncatedFock::valid(Side s, const Tuple& t) const {
  auto& next = s == Side::X ? next_x_ : next_xp_;
  std::size_t n = s == Side::X ? next_x_.size() : next_xp_.size();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= n) return false;
    if (i > 0 && !next[t[i - 1]][t[i]]) return false;
  }
  return true;
}

const RingElement& TruncatedFock::support(Side s, const FockKey& k) const {
  if (k.degree == 0) return unit_elems_.at(k.tuple.at(0));
  if (s == Side::X) return module()->x_gens().at(k.tuple.back()).support;
  return module()->xp_gens().at(k.tuple.front()).support;
}

std::string TruncatedFock::key_name(Side s, const FockKey& k) const {
  if (k.degree == 0) return units_.at(k.tuple.at(0));
  std::string out;
  for (std::size_t i = 0; i < k.tuple.size(); ++i) {
    if (i) out += "(x)";
    out += s == Side::X ? module()->x_gens()[k.tuple[i]].name : module()->xp_gens()[k.tuple[i]].name;
  }
  return out;
}

void TruncatedFock::check_vector(const FockVector& v, Side s, const char* where) const {
  if (v.fock().get() != this) throw ModuleMismatch(where);
  if (v.side() != s) throw DomainError(std::string(where) + ": wrong side");
}

const TruncatedFock::TupleTerms& TruncatedFock::left_tuple(SymbolId s, const Tuple& t) const {
  auto key = std::make_pair(s, t);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = left_memo_.find(key);
    if (it != left_memo_.end()) return it->second;
  }
  TupleTerms out;
  const XVector& y = corr_->left_gen(s, t[0]);
  if (t.size() == 1) {
    for (auto& [b, c] : y.components()) out.push_back({{static_cast<std::uint32_t>(b)}, c});
  } else {
    Tuple rest(t.begin() + 1, t.end());
    for (auto& [b, c] : y.components())
      for (auto& [u, d] : left_tuple(c, rest))
        if (next_x_[b][u[0]]) out.push_back({concat(static_cast<std::uint32_t>(b), u), d});
  }
  std::lock_guard<std::mutex> lock(mu_);
  return left_memo_.emplace(std::move(key), std::move(out)).first->second;
}

TruncatedFock::TupleTerms TruncatedFock::left_tuple(const RingElement& r, const Tuple& t) const {
  std::map<Tuple, RingElement> acc;
  for (auto& term : r.terms())
    for (auto& [u, d] : left_tuple(term.sym, t)) {
      auto it = acc.find(u);
      if (it == acc.end())
        acc.emplace(u, d.scaled(term.coeff));
      else
        it->second += d.scaled(term.coeff);
    }
  TupleTerms out;
  for (auto& [u, d] : acc)
    if (!d.is_zero()) out.push_back({u, d});
  return out;
}

const TruncatedFock::TupleTerms& TruncatedFock::right_tuple(const Tuple& t, SymbolId s) const {
  auto key = std::make_pair(t, s);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = right_memo_.find(key);
    if (it != right_memo_.end()) return it->second;
  }
  TupleTerms out;
  const XpVector& y = corr_->right_gen(t.back(), s);
  if (t.size() == 1) {
    for (auto& [b, c] : y.components()) out.push_back({{static_cast<std::uint32_t>(b)}, c});
  } else {
    Tuple prefix(t.begin(), t.end() - 1);
    for (auto& [b, c] : y.components())
      for (auto& [u, d] : right_tuple(prefix, c))
        if (next_xp_[u.back()][b]) out.push_back({concat(u, static_cast<std::uint32_t>(b)), d});
  }
  std::lock_guard<std::mutex> lock(mu_);
  return right_memo_.emplace(std::move(key), std::move(out)).first->second;
}

TruncatedFock::TupleTerms TruncatedFock::right_tuple(const Tuple& t, const RingElement& r) const {
  std::map<Tuple, RingElement> acc;
  for (auto& term : r.terms())
    for (auto& [u, d] : right_tuple(t, term.sym)) {
      auto it = acc.find(u);
      if (it == acc.end())
        acc.emplace(u, d.scaled(term.coeff));
      else
        it->second += d.scaled(term.coeff);
    }
  TupleTerms out;
  for (auto& [u, d] : acc)
    if (!d.is_zero()) out.push_back({u, d});
  return out;
}

FockVector TruncatedFock::left_act(const RingElement& r, const FockVector& v) const {
  if (r.ring() != ring()) throw RingMismatch("fock left action");
  if (v.fock().get() != this) throw ModuleMismatch("fock left action");
  FockVector out(self(), v.side());
  if (v.side() == Side::Xp) {
    for (auto& [k, c] : v.terms()) out.add_term(k, r * c);
    return out;
  }
  for (auto& [k, c] : v.terms()) {
    if (k.degree == 0) {
      out = out + FockVector::from_ring(self(), Side::X, r * c);
      continue;
    }
    for (auto& [u, d] : left_tuple(r, k.tuple)) out.add_term({k.degree, u}, d * c);
  }
  return out;
}

FockVector TruncatedFock::right_act(const FockVector& v, const RingElement& r) const {
  if (r.ring() != ring()) throw RingMismatch("fock right action");
  if (v.fock().get() != this) throw ModuleMismatch("fock right action");
  FockVector out(self(), v.side());
  if (v.side() == Side::X) {
    for (auto& [k, c] : v.terms()) out.add_term(k, c * r);
    return out;
  }
  for (auto& [k, c] : v.terms()) {
    if (k.degree == 0) {
      out = out + FockVector::from_ring(self(), Side::Xp, c * r);
      continue;
    }
    for (auto& [u, d] : right_tuple(k.tuple, r)) out.add_term({k.degree, u}, c * d);
  }
  return out;
}

FockVector TruncatedFock::create(const XVector& x, const FockVector& v) const {
  check_vector(v, Side::X, "creation");
  if (x.module() != module()) throw ModuleMismatch("creation");
  FockVector out(self(), Side::X);
  for (auto& [k, c] : v.terms())
    for (auto& [b, rb] : x.components()) {
      auto b32 = static_cast<std::uint32_t>(b);
      if (k.degree == 0) {
        out.add_term({1, {b32}}, rb * c);
        continue;
      }
      for (auto& [u, d] : left_tuple(rb, k.tuple))
        if (next_x_[b][u[0]]) out.add_term({k.degree + 1, concat(b32, u)}, d * c);
    }
  return out;
}

FockVector TruncatedFock::annihilate(const XpVector& phi, const FockVector& v) const {
  check_vector(v, Side::X, "annihilation");
  if (phi.module() != module()) throw ModuleMismatch("annihilation");
  FockVector out(self(), Side::X);
  std::map<std::uint32_t, RingElement> values;
  for (auto& [k, c] : v.terms()) {
    if (k.degree == 0) continue;
    auto it = values.find(k.tuple[0]);
    if (it == values.end())
      it = values.emplace(k.tuple[0], pair(phi, XVector::basis(module(), k.tuple[0]))).first;
    const RingElement& r = it->second;
    if (r.is_zero()) continue;
    if (k.degree == 1) {
      out = out + FockVector::from_ring(self(), Side::X, r * c);
      continue;
    }
    Tuple rest(k.tuple.begin() + 1, k.tuple.end());
    for (auto& [u, d] : left_tuple(r, rest)) out.add_term({k.degree - 1, u}, d * c);
  }
  return out;
}

FockVector TruncatedFock::create_star(const XVector& x, const FockVector& psi) const {
  check_vector(psi, Side::Xp, "adjoint creation");
  if (x.module() != module()) throw ModuleMismatch("adjoint creation");
  FockVector out(self(), Side::Xp);
  std::map<std::uint32_t, RingElement> values;
  for (auto& [k, c] : psi.terms()) {
    if (k.degree == 0) continue;
    auto it = values.find(k.tuple.back());
    if (it == values.end())
      it = values.emplace(k.tuple.back(), pair(XpVector::basis(module(), k.tuple.back()), x)).first;
    const RingElement& g = it->second;
    if (g.is_zero()) continue;
    if (k.degree == 1) {
      out = out + FockVector::from_ring(self(), Side::Xp, c * g);
      continue;
    }
    Tuple prefix(k.tuple.begin(), k.tuple.end() - 1);
    for (auto& [u, d] : right_tuple(prefix, g)) out.add_term({k.degree - 1, u}, c * d);
  }
  return out;
}

FockVector TruncatedFock::annihilate_star(const XpVector& phi, const FockVector& psi) const {
  check_vector(psi, Side::Xp, "adjoint annihilation");
  if (phi.module() != module()) throw ModuleMismatch("adjoint annihilation");
  FockVector out(self(), Side::Xp);
  for (auto& [k, c] : psi.terms())
    for (auto& [b, s] : phi.components()) {
      auto b32 = static_cast<std::uint32_t>(b);
      if (k.degree == 0) {
        out.add_term({1, {b32}}, c * s);
        continue;
      }
      for (auto& [u, d] : right_tuple(k.tuple, s))
        if (next_xp_[u.back()][b]) out.add_term({k.degree + 1, concat(u, b32)}, c * d);
    }
  return out;
}

FockVector TruncatedFock::truncate(const FockVector& v) const {
  FockVector out(v.fock(), v.side());
  for (auto& [k, c] : v.terms())
    if (k.degree <= depth_) out.add_term(k, c);
  return out;
}

RingElement TruncatedFock::pairing(const FockVector& psi, const FockVector& p) const {
  check_vector(psi, Side::Xp, "graded pairing");
  check_vector(p, Side::X, "graded pairing");
  const ModulePtr& m = module();
  RingElement out(ring());
  for (auto& [kp, c] : psi.terms())
    for (auto& [k, d] : p.terms()) {
      if (k.degree != kp.degree) continue;
      if (k.degree == 0) {
        out += c * d;
        continue;
      }
      std::size_t n = k.degree;
      RingElement r = m->g(kp.tuple[n - 1], k.tuple[0]);
      for (std::size_t i = 1; i < n && !r.is_zero(); ++i)
        r = pair(XpVector::basis(m, kp.tuple[n - 1 - i]), corr_->left(r, XVector::basis(m, k.tuple[i])));
      if (!r.is_zero()) out += c * r * d;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Letters and words

Letter Letter::create(const XVector& x) {
  Letter l;
  l.kind = Kind::Create;
  l.x = x;
  return l;
}

Letter Letter::annihilate(const XpVector& phi) {
  Letter l;
  l.kind = Kind::Annihilate;
  l.phi = phi;
  return l;
}

Letter Letter::scalar(const RingElement& r) {
  Letter l;
  l.kind = Kind::Scalar;
  l.r = r;
  return l;
}

int Letter::shift() const {
  int s = kind == Kind::Create ? 1 : kind == Kind::Annihilate ? -1 : 0;
  return star ? -s : s;
}

std::string Letter::to_string() const {
  std::string s;
  switch (kind) {
    case Kind::Create: s = "T[" + x.to_string() + "]"; break;
    case Kind::Annihilate: s = "T[" + phi.to_string() + "]"; break;
    case Kind::Scalar: s = "(" + r.to_string() + ")"; break;
  }
  return star ? s + "^*" : s;
}

Word adjoint(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& l : out) l.star = !l.star;
  return out;
}

Side word_side(const Word& w) {
  if (w.empty()) return Side::X;
  bool star = w.front().star;
  for (auto& l : w)
    if (l.star != star) throw DomainError("word mixes operators and adjoints");
  return star ? Side::Xp : Side::X;
}

long word_max_rise(const Word& w) {
  long cur = 0, best = 0;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    cur += it->shift();
    best = std::max(best, cur);
  }
  return best;
}

long max_input_degree(const Word& w, std::size_t depth) {
  long m = static_cast<long>(depth) - word_max_rise(w);
  return m < 0 ? -1 : m;
}

namespace {

FockVector drop_low(const FockVector& v, std::size_t min_degree) {
  FockVector out(v.fock(), v.side());
  for (auto& [k, c] : v.terms())
    if (k.degree >= min_degree) out.add_term(k, c);
  return out;
}

FockVector apply_letter(const Letter& l, const FockVector& v, Representation rep) {
  const TruncatedFock& f = *v.fock();
  if (!l.star) {
    if (v.side() != Side::X) throw DomainError("operator applied to an X' vector");
    switch (l.kind) {
      case Letter::Kind::Create:
        return f.create(l.x, rep == Representation::Pi1 ? drop_low(v, 1) : v);
      case Letter::Kind::Annihilate:
        return f.annihilate(l.phi, rep == Representation::Pi1 ? drop_low(v, 2) : v);
      case Letter::Kind::Scalar:
        return f.left_act(l.r, rep == Representation::Pi1 ? drop_low(v, 1) : v);
    }
  }
  if (rep == Representation::Pi1) throw DomainError("pi1 is defined on operators, not adjoints");
  if (v.side() != Side::Xp) throw DomainError("adjoint applied to an X vector");
  switch (l.kind) {
    case Letter::Kind::Create: return f.create_star(l.x, v);
    case Letter::Kind::Annihilate: return f.annihilate_star(l.phi, v);
    case Letter::Kind::Scalar: return f.right_act(v, l.r);
  }
  return v;
}

}  // namespace

FockVector apply_word(const Word& w, const FockVector& v, Representation rep) {
  FockVector cur = v;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    cur = v.fock()->truncate(apply_letter(*it, cur, rep));
    if (cur.is_zero()) break;
  }
  return cur;
}

// ---------------------------------------------------------------------------
// FockOperator

FockOperator FockOperator::materialize(const FockPtr& f, Side s,
                                       const std::function<FockVector(const FockVector&)>& fn,
                                       std::size_t min_degree, std::size_t max_degree) {
  FockOperator op(f, s);
  for (std::size_t n = min_degree; n <= std::min(max_degree, f->depth()); ++n)
    for (auto& k : f->basis(s, n)) {
      FockVector col = f->truncate(fn(FockVector::basis(f, s, k)));
      if (!col.is_zero()) op.cols_.emplace(k, std::move(col));
    }
  return op;
}

void FockOperator::set_column(const FockKey& k, FockVector v) {
  if (v.is_zero())
    cols_.erase(k);
  else
    cols_[k] = std::move(v);
}

FockVector FockOperator::apply(const FockVector& v) const {
  same_fock(fock_, v.fock(), "operator application");
  if (v.side() != side_) throw DomainError("operator applied on the wrong side");
  FockVector out(fock_, side_);
  for (auto& [k, c] : v.terms()) {
    auto it = cols_.find(k);
    if (it == cols_.end()) continue;
    out = out + (side_ == Side::X ? fock_->right_act(it->second, c) : fock_->left_act(c, it->second));
  }
  return fock_->truncate(out);
}

FockOperator FockOperator::compose(const FockOperator& b) const {
  same_fock(fock_, b.fock_, "operator composition");
  if (side_ != b.side_) throw DomainError("composing operators on different sides");
  FockOperator out(fock_, side_);
  for (auto& [k, col] : b.cols_) out.set_column(k, apply(col));
  if (word_ && b.word_) {
    Word w = *word_;
    w.insert(w.end(), b.word_->begin(), b.word_->end());
    out.word_ = std::move(w);
  }
  return out;
}

FockOperator FockOperator::operator+(const FockOperator& o) const {
  if (!fock_) return o;
  if (!o.fock_) return *this;
  same_fock(fock_, o.fock_, "operator sum");
  if (side_ != o.side_) throw DomainError("adding operators on different sides");
  FockOperator out = *this;
  out.word_.reset();
  for (auto& [k, col] : o.cols_) {
    auto it = out.cols_.find(k);
    out.set_column(k, it == out.cols_.end() ? col : it->second + col);
  }
  return out;
}

FockOperator FockOperator::operator-(const FockOperator& o) const { return *this + o.scaled(-1); }

FockOperator FockOperator::scaled(const mpq_class& c) const {
  FockOperator out(fock_, side_);
  for (auto& [k, col] : cols_) out.set_column(k, col.scaled(c));
  return out;
}

bool FockOperator::operator==(const FockOperator& o) const {
  if (cols_.size() != o.cols_.size()) return false;
  auto a = cols_.begin();
  for (auto b = o.cols_.begin(); b != o.cols_.end(); ++a, ++b)
    if (!(a->first == b->first) || !(a->second == b->second)) return false;
  return true;
}

bool FockOperator::is_zero() const { return cols_.empty(); }

RingElement FockOperator::entry(const FockKey& target, const FockKey& source) const {
  auto it = cols_.find(source);
  if (it == cols_.end()) return RingElement(fock_->ring());
  return it->second.coefficient(target);
}

std::set<std::pair<std::size_t, std::size_t>> FockOperator::block_support() const {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (auto& [k, col] : cols_)
    for (auto& [t, c] : col.terms()) out.insert({t.degree, k.degree});
  return out;
}

FockOperator FockOperator::restrict_source(std::size_t min_degree, std::size_t max_degree) const {
  FockOperator out(fock_, side_);
  for (auto& [k, col] : cols_)
    if (k.degree >= min_degree && k.degree <= max_degree) out.cols_.emplace(k, col);
  return out;
}

std::string FockOperator::to_string() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (auto& [k, col] : cols_) {
    if (!first) os << "; ";
    first = false;
    os << fock_->key_name(side_, k) << " -> " << col.to_string();
  }
  os << "}";
  return os.str();
}

FockOperator creation(const XVector& x, const FockPtr& f) { return pi0({Letter::create(x)}, f); }

FockOperator annihilation(const XpVector& phi, const FockPtr& f) {
  return pi0({Letter::annihilate(phi)}, f);
}

FockOperator scalar_operator(const RingElement& r, const FockPtr& f) {
  return pi0({Letter::scalar(r)}, f);
}

FockOperator adjoint(const FockOperator& op) {
  if (!op.word()) throw DomainError("adjoint is defined for word operators only");
  return pi0(adjoint(*op.word()), op.fock());
}

FockOperator pi0(const Word& w, const FockPtr& f) {
  Side s = word_side(w);
  auto op = FockOperator::materialize(
      f, s, [&](const FockVector& v) { return apply_word(w, v, Representation::Pi0); }, 0, f->depth());
  op.set_word(w);
  return op;
}

FockOperator pi1(const Word& w, const FockPtr& f) {
  if (word_side(w) != Side::X) throw DomainError("pi1 is defined on operators, not adjoints");
  return FockOperator::materialize(
      f, Side::X, [&](const FockVector& v) { return apply_word(w, v, Representation::Pi1); }, 0,
      f->depth());
}

// ---------------------------------------------------------------------------
// ToeplitzElement

void ToeplitzElement::add_term(const Key& k, const RingElement& s) {
  if (s.is_zero()) return;
  if (!fock_->valid(Side::X, k.mu) || !fock_->valid(Side::Xp, k.nu)) return;
  const ModulePtr& m = fock_->module();
  RingElement n = s;
  if (!k.mu.empty()) n = m->x_gens()[k.mu.back()].support * n;
  if (!k.nu.empty()) n = n * m->xp_gens()[k.nu.front()].support;
  if (n.is_zero()) return;
  auto it = terms_.find(k);
  if (it == terms_.end()) {
    terms_.emplace(k, std::move(n));
    return;
  }
  it->second += n;
  if (it->second.is_zero()) terms_.erase(it);
}

ToeplitzElement ToeplitzElement::scalar(const FockPtr& f, const RingElement& r) {
  if (r.ring() != f->ring()) throw RingMismatch("toeplitz scalar");
  ToeplitzElement t(f);
  t.add_term({{}, {}}, r);
  return t;
}

ToeplitzElement ToeplitzElement::creation(const FockPtr& f, const XVector& x) {
  if (x.module() != f->module()) throw ModuleMismatch("toeplitz creation");
  ToeplitzElement t(f);
  for (auto& [b, c] : x.components()) t.add_term({{static_cast<std::uint32_t>(b)}, {}}, c);
  return t;
}

ToeplitzElement ToeplitzElement::annihilation(const FockPtr& f, const XpVector& phi) {
  if (phi.module() != f->module()) throw ModuleMismatch("toeplitz annihilation");
  ToeplitzElement t(f);
  for (auto& [b, c] : phi.components()) t.add_term({{}, {static_cast<std::uint32_t>(b)}}, c);
  return t;
}

ToeplitzElement ToeplitzElement::monomial(const FockPtr& f, const Tuple& mu, const RingElement& s,
                                          const Tuple& nu) {
  ToeplitzElement t(f);
  t.add_term({mu, nu}, s);
  return t;
}

ToeplitzElement ToeplitzElement::from_word(const FockPtr& f, const Word& w) {
  if (w.empty()) throw DomainError("empty word");
  if (word_side(w) != Side::X) throw DomainError("normal form is defined on operators, not adjoints");
  std::optional<ToeplitzElement> acc;
  for (auto& l : w) {
    ToeplitzElement e = l.kind == Letter::Kind::Create        ? creation(f, l.x)
                        : l.kind == Letter::Kind::Annihilate ? annihilation(f, l.phi)
                                                              : scalar(f, l.r);
    acc = acc ? *acc * e : e;
  }
  return *acc;
}

long ToeplitzElement::max_rise() const {
  long m = 0;
  for (auto& [k, s] : terms_)
    m = std::max(m, static_cast<long>(k.mu.size()) - static_cast<long>(k.nu.size()));
  return m;
}

std::size_t ToeplitzElement::max_annihilations() const {
  std::size_t m = 0;
  for (auto& [k, s] : terms_) m = std::max(m, k.nu.size());
  return m;
}

std::string ToeplitzElement::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  const ModulePtr& m = fock_->module();
  for (auto& [k, s] : terms_) {
    if (!first) os << " + ";
    first = false;
    for (auto b : k.mu) os << "T[" << m->x_gens()[b].name << "]";
    os << "(" << s.to_string() << ")";
    for (auto b : k.nu) os << "T[" << m->xp_gens()[b].name << "]";
  }
  return os.str();
}

ToeplitzElement ToeplitzElement::operator+(const ToeplitzElement& o) const {
  if (!fock_) return o;
  if (!o.fock_) return *this;
  same_fock(fock_, o.fock_, "toeplitz sum");
  ToeplitzElement out = *this;
  for (auto& [k, s] : o.terms_) {
    auto it = out.terms_.find(k);
    if (it == out.terms_.end()) {
      out.terms_.emplace(k, s);
      continue;
    }
    it->second += s;
    if (it->second.is_zero()) out.terms_.erase(it);
  }
  return out;
}

ToeplitzElement ToeplitzElement::operator-(const ToeplitzElement& o) const {
  return *this + o.scaled(-1);
}

ToeplitzElement ToeplitzElement::scaled(const mpq_class& c) const {
  ToeplitzElement out(fock_);
  if (c == 0) return out;
  for (auto& [k, s] : terms_) out.terms_.emplace(k, s.scaled(c));
  return out;
}

bool ToeplitzElement::operator==(const ToeplitzElement& o) const {
  if (terms_.size() != o.terms_.size()) return false;
  auto a = terms_.begin();
  for (auto b = o.terms_.begin(); b != o.terms_.end(); ++a, ++b)
    if (!(a->first == b->first) || a->second != b->second) return false;
  return true;
}

ToeplitzElement ToeplitzElement::operator*(const ToeplitzElement& o) const {
  if (!fock_ || !o.fock_) return ToeplitzElement(fock_ ? fock_ : o.fock_);
  same_fock(fock_, o.fock_, "toeplitz product");
  const TruncatedFock& f = *fock_;
  const ModulePtr& m = f.module();
  ToeplitzElement out(fock_);
  for (auto& [k1, s1] : terms_)
    for (auto& [k2, s2] : o.terms_) {
      std::size_t l = k1.nu.size(), kk = k2.mu.size();
      if (l <= kk) {
        // T_nu T_mu' s' reduces to an X vector of degree kk - l.
        FockVector v(fock_, Side::X);
        if (kk == 0)
          v = FockVector::from_ring(fock_, Side::X, s2);
        else
          v.add_term({static_cast<std::uint32_t>(kk), k2.mu}, s2);
        for (std::size_t j = l; j-- > 0 && !v.is_zero();)
          v = f.annihilate(XpVector::basis(m, k1.nu[j]), v);
        if (v.is_zero()) continue;
        v = f.left_act(s1, v);
        for (std::size_t j = k1.mu.size(); j-- > 0 && !v.is_zero();)
          v = f.create(XVector::basis(m, k1.mu[j]), v);
        for (auto& [key, c] : v.terms())
          out.add_term({key.degree == 0 ? Tuple{} : key.tuple, k2.nu}, c);
      } else {
        // T_nu T_mu' reduces to an X' vector of degree l - kk.
        FockVector psi(fock_, Side::Xp);
        psi.add_term({static_cast<std::uint32_t>(l), k1.nu},
                     m->xp_gens()[k1.nu.front()].support);
        for (std::size_t j = 0; j < kk && !psi.is_zero(); ++j)
          psi = f.create_star(XVector::basis(m, k2.mu[j]), psi);
        if (psi.is_zero()) continue;
        psi = f.right_act(psi, s2);
        for (std::size_t j = 0; j < k2.nu.size() && !psi.is_zero(); ++j)
          psi = f.annihilate_star(XpVector::basis(m, k2.nu[j]), psi);
        for (auto& [key, c] : psi.terms())
          out.add_term({k1.mu, key.degree == 0 ? Tuple{} : key.tuple}, s1 * c);
      }
    }
  return out;
}

FockVector ToeplitzElement::apply(const FockVector& v) const {
  same_fock(fock_, v.fock(), "toeplitz action");
  const TruncatedFock& f = *fock_;
  const ModulePtr& m = f.module();
  FockVector out(fock_, Side::X);
  for (auto& [k, s] : terms_) {
    FockVector w = v;
    for (std::size_t j = k.nu.size(); j-- > 0 && !w.is_zero();)
      w = f.annihilate(XpVector::basis(m, k.nu[j]), w);
    if (w.is_zero()) continue;
    w = f.left_act(s, w);
    for (std::size_t j = k.mu.size(); j-- > 0 && !w.is_zero();)
      w = f.create(XVector::basis(m, k.mu[j]), w);
    out = out + w;
  }
  return out;
}

FockOperator ToeplitzElement::materialize() const {
  return FockOperator::materialize(
      fock_, Side::X, [this](const FockVector& v) { return apply(v); }, 0, fock_->depth());
}

std::vector<ToeplitzElement> test_words(const FockPtr& f, std::size_t bound) {
  std::vector<ToeplitzElement> out;
  for (std::size_t a = 0; a < f->degree0().size(); ++a)
    out.push_back(ToeplitzElement::scalar(f, f->unit(a)));
  auto tuples = [&](Side s, std::size_t n) {
    std::vector<std::pair<Tuple, std::optional<RingElement>>> t;
    if (n == 0)
      t.push_back({Tuple{}, std::nullopt});
    else
      for (auto& k : f->basis(s, n)) t.push_back({k.tuple, f->support(s, k)});
    return t;
  };
  std::size_t top = std::min(bound, f->depth());
  for (std::size_t k = 0; k <= top; ++k)
    for (std::size_t l = 0; l <= top && k + l <= bound; ++l) {
      if (k + l == 0) continue;
      auto mus = tuples(Side::X, k);
      auto nus = tuples(Side::Xp, l);
      for (auto& [mu, p] : mus)
        for (auto& [nu, q] : nus) {
          RingElement s = p && q ? *p * *q : p ? *p : *q;
          auto t = ToeplitzElement::monomial(f, mu, s, nu);
          if (!t.is_zero()) out.push_back(std::move(t));
        }
    }
  return out;
}

// ---------------------------------------------------------------------------
// Covariant representations

CovariantRep canonical_representation(const FockPtr& f) {
  CovariantRep rep;
  rep.S = [f](const XpVector& phi) { return annihilation(phi, f); };
  rep.T = [f](const XVector& x) { return creation(x, f); };
  rep.sigma = [f](const RingElement& r) { return scalar_operator(r, f); };
  return rep;
}

CheckResult covariant_check(const FockPtr& f, const CovariantRep& rep) {
  CheckResult res;
  std::size_t N = f->depth();
  for (std::size_t n = 0; n < N; ++n) res.degrees.push_back(n);
  const ModulePtr& m = f->module();
  const auto& corr = *f->correspondence();
  auto same = [&](const FockOperator& a, const FockOperator& b, const std::string& what) {
    ++res.checked;
    if (!(a.restrict_source(0, N - 1) == b.restrict_source(0, N - 1))) res.fail(what);
  };

  std::vector<FockOperator> T, S;
  for (std::size_t b = 0; b < m->x_gens().size(); ++b) T.push_back(rep.T(XVector::basis(m, b)));
  for (std::size_t b = 0; b < m->xp_gens().size(); ++b) S.push_back(rep.S(XpVector::basis(m, b)));

  for (std::size_t bp = 0; bp < S.size(); ++bp)
    for (std::size_t b = 0; b < T.size(); ++b)
      same(S[bp].compose(T[b]), rep.sigma(m->g(bp, b)),
           "sigma(phi(x)) != S(phi)T(x) at " + m->xp_gens()[bp].name + ", " + m->x_gens()[b].name);

  std::vector<std::string> names = f->ring()->generators();
  std::vector<RingElement> gens;
  for (auto& s : names) gens.push_back(RingElement::basis(f->ring(), s));
  std::vector<FockOperator> sig;
  for (auto& r : gens) sig.push_back(rep.sigma(r));
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const std::string& name = names[i];
    for (std::size_t j = 0; j < gens.size(); ++j)
      same(sig[i].compose(sig[j]), rep.sigma(gens[i] * gens[j]), "sigma not multiplicative at " + name);
    for (std::size_t b = 0; b < T.size(); ++b) {
      XVector x = XVector::basis(m, b);
      same(rep.T(x * gens[i]), T[b].compose(sig[i]), "T(x r) != T(x) sigma(r) at " + name);
      same(rep.T(corr.left(gens[i], x)), sig[i].compose(T[b]), "T(r x) != sigma(r) T(x) at " + name);
    }
    for (std::size_t bp = 0; bp < S.size(); ++bp) {
      XpVector phi = XpVector::basis(m, bp);
      same(rep.S(gens[i] * phi), sig[i].compose(S[bp]), "S(r phi) != sigma(r) S(phi) at " + name);
      same(rep.S(corr.right(phi, gens[i])), S[bp].compose(sig[i]),
           "S(phi r) != S(phi) sigma(r) at " + name);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// P0, J_{X,I} and the quasi-homomorphism

ToeplitzElement p0_element(const RingElement& i, const FockPtr& f) {
  CompactOperator k = f->correspondence()->compact_left_action(i);
  ToeplitzElement e = ToeplitzElement::scalar(f, i);
  for (auto& [key, c] : k.entries())
    e = e - ToeplitzElement::monomial(f, {static_cast<std::uint32_t>(key.first)}, c,
                                      {static_cast<std::uint32_t>(key.second)});
  return e;
}

FockOperator p0_compact_form(const RingElement& i, const FockPtr& f) {
  return p0_element(i, f).materialize();
}

FockOperator j_ideal_generator(const std::vector<XVector>& p, const RingElement& i,
                               const std::vector<XpVector>& psi, const FockPtr& f) {
  if (p.size() > f->depth() || psi.size() > f->depth())
    throw DepthError("ideal generator degree beyond truncation depth");
  ToeplitzElement e = p0_element(i, f);
  for (std::size_t j = p.size(); j-- > 0;) e = ToeplitzElement::creation(f, p[j]) * e;
  for (auto& phi : psi) e = e * ToeplitzElement::annihilation(f, phi);
  return e.materialize();
}

FockOperator quasi_hom_defect(const Word& w, const FockPtr& f) {
  if (word_side(w) != Side::X) throw DomainError("defect is defined on operators, not adjoints");
  std::size_t l = ToeplitzElement::from_word(f, w).max_annihilations();
  long top = max_input_degree(w, f->depth());
  if (top < static_cast<long>(l) + 1) throw DepthError("truncation too shallow for the word");
  // Letters map homogeneous vectors to homogeneous vectors, so on a basis
  // column pi1 follows pi0 until some letter sees a dropped input degree and
  // is zero from then on. Which columns drop depends only on their degree.
  FockOperator out(f, Side::X);
  for (long n = 0; n <= top; ++n) {
    long deg = n;
    bool dropped = false;
    for (auto it = w.rbegin(); it != w.rend() && deg >= 0; ++it) {
      long floor = it->kind == Letter::Kind::Annihilate ? 2 : 1;
      if (deg < floor) dropped = true;
      deg += it->shift();
    }
    if (!dropped) continue;
    for (auto& k : f->basis(Side::X, static_cast<std::size_t>(n)))
      out.set_column(k, apply_word(w, FockVector::basis(f, Side::X, k), Representation::Pi0));
  }
  return out;
}

CheckResult defect_support_check(const std::vector<XVector>& p, const std::vector<XpVector>& phi,
                                 const FockPtr& f) {
  CheckResult res;
  Word w;
  for (auto& x : p) w.push_back(Letter::create(x));
  for (auto& y : phi) w.push_back(Letter::annihilate(y));
  std::size_t k = p.size(), l = phi.size();
  FockOperator d = quasi_hom_defect(w, f);
  long top = max_input_degree(w, f->depth());
  for (long n = 0; n <= top; ++n) res.degrees.push_back(static_cast<std::size_t>(n));
  for (auto& blk : d.block_support())
    if (blk != std::make_pair(k, l))
      res.fail("defect block (" + std::to_string(blk.first) + "," + std::to_string(blk.second) +
               ") outside (" + std::to_string(k) + "," + std::to_string(l) + ")");

  // p (x) g~(phi_1 (x) ... (x) phi_l, q) on degree l.
  FockVector Phi;
  if (l > 0) {
    Phi = FockVector::from_xp(f, phi[0]);
    for (std::size_t j = 1; j < l; ++j) Phi = f->annihilate_star(phi[j], Phi);
  }
  for (auto& q : f->basis(Side::X, l)) {
    FockVector qv = FockVector::basis(f, Side::X, q);
    RingElement g = l == 0 ? qv.terms().begin()->second : f->pairing(Phi, qv);
    FockVector col = FockVector::from_ring(f, Side::X, g);
    for (std::size_t j = k; j-- > 0;) col = f->create(p[j], col);
    col = f->truncate(col);
    auto it = d.columns().find(q);
    FockVector got = it == d.columns().end() ? FockVector(f, Side::X) : it->second;
    ++res.checked;
    if (!(got == col)) res.fail("defect block differs from the rank-one formula at " + f->key_name(Side::X, q));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Polynomials

Poly::Poly(std::initializer_list<mpq_class> c) : c_(c) { trim(); }

void Poly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

mpq_class Poly::operator()(const mpq_class& t) const {
  mpq_class acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
  return acc;
}

Poly Poly::operator+(const Poly& o) const {
  Poly out;
  out.c_.assign(std::max(c_.size(), o.c_.size()), 0);
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) out.c_[i] += o.c_[i];
  out.trim();
  return out;
}

Poly Poly::operator-(const Poly& o) const {
  Poly neg = o;
  for (auto& c : neg.c_) c = -c;
  return *this + neg;
}

Poly Poly::operator*(const Poly& o) const {
  Poly out;
  if (c_.empty() || o.c_.empty()) return out;
  out.c_.assign(c_.size() + o.c_.size() - 1, 0);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) out.c_[i + j] += c_[i] * o.c_[j];
  out.trim();
  return out;
}

std::string Poly::to_string() const {
  if (c_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += c_[i].get_str();
    if (i == 1) out += "t";
    if (i > 1) out += "t^" + std::to_string(i);
  }
  return out;
}

bool homotopy_coefficient_identity() {
  Poly t = Poly::t(), one{1};
  Poly lhs = t * (Poly{2} * t - t * t * t) + (one - t * t) * (one - t * t);
  return lhs == one;
}

// ---------------------------------------------------------------------------
// Outer operators on T(X) (x)_R T

OuterOperator OuterOperator::lift(const FockOperator& op) {
  if (op.side() != Side::X) throw DomainError("lift expects an operator on T(X)");
  OuterOperator out(op.fock());
  for (auto& [src, col] : op.columns())
    for (auto& [tgt, c] : col.terms()) out.add_entry(tgt, src, ToeplitzElement::scalar(op.fock(), c));
  return out;
}

OuterOperator OuterOperator::lambda1(const FockPtr& f, const ToeplitzElement& tau) {
  OuterOperator out(f);
  for (std::uint32_t a = 0; a < f->degree0().size(); ++a)
    for (std::uint32_t b = 0; b < f->degree0().size(); ++b) {
      ToeplitzElement e = ToeplitzElement::scalar(f, f->unit(b)) * tau *
                          ToeplitzElement::scalar(f, f->unit(a));
      out.add_entry({0, {b}}, {0, {a}}, e);
    }
  return out;
}

void OuterOperator::add_entry(const FockKey& target, const FockKey& source, const ToeplitzElement& e) {
  if (e.is_zero()) return;
  auto& col = cols_[source];
  auto it = col.find(target);
  if (it == col.end()) {
    col.emplace(target, e);
    return;
  }
  it->second = it->second + e;
  if (it->second.is_zero()) {
    col.erase(it);
    if (col.empty()) cols_.erase(source);
  }
}

ToeplitzElement OuterOperator::entry(const FockKey& target, const FockKey& source) const {
  auto it = cols_.find(source);
  if (it == cols_.end()) return ToeplitzElement(fock_);
  auto jt = it->second.find(target);
  return jt == it->second.end() ? ToeplitzElement(fock_) : jt->second;
}

OuterOperator OuterOperator::operator+(const OuterOperator& o) const {
  if (!fock_) return o;
  if (!o.fock_) return *this;
  same_fock(fock_, o.fock_, "outer sum");
  OuterOperator out = *this;
  for (auto& [src, col] : o.cols_)
    for (auto& [tgt, e] : col) out.add_entry(tgt, src, e);
  return out;
}

OuterOperator OuterOperator::operator-(const OuterOperator& o) const { return *this + o.scaled(-1); }

OuterOperator OuterOperator::scaled(const mpq_class& c) const {
  OuterOperator out(fock_);
  if (c == 0) return out;
  for (auto& [src, col] : cols_)
    for (auto& [tgt, e] : col) out.add_entry(tgt, src, e.scaled(c));
  return out;
}

OuterOperator OuterOperator::operator*(const OuterOperator& o) const {
  if (!fock_ || !o.fock_) return OuterOperator(fock_ ? fock_ : o.fock_);
  same_fock(fock_, o.fock_, "outer composition");
  OuterOperator out(fock_);
  for (auto& [k, colb] : o.cols_)
    for (auto& [j, bjk] : colb) {
      auto it = cols_.find(j);
      if (it == cols_.end()) continue;
      for (auto& [i, aij] : it->second) out.add_entry(i, k, aij * bjk);
    }
  return out;
}

void PolyOperator::add(std::size_t power, const OuterOperator& op) {
  if (op.is_zero()) return;
  if (!fock_) fock_ = op.fock();
  auto it = c_.find(power);
  if (it == c_.end()) {
    c_.emplace(power, op);
    return;
  }
  it->second = it->second + op;
  if (it->second.is_zero()) c_.erase(it);
}

void PolyOperator::add(const Poly& p, const OuterOperator& op) {
  for (std::size_t i = 0; i < p.coeffs().size(); ++i)
    if (p.coeffs()[i] != 0) add(i, op.scaled(p.coeffs()[i]));
}

PolyOperator PolyOperator::operator+(const PolyOperator& o) const {
  PolyOperator out = *this;
  for (auto& [p, op] : o.c_) out.add(p, op);
  return out;
}

PolyOperator PolyOperator::operator-(const PolyOperator& o) const {
  PolyOperator out = *this;
  for (auto& [p, op] : o.c_) out.add(p, op.scaled(-1));
  return out;
}

PolyOperator PolyOperator::operator*(const PolyOperator& o) const {
  PolyOperator out(fock_ ? fock_ : o.fock_);
  for (auto& [p, a] : c_)
    for (auto& [q, b] : o.c_) out.add(p + q, a * b);
  return out;
}

OuterOperator PolyOperator::evaluate(const mpq_class& t) const {
  OuterOperator out(fock_);
  mpq_class pw = 1;
  std::size_t cur = 0;
  for (auto& [p, op] : c_) {
    while (cur < p) {
      pw *= t;
      ++cur;
    }
    out = out + op.scaled(pw);
  }
  return out;
}

PolyOperator homotopy_H(const Letter& generator, const FockPtr& f) {
  if (generator.star) throw DomainError("homotopy is defined on generators, not adjoints");
  PolyOperator H(f);
  Word w{generator};
  if (generator.kind == Letter::Kind::Scalar) {
    H.add(0, OuterOperator::lift(pi0(w, f)));
    return H;
  }
  FockOperator p0 = pi0(w, f), p1 = pi1(w, f);
  OuterOperator L0 = OuterOperator::lift(p0 - p1);
  OuterOperator L1 = OuterOperator::lambda1(f, ToeplitzElement::from_word(f, w));
  H.add(Poly{1, 0, -1}, L0);
  H.add(0, OuterOperator::lift(p1));
  if (generator.kind == Letter::Kind::Create)
    H.add(Poly{0, 2, 0, -1}, L1);
  else
    H.add(Poly{0, 1}, L1);
  return H;
}

CheckResult compare_outer(const OuterOperator& a, const OuterOperator& b,
                          std::size_t max_source_degree, std::size_t word_bound) {
  CheckResult res;
  FockPtr f = a.fock() ? a.fock() : b.fock();
  if (!f) return res;
  for (std::size_t n = 0; n <= std::min(max_source_degree, f->depth()); ++n) {
    res.degrees.push_back(n);
    res.checked += f->basis(Side::X, n).size();
  }
  OuterOperator diff = a - b;
  std::optional<std::vector<ToeplitzElement>> words;
  for (auto& [src, col] : diff.columns()) {
    if (src.degree > max_source_degree) continue;
    for (auto& [tgt, e] : col) {
      if (!words) words = test_words(f, word_bound);
      for (auto& tau : *words) {
        ToeplitzElement et = e * tau;
        if (et.is_zero()) continue;
        for (std::size_t n = 0; n <= f->depth(); ++n)
          for (auto& q : f->basis(Side::X, n))
            if (!et.apply(FockVector::basis(f, Side::X, q)).is_zero()) {
              res.fail("entry (" + f->key_name(Side::X, tgt) + ", " + f->key_name(Side::X, src) +
                       ") differs by " + e.to_string());
              return res;
            }
      }
    }
  }
  return res;
}

namespace {

void merge(CheckResult& into, const CheckResult& r) {
  if (!r.ok) into.fail(r.detail);
  into.checked += r.checked;
  for (auto d : r.degrees)
    if (std::find(into.degrees.begin(), into.degrees.end(), d) == into.degrees.end())
      into.degrees.push_back(d);
}

}  // namespace

CheckResult homotopy_endpoint_check(const Letter& generator, const FockPtr& f, std::size_t word_bound) {
  CheckResult res;
  PolyOperator H = homotopy_H(generator, f);
  Word w{generator};
  OuterOperator at0 = OuterOperator::lift(pi0(w, f));
  OuterOperator at1 = OuterOperator::lambda1(f, ToeplitzElement::from_word(f, w)) +
                      OuterOperator::lift(pi1(w, f));
  CheckResult r0 = compare_outer(H.evaluate(0), at0, f->depth(), word_bound);
  if (!r0.ok) r0.detail = "H(0): " + r0.detail;
  CheckResult r1 = compare_outer(H.evaluate(1), at1, f->depth(), word_bound);
  if (!r1.ok) r1.detail = "H(1): " + r1.detail;
  merge(res, r0);
  merge(res, r1);
  return res;
}

CheckResult compare_poly(const PolyOperator& a, const PolyOperator& b,
                         std::size_t max_source_degree, std::size_t word_bound) {
  CheckResult res;
  FockPtr f = a.fock() ? a.fock() : b.fock();
  std::set<std::size_t> powers;
  for (auto& [p, op] : a.coefficients()) powers.insert(p);
  for (auto& [p, op] : b.coefficients()) powers.insert(p);
  if (powers.empty()) powers.insert(0);
  for (auto p : powers) {
    auto x = a.coefficients().count(p) ? a.coefficients().at(p) : OuterOperator(f);
    auto y = b.coefficients().count(p) ? b.coefficients().at(p) : OuterOperator(f);
    CheckResult r = compare_outer(x, y, max_source_degree, word_bound);
    if (!r.ok) r.detail = "t^" + std::to_string(p) + ": " + r.detail;
    merge(res, r);
  }
  return res;
}

CheckResult homotopy_pairing_check(const XVector& x, const XpVector& phi, const FockPtr& f,
                                   std::size_t word_bound) {
  if (f->depth() < 1) throw DepthError("pairing check needs depth >= 1");
  PolyOperator lhs = homotopy_H(Letter::annihilate(phi), f) * homotopy_H(Letter::create(x), f);
  PolyOperator rhs = homotopy_H(Letter::scalar(pair(phi, x)), f);
  return compare_poly(lhs, rhs, f->depth() - 1, word_bound);
}

}  // namespace pimsner
