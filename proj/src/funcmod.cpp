#include "pimsner/funcmod.hpp"

#include <set>
#include <sstream>
#include <tuple>

#include "pimsner/abgroup.hpp"
#include "pimsner/error.hpp"

namespace pimsner {

namespace {

void same_module(const ModulePtr& a, const ModulePtr& b, const char* where) {
  if (a != b) throw ModuleMismatch(where);
}

template <class Map>
void add_into(Map& comps, std::size_t key, const RingElement& r) {
  if (r.is_zero()) return;
  auto it = comps.find(key);
  if (it == comps.end()) {
    comps.emplace(key, r);
    return;
  }
  it->second += r;
  if (it->second.is_zero()) comps.erase(it);
}

}  // namespace

// ---------------------------------------------------------------------------

ModulePtr FunctionalModule::create(RingPtr ring, std::string name, std::vector<Generator> x,
                                   std::vector<Generator> xp, const PairingFn& pairing) {
  std::shared_ptr<FunctionalModule> m(new FunctionalModule());
  m->ring_ = std::move(ring);
  m->name_ = std::move(name);
  for (auto* gens : {&x, &xp}) {
    auto& pos = gens == &x ? m->x_pos_ : m->xp_pos_;
    for (std::size_t i = 0; i < gens->size(); ++i) {
      const Generator& g = (*gens)[i];
      if (pos.count(g.name)) throw SemanticError(g.name, "duplicate generator");
      if (g.support.ring() != m->ring_) throw RingMismatch("generator support");
      if (!is_idempotent(g.support)) throw DomainError("support of " + g.name + " is not idempotent");
      pos[g.name] = i;
    }
  }
  m->x_ = std::move(x);
  m->xp_ = std::move(xp);
  m->table_.assign(m->xp_.size(), std::vector<RingElement>(m->x_.size(), RingElement(m->ring_)));
  for (std::size_t bp = 0; bp < m->xp_.size(); ++bp)
    for (std::size_t b = 0; b < m->x_.size(); ++b) {
      RingElement v = pairing(bp, b);
      if (v.ring() != m->ring_) throw RingMismatch("pairing table");
      if (m->xp_[bp].support * v * m->x_[b].support != v)
        throw DomainError("pairing entry g(" + m->xp_[bp].name + ", " + m->x_[b].name +
                          ") is not balanced against the supports");
      m->table_[bp][b] = std::move(v);
    }
  return m;
}

std::size_t FunctionalModule::x_index(const std::string& name) const {
  auto it = x_pos_.find(name);
  if (it == x_pos_.end()) throw SemanticError(name, "no such generator of X in " + name_);
  return it->second;
}

std::size_t FunctionalModule::xp_index(const std::string& name) const {
  auto it = xp_pos_.find(name);
  if (it == xp_pos_.end()) throw SemanticError(name, "no such generator of X' in " + name_);
  return it->second;
}

// ---------------------------------------------------------------------------

XVector XVector::basis(const ModulePtr& m, std::size_t b) {
  return make(m, b, m->x_gens().at(b).support);
}

XVector XVector::make(const ModulePtr& m, std::size_t b, const RingElement& r) {
  XVector v(m);
  v.add_term(b, r);
  return v;
}

void XVector::add_term(std::size_t b, const RingElement& r) {
  add_into(comps_, b, module_->x_gens().at(b).support * r);
}

std::string XVector::to_string() const {
  if (comps_.empty()) return "0";
  std::string s;
  for (auto& [b, r] : comps_) {
    if (!s.empty()) s += " + ";
    s += module_->x_gens()[b].name + "*(" + r.to_string() + ")";
  }
  return s;
}

XVector XVector::operator+(const XVector& o) const {
  if (!module_) return o;
  if (!o.module_) return *this;
  same_module(module_, o.module_, "X-vector sum");
  XVector r = *this;
  for (auto& [b, c] : o.comps_) add_into(r.comps_, b, c);
  return r;
}

XVector XVector::operator-(const XVector& o) const { return *this + o.scaled(-1); }

XVector XVector::scaled(const mpq_class& c) const {
  XVector r(module_);
  for (auto& [b, v] : comps_) add_into(r.comps_, b, v.scaled(c));
  return r;
}

XVector XVector::operator*(const RingElement& rr) const {
  XVector r(module_);
  for (auto& [b, v] : comps_) add_into(r.comps_, b, v * rr);
  return r;
}

bool XVector::operator==(const XVector& o) const {
  if (module_ && o.module_) same_module(module_, o.module_, "X-vector comparison");
  return (*this - o).is_zero();
}

XpVector XpVector::basis(const ModulePtr& m, std::size_t b) {
  return make(m, b, m->xp_gens().at(b).support);
}

XpVector XpVector::make(const ModulePtr& m, std::size_t b, const RingElement& r) {
  XpVector v(m);
  v.add_term(b, r);
  return v;
}

void XpVector::add_term(std::size_t b, const RingElement& r) {
  add_into(comps_, b, r * module_->xp_gens().at(b).support);
}

std::string XpVector::to_string() const {
  if (comps_.empty()) return "0";
  std::string s;
  for (auto& [b, r] : comps_) {
    if (!s.empty()) s += " + ";
    s += "(" + r.to_string() + ")*" + module_->xp_gens()[b].name;
  }
  return s;
}

XpVector XpVector::operator+(const XpVector& o) const {
  if (!module_) return o;
  if (!o.module_) return *this;
  same_module(module_, o.module_, "X'-vector sum");
  XpVector r = *this;
  for (auto& [b, c] : o.comps_) add_into(r.comps_, b, c);
  return r;
}

XpVector XpVector::operator-(const XpVector& o) const { return *this + o.scaled(-1); }

XpVector XpVector::scaled(const mpq_class& c) const {
  XpVector r(module_);
  for (auto& [b, v] : comps_) add_into(r.comps_, b, v.scaled(c));
  return r;
}

bool XpVector::operator==(const XpVector& o) const {
  if (module_ && o.module_) same_module(module_, o.module_, "X'-vector comparison");
  return (*this - o).is_zero();
}

XpVector operator*(const RingElement& r, const XpVector& v) {
  XpVector out(v.module());
  for (auto& [b, c] : v.components()) out.add_term(b, r * c);
  return out;
}

RingElement pair(const XpVector& phi, const XVector& x) {
  same_module(phi.module(), x.module(), "pair");
  const auto& m = phi.module();
  RingElement out(m->ring());
  for (auto& [bp, l] : phi.components())
    for (auto& [b, r] : x.components()) {
      const RingElement& g = m->g(bp, b);
      if (!g.is_zero()) out += l * g * r;
    }
  return out;
}

// ---------------------------------------------------------------------------

void CompactOperator::add_entry(std::size_t b, std::size_t bp, const RingElement& c) {
  RingElement v = module_->x_gens().at(b).support * c * module_->xp_gens().at(bp).support;
  if (v.is_zero()) return;
  auto key = Key{b, bp};
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    entries_.emplace(key, std::move(v));
    return;
  }
  it->second += v;
  if (it->second.is_zero()) entries_.erase(it);
}

CompactOperator CompactOperator::elementary(const XVector& x, const XpVector& phi) {
  same_module(x.module(), phi.module(), "elementary tensor");
  CompactOperator k(x.module());
  for (auto& [b, r] : x.components())
    for (auto& [bp, s] : phi.components()) k.add_entry(b, bp, r * s);
  return k;
}

std::string CompactOperator::to_string() const {
  if (entries_.empty()) return "0";
  std::string s;
  for (auto& [key, c] : entries_) {
    if (!s.empty()) s += " + ";
    s += module_->x_gens()[key.first].name + " (x) (" + c.to_string() + ") " +
         module_->xp_gens()[key.second].name;
  }
  return s;
}

CompactOperator CompactOperator::operator+(const CompactOperator& o) const {
  if (!module_) return o;
  if (!o.module_) return *this;
  same_module(module_, o.module_, "compact sum");
  CompactOperator r = *this;
  for (auto& [key, c] : o.entries_) r.add_entry(key.first, key.second, c);
  return r;
}

CompactOperator CompactOperator::operator-(const CompactOperator& o) const {
  CompactOperator neg(o.module_);
  for (auto& [key, c] : o.entries_) neg.add_entry(key.first, key.second, -c);
  return *this + neg;
}

CompactOperator CompactOperator::operator*(const CompactOperator& o) const {
  if (!module_ || !o.module_) return CompactOperator(module_ ? module_ : o.module_);
  same_module(module_, o.module_, "compact_mul");
  CompactOperator r(module_);
  for (auto& [k1, c1] : entries_)
    for (auto& [k2, c2] : o.entries_) {
      const RingElement& g = module_->g(k1.second, k2.first);
      if (g.is_zero()) continue;
      r.add_entry(k1.first, k2.second, c1 * g * c2);
    }
  return r;
}

bool CompactOperator::operator==(const CompactOperator& o) const {
  return (*this - o).is_zero();
}

CompactOperator compact_mul(const CompactOperator& a, const CompactOperator& b) { return a * b; }

XVector theta_apply(const CompactOperator& k, const XVector& y) {
  if (!k.module()) return XVector(y.module());
  same_module(k.module(), y.module(), "theta_apply");
  const auto& m = k.module();
  XVector out(m);
  std::map<std::size_t, RingElement> phi_y;
  for (auto& [key, c] : k.entries()) {
    auto it = phi_y.find(key.second);
    if (it == phi_y.end())
      it = phi_y.emplace(key.second, pair(XpVector::basis(m, key.second), y)).first;
    if (!it->second.is_zero()) out.add_term(key.first, c * it->second);
  }
  return out;
}

XpVector theta_apply_right(const XpVector& psi, const CompactOperator& k) {
  if (!k.module()) return XpVector(psi.module());
  same_module(k.module(), psi.module(), "theta_apply_right");
  const auto& m = k.module();
  XpVector out(m);
  std::map<std::size_t, RingElement> psi_x;
  for (auto& [key, c] : k.entries()) {
    auto it = psi_x.find(key.first);
    if (it == psi_x.end())
      it = psi_x.emplace(key.first, pair(psi, XVector::basis(m, key.first))).first;
    if (!it->second.is_zero()) out.add_term(key.second, it->second * c);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

using RowKey = std::tuple<std::size_t, std::size_t, SymbolId>;
using Flat = std::map<RowKey, mpq_class>;

void flatten_into(Flat& out, std::size_t eq, const std::map<std::size_t, RingElement>& comps) {
  for (auto& [g, r] : comps)
    for (auto& t : r.terms()) out[RowKey{eq, g, t.sym}] += t.coeff;
}

void collect_symbols(std::set<SymbolId>& out, const RingElement& r) {
  for (auto& t : r.terms()) out.insert(t.sym);
}

// Finds c_{b,b'} in the k-span of `cand` with evaluate(theta) == target.
// evaluate must be linear in theta.
std::optional<CompactOperator> solve_compact(const ModulePtr& m, const std::set<std::size_t>& bs,
                                             const std::set<std::size_t>& bps,
                                             const std::set<SymbolId>& cand_in,
                                             const std::function<Flat(const CompactOperator&)>& evaluate,
                                             const Flat& target) {
  const RingPtr& ring = m->ring();
  std::set<SymbolId> cand = cand_in;
  for (SymbolId s : cand_in)
    for (SymbolId u : ring->local_unit_symbols(s)) cand.insert(u);

  struct Unknown {
    std::size_t b, bp;
    RingElement c;
  };
  std::vector<Unknown> unknowns;
  std::vector<Flat> columns;
  for (std::size_t b : bs)
    for (std::size_t bp : bps)
      for (SymbolId s : cand) {
        CompactOperator unit(m);
        RingElement c = RingElement::from_ids(ring, {{s, 1}});
        unit.add_entry(b, bp, c);
        if (unit.is_zero()) continue;
        Flat col = evaluate(unit);
        if (col.empty()) continue;
        unknowns.push_back({b, bp, c});
        columns.push_back(std::move(col));
      }

  std::map<RowKey, std::size_t> rows;
  for (auto& [k, v] : target)
    if (v != 0) rows.emplace(k, rows.size());
  for (auto& col : columns)
    for (auto& [k, v] : col)
      if (v != 0) rows.emplace(k, rows.size());

  RationalRows a(rows.size(), std::vector<mpq_class>(unknowns.size(), 0));
  std::vector<mpq_class> rhs(rows.size(), 0);
  const CoeffRing& k = ring->coeff();
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (auto& [key, v] : columns[j]) a[rows.at(key)][j] = k.normalize(v);
  for (auto& [key, v] : target)
    if (v != 0) rhs[rows.at(key)] = k.normalize(v);

  auto sol = solve_linear(a, unknowns.size(), rhs, k);
  if (!sol) return std::nullopt;
  CompactOperator theta(m);
  for (std::size_t j = 0; j < unknowns.size(); ++j)
    if ((*sol)[j] != 0) theta.add_entry(unknowns[j].b, unknowns[j].bp, unknowns[j].c.scaled((*sol)[j]));
  Flat got = evaluate(theta);
  Flat diff = target;
  for (auto& [key, v] : got) diff[key] -= v;
  for (auto& [key, v] : diff)
    if (k.normalize(v) != 0) return std::nullopt;
  return theta;
}

}  // namespace

FsWitness fs_witness(const ModulePtr& m, const std::vector<XVector>& xs,
                     const std::vector<XpVector>& phis) {
  for (auto& x : xs) same_module(m, x.module(), "fs_witness");
  for (auto& p : phis) same_module(m, p.module(), "fs_witness");
  FsWitness w;
  w.theta1 = CompactOperator(m);
  w.theta2 = CompactOperator(m);

  if (!xs.empty()) {
    std::set<std::size_t> bs, bps;
    std::set<SymbolId> cand;
    Flat target;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      flatten_into(target, i, xs[i].components());
      for (auto& [b, r] : xs[i].components()) {
        bs.insert(b);
        collect_symbols(cand, r);
        collect_symbols(cand, m->x_gens()[b].support);
        for (std::size_t bp = 0; bp < m->xp_gens().size(); ++bp)
          if (!m->g(bp, b).is_zero()) {
            bps.insert(bp);
            collect_symbols(cand, m->g(bp, b));
            collect_symbols(cand, m->xp_gens()[bp].support);
          }
      }
    }
    auto eval = [&](const CompactOperator& t) {
      Flat f;
      for (std::size_t i = 0; i < xs.size(); ++i) flatten_into(f, i, theta_apply(t, xs[i]).components());
      return f;
    };
    auto sol = solve_compact(m, bs, bps, cand, eval, target);
    if (!sol) {
      w.detail = "no compact operator fixes the given vectors";
      return w;
    }
    w.theta1 = *sol;
  }

  if (!phis.empty()) {
    std::set<std::size_t> bs, bps;
    std::set<SymbolId> cand;
    Flat target;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      flatten_into(target, i, phis[i].components());
      for (auto& [bp, r] : phis[i].components()) {
        bps.insert(bp);
        collect_symbols(cand, r);
        collect_symbols(cand, m->xp_gens()[bp].support);
        for (std::size_t b = 0; b < m->x_gens().size(); ++b)
          if (!m->g(bp, b).is_zero()) {
            bs.insert(b);
            collect_symbols(cand, m->g(bp, b));
            collect_symbols(cand, m->x_gens()[b].support);
          }
      }
    }
    auto eval = [&](const CompactOperator& t) {
      Flat f;
      for (std::size_t i = 0; i < phis.size(); ++i)
        flatten_into(f, i, theta_apply_right(phis[i], t).components());
      return f;
    };
    auto sol = solve_compact(m, bs, bps, cand, eval, target);
    if (!sol) {
      w.detail = "no compact operator fixes the given functionals";
      return w;
    }
    w.theta2 = *sol;
  }
  w.found = true;
  return w;
}

bool check_nondegenerate(const ModulePtr& m) {
  const RingPtr& ring = m->ring();
  auto span_symbols = [&](const RingElement& support) {
    std::set<SymbolId> s;
    for (auto& t : support.terms()) {
      s.insert(t.sym);
      for (SymbolId u : ring->local_unit_symbols(t.sym)) s.insert(u);
    }
    return s;
  };
  std::vector<XVector> xv;
  std::vector<XpVector> pv;
  for (std::size_t b = 0; b < m->x_gens().size(); ++b)
    for (SymbolId s : span_symbols(m->x_gens()[b].support)) {
      XVector v = XVector::make(m, b, RingElement::from_ids(ring, {{s, 1}}));
      if (!v.is_zero()) xv.push_back(v);
    }
  for (std::size_t b = 0; b < m->xp_gens().size(); ++b)
    for (SymbolId s : span_symbols(m->xp_gens()[b].support)) {
      XpVector v = XpVector::make(m, b, RingElement::from_ids(ring, {{s, 1}}));
      if (!v.is_zero()) pv.push_back(v);
    }
  // rows indexed by (other side element, ring symbol)
  auto build = [&](bool x_columns) {
    std::map<std::pair<std::size_t, SymbolId>, std::size_t> rows;
    std::vector<std::vector<std::pair<std::size_t, mpq_class>>> cols;
    const std::size_t ncols = x_columns ? xv.size() : pv.size();
    const std::size_t nother = x_columns ? pv.size() : xv.size();
    for (std::size_t j = 0; j < ncols; ++j) {
      std::vector<std::pair<std::size_t, mpq_class>> col;
      for (std::size_t i = 0; i < nother; ++i) {
        RingElement v = x_columns ? pair(pv[i], xv[j]) : pair(pv[j], xv[i]);
        for (auto& t : v.terms()) {
          auto key = std::make_pair(i, t.sym);
          auto it = rows.emplace(key, rows.size()).first;
          col.emplace_back(it->second, t.coeff);
        }
      }
      cols.push_back(std::move(col));
    }
    RationalRows a(rows.size(), std::vector<mpq_class>(ncols, 0));
    for (std::size_t j = 0; j < ncols; ++j)
      for (auto& [r, v] : cols[j]) a[r][j] = v;
    return has_trivial_kernel(a, ncols, ring->coeff());
  };
  return build(true) && build(false);
}

// ---------------------------------------------------------------------------

XVector FunctionalHom::apply_u(const XVector& x) const {
  same_module(source, x.module(), "functional hom U");
  XVector out(target);
  for (auto& [b, r] : x.components()) out = out + U.at(b) * r;
  return out;
}

XpVector FunctionalHom::apply_v(const XpVector& phi) const {
  same_module(source, phi.module(), "functional hom V");
  XpVector out(target);
  for (auto& [bp, r] : phi.components()) out = out + r * V.at(bp);
  return out;
}

FunctionalHom identity_hom(const ModulePtr& m) {
  FunctionalHom h{m, m, {}, {}};
  for (std::size_t b = 0; b < m->x_gens().size(); ++b) h.U.push_back(XVector::basis(m, b));
  for (std::size_t b = 0; b < m->xp_gens().size(); ++b) h.V.push_back(XpVector::basis(m, b));
  return h;
}

bool check_functional_hom(const FunctionalHom& h) {
  if (!h.source || !h.target || h.source->ring() != h.target->ring()) return false;
  if (h.U.size() != h.source->x_gens().size() || h.V.size() != h.source->xp_gens().size())
    return false;
  for (auto& u : h.U)
    if (u.module() != h.target) return false;
  for (auto& v : h.V)
    if (v.module() != h.target) return false;
  for (std::size_t bp = 0; bp < h.V.size(); ++bp)
    for (std::size_t b = 0; b < h.U.size(); ++b)
      if (pair(h.V[bp], h.U[b]) != h.source->g(bp, b)) return false;
  return true;
}

CompactOperator induced_compact_map(const FunctionalHom& h, const CompactOperator& k) {
  if (k.module() && k.module() != h.source) throw ModuleMismatch("induced_compact_map");
  CompactOperator out(h.target);
  for (auto& [key, c] : k.entries())
    out = out + CompactOperator::elementary(h.U.at(key.first) * c, h.V.at(key.second));
  return out;
}

// ---------------------------------------------------------------------------

std::string free_generator_name(const std::string& i, const std::string& a) { return i + "@" + a; }

ModulePtr make_ring_module(const RingPtr& ring) {
  std::vector<Generator> gens;
  for (auto& a : ring->idempotent_decomposition())
    gens.push_back({a, RingElement::basis(ring, a)});
  if (gens.empty()) throw DomainError("ring " + ring->name() + " has no idempotent decomposition");
  std::vector<Generator> copy = gens;
  return FunctionalModule::create(ring, ring->name(), gens, copy,
                                  [&](std::size_t bp, std::size_t b) {
                                    return bp == b ? gens[b].support : RingElement(ring);
                                  });
}

ModulePtr make_free_module(const RingPtr& ring, const std::vector<std::string>& index) {
  auto decomposition = ring->idempotent_decomposition();
  if (decomposition.empty())
    throw DomainError("ring " + ring->name() + " has no idempotent decomposition");
  std::vector<Generator> gens;
  for (auto& i : index)
    for (auto& a : decomposition)
      gens.push_back({free_generator_name(i, a), RingElement::basis(ring, a)});
  std::vector<Generator> copy = gens;
  return FunctionalModule::create(ring, ring->name() + "^(I)", gens, copy,
                                  [&](std::size_t bp, std::size_t b) {
                                    return bp == b ? gens[b].support : RingElement(ring);
                                  });
}

ModulePtr direct_sum(const ModulePtr& a, const ModulePtr& b) {
  if (a->ring() != b->ring()) throw RingMismatch("direct_sum");
  std::vector<Generator> x, xp;
  for (auto& g : a->x_gens()) x.push_back({"1." + g.name, g.support});
  for (auto& g : b->x_gens()) x.push_back({"2." + g.name, g.support});
  for (auto& g : a->xp_gens()) xp.push_back({"1." + g.name, g.support});
  for (auto& g : b->xp_gens()) xp.push_back({"2." + g.name, g.support});
  const std::size_t na = a->x_gens().size(), npa = a->xp_gens().size();
  const RingPtr ring = a->ring();
  return FunctionalModule::create(ring, a->name() + " + " + b->name(), x, xp,
                                  [&](std::size_t bp, std::size_t bb) {
                                    if (bp < npa && bb < na) return a->g(bp, bb);
                                    if (bp >= npa && bb >= na) return b->g(bp - npa, bb - na);
                                    return RingElement(ring);
                                  });
}

// ---------------------------------------------------------------------------

CorrespondencePtr Correspondence::create(ModulePtr module, LeftAction left, RightAction right,
                                         std::optional<FunctionalHom> hom,
                                         std::vector<RingElement> ideal, std::string name) {
  std::shared_ptr<Correspondence> c(new Correspondence());
  c->module_ = std::move(module);
  c->left_fn_ = std::move(left);
  c->right_fn_ = std::move(right);
  if (hom && hom->source != c->module_) throw ModuleMismatch("correspondence hom");
  c->hom_ = std::move(hom);
  for (auto& i : ideal)
    if (i.ring() != c->module_->ring()) throw RingMismatch("correspondence ideal");
  c->ideal_ = std::move(ideal);
  c->name_ = std::move(name);
  return c;
}

const XVector& Correspondence::left_gen(SymbolId s, std::size_t b) const {
  auto key = std::make_pair(s, b);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = left_cache_.find(key);
    if (it != left_cache_.end()) return it->second;
  }
  XVector v = left_fn_(ring()->symbol(s), b);
  if (v.module() && v.module() != module_) throw ModuleMismatch("left action table");
  if (!v.module()) v = XVector(module_);
  std::lock_guard<std::mutex> lock(mu_);
  return left_cache_.emplace(key, std::move(v)).first->second;
}

const XpVector& Correspondence::right_gen(std::size_t bp, SymbolId s) const {
  auto key = std::make_pair(bp, s);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = right_cache_.find(key);
    if (it != right_cache_.end()) return it->second;
  }
  XpVector v = right_fn_(bp, ring()->symbol(s));
  if (v.module() && v.module() != module_) throw ModuleMismatch("right action table");
  if (!v.module()) v = XpVector(module_);
  std::lock_guard<std::mutex> lock(mu_);
  return right_cache_.emplace(key, std::move(v)).first->second;
}

XVector Correspondence::left(const RingElement& r, const XVector& x) const {
  if (r.ring() != ring()) throw RingMismatch("left action");
  same_module(module_, x.module(), "left action");
  XVector out(module_);
  for (auto& t : r.terms())
    for (auto& [b, c] : x.components()) {
      const XVector& sb = left_gen(t.sym, b);
      if (!sb.is_zero()) out = out + (sb * c).scaled(t.coeff);
    }
  return out;
}

XpVector Correspondence::right(const XpVector& phi, const RingElement& r) const {
  if (r.ring() != ring()) throw RingMismatch("right action");
  same_module(module_, phi.module(), "right action");
  XpVector out(module_);
  for (auto& t : r.terms())
    for (auto& [bp, c] : phi.components()) {
      const XpVector& bs = right_gen(bp, t.sym);
      if (!bs.is_zero()) out = out + (c * bs).scaled(t.coeff);
    }
  return out;
}

bool Correspondence::check_adjointable() const {
  const auto& m = module_;
  for (auto& sname : ring()->generators()) {
    SymbolId s = ring()->intern(sname);
    for (std::size_t bp = 0; bp < m->xp_gens().size(); ++bp)
      for (std::size_t b = 0; b < m->x_gens().size(); ++b)
        if (pair(right_gen(bp, s), XVector::basis(m, b)) != pair(XpVector::basis(m, bp), left_gen(s, b)))
          return false;
  }
  return true;
}

bool Correspondence::check_left_module() const {
  auto gens = ring()->generators();
  for (auto& sn : gens)
    for (auto& tn : gens) {
      RingElement s = RingElement::basis(ring(), sn), t = RingElement::basis(ring(), tn);
      RingElement st = s * t;
      for (std::size_t b = 0; b < module_->x_gens().size(); ++b) {
        XVector x = XVector::basis(module_, b);
        if (left(s, left(t, x)) != left(st, x)) return false;
      }
      for (std::size_t bp = 0; bp < module_->xp_gens().size(); ++bp) {
        XpVector p = XpVector::basis(module_, bp);
        if (right(right(p, s), t) != right(p, st)) return false;
      }
    }
  return true;
}

bool Correspondence::check_nondegenerate_action() const {
  auto dec = ring()->idempotent_decomposition();
  if (dec.empty()) return false;
  RingElement one(ring());
  for (auto& a : dec) one += RingElement::basis(ring(), a);
  for (std::size_t b = 0; b < module_->x_gens().size(); ++b) {
    XVector x = XVector::basis(module_, b);
    if (left(one, x) != x) return false;
  }
  for (std::size_t bp = 0; bp < module_->xp_gens().size(); ++bp) {
    XpVector p = XpVector::basis(module_, bp);
    if (right(p, one) != p) return false;
  }
  return true;
}

std::optional<CompactOperator> Correspondence::try_compact(const RingElement& r) const {
  if (r.ring() != ring()) throw RingMismatch("compact left action");
  const auto& m = module_;
  if (r.is_zero()) return CompactOperator(m);
  std::set<std::size_t> bs, bps;
  std::set<SymbolId> cand;
  Flat target;
  std::vector<XVector> inputs;
  for (std::size_t b0 = 0; b0 < m->x_gens().size(); ++b0) {
    inputs.push_back(XVector::basis(m, b0));
    XVector out = left(r, inputs.back());
    flatten_into(target, b0, out.components());
    for (auto& [b, c] : out.components()) {
      bs.insert(b);
      collect_symbols(cand, c);
      collect_symbols(cand, m->x_gens()[b].support);
    }
    for (std::size_t bp = 0; bp < m->xp_gens().size(); ++bp)
      if (!m->g(bp, b0).is_zero()) {
        bps.insert(bp);
        collect_symbols(cand, m->g(bp, b0));
        collect_symbols(cand, m->xp_gens()[bp].support);
      }
  }
  auto eval = [&](const CompactOperator& t) {
    Flat f;
    for (std::size_t i = 0; i < inputs.size(); ++i) flatten_into(f, i, theta_apply(t, inputs[i]).components());
    return f;
  };
  return solve_compact(m, bs, bps, cand, eval, target);
}

CompactOperator Correspondence::compact_left_action(const RingElement& r) const {
  auto k = try_compact(r);
  if (!k) throw NotCompact();
  return *k;
}

// ---------------------------------------------------------------------------

CorrespondencePtr identity_correspondence(const RingPtr& ring) {
  ModulePtr m = make_ring_module(ring);
  auto dec = ring->idempotent_decomposition();
  std::vector<RingElement> e;
  for (auto& a : dec) e.push_back(RingElement::basis(ring, a));
  auto left = [m, e](const std::string& s, std::size_t a) {
    RingElement sa = RingElement::basis(m->ring(), s) * e[a];
    XVector out(m);
    for (std::size_t b = 0; b < e.size(); ++b) out.add_term(b, e[b] * sa);
    return out;
  };
  auto right = [m, e](std::size_t a, const std::string& s) {
    RingElement as = e[a] * RingElement::basis(m->ring(), s);
    XpVector out(m);
    for (std::size_t b = 0; b < e.size(); ++b) out.add_term(b, as * e[b]);
    return out;
  };
  ModulePtr target = make_free_module(ring, {"1"});
  FunctionalHom h{m, target, {}, {}};
  for (std::size_t a = 0; a < dec.size(); ++a) {
    h.U.push_back(XVector::basis(target, free_generator_name("1", dec[a])));
    h.V.push_back(XpVector::basis(target, free_generator_name("1", dec[a])));
  }
  return Correspondence::create(m, left, right, h, {}, "id_" + ring->name());
}

namespace {

// "i@a" -> (i, a)
std::pair<std::string, std::string> split_free_name(const std::string& s) {
  auto at = s.rfind('@');
  if (at == std::string::npos) throw DomainError("not a free-module generator: " + s);
  return {s.substr(0, at), s.substr(at + 1)};
}

}  // namespace

CorrespondencePtr tensor(const CorrespondencePtr& cx, const CorrespondencePtr& cy) {
  if (cx->ring() != cy->ring()) throw RingMismatch("tensor");
  const ModulePtr& X = cx->module();
  const ModulePtr& Y = cy->module();
  const RingPtr ring = cx->ring();

  std::vector<Generator> gens, pgens;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> xpos, ppos;
  std::vector<std::pair<std::size_t, std::size_t>> xpairs, ppairs;
  for (std::size_t b = 0; b < X->x_gens().size(); ++b)
    for (std::size_t c = 0; c < Y->x_gens().size(); ++c) {
      XVector yc = XVector::basis(Y, c);
      XVector v = cy->left(X->x_gens()[b].support, yc);
      if (v.is_zero()) continue;
      if (v != yc)
        throw DomainError("tensor: left action is not diagonal on generator " + Y->x_gens()[c].name);
      xpos[{b, c}] = gens.size();
      xpairs.push_back({b, c});
      gens.push_back({X->x_gens()[b].name + "(x)" + Y->x_gens()[c].name, Y->x_gens()[c].support});
    }
  for (std::size_t cp = 0; cp < Y->xp_gens().size(); ++cp)
    for (std::size_t bp = 0; bp < X->xp_gens().size(); ++bp) {
      XpVector yc = XpVector::basis(Y, cp);
      XpVector v = cy->right(yc, X->xp_gens()[bp].support);
      if (v.is_zero()) continue;
      if (v != yc)
        throw DomainError("tensor: right action is not diagonal on generator " + Y->xp_gens()[cp].name);
      ppos[{cp, bp}] = pgens.size();
      ppairs.push_back({cp, bp});
      pgens.push_back({Y->xp_gens()[cp].name + "(x)" + X->xp_gens()[bp].name, Y->xp_gens()[cp].support});
    }

  ModulePtr T = FunctionalModule::create(
      ring, X->name() + " (x) " + Y->name(), gens, pgens, [&](std::size_t p, std::size_t q) {
        auto [cp, bp] = ppairs[p];
        auto [b, c] = xpairs[q];
        return pair(XpVector::basis(Y, cp), cy->left(X->g(bp, b), XVector::basis(Y, c)));
      });

  auto left = [T, cx, cy, xpos, xpairs](const std::string& s, std::size_t q) {
    const RingPtr& R = cx->ring();
    auto [b, c] = xpairs[q];
    XVector out(T);
    const XVector& sb = cx->left_gen(R->intern(s), b);
    for (auto& [b2, r] : sb.components()) {
      XVector yc = cy->left(r, XVector::basis(cy->module(), c));
      for (auto& [c3, t] : yc.components()) {
        auto it = xpos.find({b2, c3});
        if (it == xpos.end()) throw DomainError("tensor: left action leaves the generator span");
        out.add_term(it->second, t);
      }
    }
    return out;
  };
  auto right = [T, cx, cy, ppos, ppairs](std::size_t p, const std::string& s) {
    const RingPtr& R = cx->ring();
    auto [cp, bp] = ppairs[p];
    XpVector out(T);
    const XpVector& bs = cx->right_gen(bp, R->intern(s));
    for (auto& [b2, r] : bs.components()) {
      XpVector yc = cy->right(XpVector::basis(cy->module(), cp), r);
      for (auto& [c3, t] : yc.components()) {
        auto it = ppos.find({c3, b2});
        if (it == ppos.end()) throw DomainError("tensor: right action leaves the generator span");
        out.add_term(it->second, t);
      }
    }
    return out;
  };

  std::optional<FunctionalHom> hom;
  if (cx->hom() && cy->hom()) {
    const FunctionalHom& hx = *cx->hom();
    const FunctionalHom& hy = *cy->hom();
    std::vector<std::string> I, J;
    std::set<std::string> seen_i, seen_j;
    for (auto& g : hx.target->x_gens()) {
      auto i = split_free_name(g.name).first;
      if (seen_i.insert(i).second) I.push_back(i);
    }
    for (auto& g : hy.target->x_gens()) {
      auto j = split_free_name(g.name).first;
      if (seen_j.insert(j).second) J.push_back(j);
    }
    std::vector<std::string> IJ;
    for (auto& i : I)
      for (auto& j : J) IJ.push_back(i + "," + j);
    ModulePtr target = make_free_module(ring, IJ);
    FunctionalHom h{T, target, {}, {}};
    for (auto [b, c] : xpairs) {
      XVector out(target);
      for (auto& [gi, u] : hx.U[b].components()) {
        auto i = split_free_name(hx.target->x_gens()[gi].name).first;
        XVector y = hy.apply_u(cy->left(u, XVector::basis(Y, c)));
        for (auto& [gj, w] : y.components()) {
          auto [j, a] = split_free_name(hy.target->x_gens()[gj].name);
          out.add_term(target->x_index(free_generator_name(i + "," + j, a)), w);
        }
      }
      h.U.push_back(out);
    }
    for (auto [cp, bp] : ppairs) {
      XpVector out(target);
      for (auto& [gi, v] : hx.V[bp].components()) {
        auto i = split_free_name(hx.target->xp_gens()[gi].name).first;
        XpVector y = hy.apply_v(cy->right(XpVector::basis(Y, cp), v));
        for (auto& [gj, w] : y.components()) {
          auto [j, a] = split_free_name(hy.target->xp_gens()[gj].name);
          out.add_term(target->xp_index(free_generator_name(i + "," + j, a)), w);
        }
      }
      h.V.push_back(out);
    }
    hom = std::move(h);
  }
  return Correspondence::create(T, left, right, hom, cx->ideal(), cx->name() + " (x) " + cy->name());
}

}  // namespace pimsner
