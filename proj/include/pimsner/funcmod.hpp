#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimsner/ring.hpp"

namespace pimsner {

// A generator b of X (or b' of X') together with its support idempotent:
// X = (+) b p_b R and X' = (+) R q_b' b'.
struct Generator {
  std::string name;
  RingElement support;
};

class FunctionalModule;
using ModulePtr = std::shared_ptr<const FunctionalModule>;

// Finitely generated functional module (X, X', g) over a ring with local units.
class FunctionalModule : public std::enable_shared_from_this<FunctionalModule> {
 public:
  using PairingFn = std::function<RingElement(std::size_t xp, std::size_t x)>;

  // Validates supports (idempotent) and that every g(b', b) = q_b' g(b', b) p_b.
  static ModulePtr create(RingPtr ring, std::string name, std::vector<Generator> x,
                          std::vector<Generator> xp, const PairingFn& pairing);

  const RingPtr& ring() const { return ring_; }
  const std::string& name() const { return name_; }
  const std::vector<Generator>& x_gens() const { return x_; }
  const std::vector<Generator>& xp_gens() const { return xp_; }
  std::size_t x_index(const std::string& name) const;
  std::size_t xp_index(const std::string& name) const;
  const RingElement& g(std::size_t xp, std::size_t x) const { return table_[xp][x]; }

 private:
  FunctionalModule() = default;
  RingPtr ring_;
  std::string name_;
  std::vector<Generator> x_, xp_;
  std::unordered_map<std::string, std::size_t> x_pos_, xp_pos_;
  std::vector<std::vector<RingElement>> table_;
};

// sum_b b * r_b with r_b = p_b r_b; zero components are not stored.
class XVector {
 public:
  XVector() = default;
  explicit XVector(ModulePtr m) : module_(std::move(m)) {}
  static XVector basis(const ModulePtr& m, std::size_t b);
  static XVector basis(const ModulePtr& m, const std::string& name) {
    return basis(m, m->x_index(name));
  }
  // b * r (normalized to b * p_b r).
  static XVector make(const ModulePtr& m, std::size_t b, const RingElement& r);

  const ModulePtr& module() const { return module_; }
  const std::map<std::size_t, RingElement>& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }
  std::string to_string() const;

  XVector operator+(const XVector& o) const;
  XVector operator-(const XVector& o) const;
  XVector scaled(const mpq_class& c) const;
  XVector operator*(const RingElement& r) const;  // right action
  bool operator==(const XVector& o) const;
  void add_term(std::size_t b, const RingElement& r);

 private:
  ModulePtr module_;
  std::map<std::size_t, RingElement> comps_;
};

// sum_b' r_b' * b' with r_b' = r_b' q_b'.
class XpVector {
 public:
  XpVector() = default;
  explicit XpVector(ModulePtr m) : module_(std::move(m)) {}
  static XpVector basis(const ModulePtr& m, std::size_t b);
  static XpVector basis(const ModulePtr& m, const std::string& name) {
    return basis(m, m->xp_index(name));
  }
  static XpVector make(const ModulePtr& m, std::size_t b, const RingElement& r);

  const ModulePtr& module() const { return module_; }
  const std::map<std::size_t, RingElement>& components() const { return comps_; }
  bool is_zero() const { return comps_.empty(); }
  std::string to_string() const;

  XpVector operator+(const XpVector& o) const;
  XpVector operator-(const XpVector& o) const;
  XpVector scaled(const mpq_class& c) const;
  bool operator==(const XpVector& o) const;
  void add_term(std::size_t b, const RingElement& r);

 private:
  ModulePtr module_;
  std::map<std::size_t, RingElement> comps_;
};

XpVector operator*(const RingElement& r, const XpVector& v);  // left action

// phi(x).
RingElement pair(const XpVector& phi, const XVector& x);

// Element of K_R(X) = X (x)_R X' written as sum_{b,b'} b (x) c_{b,b'} b'
// with c_{b,b'} = p_b c q_b'.
class CompactOperator {
 public:
  using Key = std::pair<std::size_t, std::size_t>;

  CompactOperator() = default;
  explicit CompactOperator(ModulePtr m) : module_(std::move(m)) {}
  // theta_{x, phi}
  static CompactOperator elementary(const XVector& x, const XpVector& phi);

  const ModulePtr& module() const { return module_; }
  const std::map<Key, RingElement>& entries() const { return entries_; }
  bool is_zero() const { return entries_.empty(); }
  void add_entry(std::size_t b, std::size_t bp, const RingElement& c);
  std::string to_string() const;

  CompactOperator operator+(const CompactOperator& o) const;
  CompactOperator operator-(const CompactOperator& o) const;
  CompactOperator operator*(const CompactOperator& o) const;
  bool operator==(const CompactOperator& o) const;

 private:
  ModulePtr module_;
  std::map<Key, RingElement> entries_;
};

CompactOperator compact_mul(const CompactOperator& a, const CompactOperator& b);
// theta(y) = sum x_i phi_i(y).
XVector theta_apply(const CompactOperator& k, const XVector& y);
// psi . theta = sum psi(x_i) phi_i.
XpVector theta_apply_right(const XpVector& psi, const CompactOperator& k);

struct FsWitness {
  bool found = false;
  CompactOperator theta1;  // theta1 x_i = x_i
  CompactOperator theta2;  // phi_i theta2 = phi_i
  std::string detail;
};

// Searches for (FS) witnesses by solving a linear system over the coefficient
// ring. A missing witness is reported through `found`, not by throwing.
FsWitness fs_witness(const ModulePtr& m, const std::vector<XVector>& xs,
                     const std::vector<XpVector>& phis);

// True iff the pairing has trivial left and right null spaces on the k-span
// of b p_b s and s q_b' b' for s ranging over local-unit symbols.
bool check_nondegenerate(const ModulePtr& m);

// (U, V) with V(phi)(U(x)) = phi(x). U and V are given on generators.
struct FunctionalHom {
  ModulePtr source;
  ModulePtr target;
  std::vector<XVector> U;   // U[b] = image of b p_b
  std::vector<XpVector> V;  // V[b'] = image of q_b' b'

  XVector apply_u(const XVector& x) const;
  XpVector apply_v(const XpVector& phi) const;
};

FunctionalHom identity_hom(const ModulePtr& m);
bool check_functional_hom(const FunctionalHom& h);
CompactOperator induced_compact_map(const FunctionalHom& h, const CompactOperator& k);

// The ring as a module over itself, generated by its idempotent decomposition.
ModulePtr make_ring_module(const RingPtr& ring);
// R^(I), generators "i@a" for i in I and a in the idempotent decomposition.
ModulePtr make_free_module(const RingPtr& ring, const std::vector<std::string>& index);
std::string free_generator_name(const std::string& i, const std::string& a);

// Generators prefixed "1." and "2."; the pairing vanishes across blocks.
ModulePtr direct_sum(const ModulePtr& a, const ModulePtr& b);

class Correspondence;
using CorrespondencePtr = std::shared_ptr<const Correspondence>;

// (X, Delta, U, I): left action by adjointable operators plus a functional
// homomorphism into R^(I) and generators of the ideal I.
class Correspondence {
 public:
  // s . (b p_b) for a ring basis symbol s.
  using LeftAction = std::function<XVector(const std::string& s, std::size_t b)>;
  // (q_b' b') . s
  using RightAction = std::function<XpVector(std::size_t bp, const std::string& s)>;

  static CorrespondencePtr create(ModulePtr module, LeftAction left, RightAction right,
                                  std::optional<FunctionalHom> hom,
                                  std::vector<RingElement> ideal, std::string name);

  const ModulePtr& module() const { return module_; }
  const RingPtr& ring() const { return module_->ring(); }
  const std::optional<FunctionalHom>& hom() const { return hom_; }
  const std::vector<RingElement>& ideal() const { return ideal_; }
  const std::string& name() const { return name_; }

  const XVector& left_gen(SymbolId s, std::size_t b) const;
  const XpVector& right_gen(std::size_t bp, SymbolId s) const;
  XVector left(const RingElement& r, const XVector& x) const;
  XpVector right(const XpVector& phi, const RingElement& r) const;

  // g(b' . s, b) = g(b', s . b) for every generator pair and ring generator.
  bool check_adjointable() const;
  // Delta(s) Delta(t) = Delta(st) on generators.
  bool check_left_module() const;
  // Delta(R) X = X and X' Delta(R) = X' on generators.
  bool check_nondegenerate_action() const;
  // Delta(r) as an element of K_R(X); nullopt when no finite decomposition exists.
  std::optional<CompactOperator> try_compact(const RingElement& r) const;
  // Like try_compact but throws NotCompact.
  CompactOperator compact_left_action(const RingElement& r) const;

 private:
  Correspondence() = default;
  ModulePtr module_;
  LeftAction left_fn_;
  RightAction right_fn_;
  std::optional<FunctionalHom> hom_;
  std::vector<RingElement> ideal_;
  std::string name_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<SymbolId, std::size_t>, XVector> left_cache_;
  mutable std::map<std::pair<std::size_t, SymbolId>, XpVector> right_cache_;
};

// (R, R, multiplication) with Delta the left multiplication.
CorrespondencePtr identity_correspondence(const RingPtr& ring);

// X (x)_R Y over a common ring. Generators are pairs (b, c) with
// Delta_Y(p_b) c = c; the left action of Y must be diagonal on supports.
CorrespondencePtr tensor(const CorrespondencePtr& x, const CorrespondencePtr& y);

}  // namespace pimsner
