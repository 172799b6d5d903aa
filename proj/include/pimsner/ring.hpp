#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pimsner/coeff.hpp"

namespace pimsner {

using SymbolId = std::uint32_t;

struct Term {
  SymbolId sym;
  mpq_class coeff;
};

using NamedTerms = std::vector<std::pair<std::string, mpq_class>>;

// Group ring kG over a group whose elements are encoded as strings by the
// caller (selfsim uses freely reduced words).
struct GroupRingSpec {
  std::string name;
  std::function<std::string(const std::string&, const std::string&)> multiply;
  std::function<bool(const std::string&)> is_element;
  std::string identity = "e";
  std::vector<std::string> generators;
  // Optional equality oracle; terms it identifies are merged on
  // normalization, keeping the shortest (then smallest) encoding.
  std::function<bool(const std::string&, const std::string&)> equal;
  bool trivial_group = false;
};

// A ring given by a basis and a multiplication rule on basis symbols
// returning a linear combination (e.g. a Leavitt path algebra in normal form).
struct PresentationSpec {
  std::string name;
  std::function<NamedTerms(const std::string&, const std::string&)> multiply;
  std::function<bool(const std::string&)> is_element;
  // Orthogonal idempotent basis symbols whose sum fixes the symbol on both
  // sides. Leave empty to declare the ring without a local-unit rule.
  std::function<std::vector<std::string>(const std::string&)> local_units;
  std::vector<std::string> idempotents;
  std::vector<std::string> generators;
};

class RingDescriptor {
 public:
  enum class Kind { DirectSum, Matrix, Laurent, GroupRing, FreeQuotient };

  Kind kind() const { return kind_; }
  const CoeffRing& coeff() const { return coeff_; }
  const std::string& name() const { return name_; }
  std::string kind_name() const;

  // Validates membership and returns the interned id. Throws SemanticError.
  SymbolId intern(const std::string& sym) const;
  std::string symbol(SymbolId id) const;
  bool is_symbol(const std::string& sym) const;

  std::vector<std::pair<SymbolId, mpq_class>> basis_mul(SymbolId a,
                                                        SymbolId b) const;

  std::optional<SymbolId> unit() const;
  bool has_local_unit_rule() const;
  // Idempotent basis symbols whose sum fixes `sym` on both sides.
  std::vector<SymbolId> local_unit_symbols(SymbolId sym) const;
  // Orthogonal idempotents e_a with R = (+) e_a R; empty if unavailable.
  std::vector<std::string> idempotent_decomposition() const;
  // Finite generating sample used by checkers.
  std::vector<std::string> generators() const;
  // Symbols e_a with R = (+) k e_a as rings (split commutative semisimple),
  // when that holds; used to read K0 classes of idempotent matrices.
  std::optional<std::vector<std::string>> k0_components() const;

  // Merge oracle-equal terms (group rings only); terms sorted by id.
  void canonicalize(std::vector<Term>& terms) const;

  friend std::shared_ptr<const RingDescriptor> make_direct_sum(
      const CoeffRing&, const std::vector<std::string>&, const std::string&);
  friend std::shared_ptr<const RingDescriptor> make_matrix_ring(
      const CoeffRing&, const std::vector<std::string>&, const std::string&);
  friend std::shared_ptr<const RingDescriptor> make_laurent(
      const CoeffRing&, const std::string&);
  friend std::shared_ptr<const RingDescriptor> make_group_ring(
      const CoeffRing&, GroupRingSpec);
  friend std::shared_ptr<const RingDescriptor> make_free_quotient(
      const CoeffRing&, PresentationSpec);

 private:
  RingDescriptor(Kind k, CoeffRing c, std::string name)
      : kind_(k), coeff_(std::move(c)), name_(std::move(name)) {}
  SymbolId intern_unchecked(const std::string& sym) const;
  bool syntax_ok(const std::string& sym) const;
  std::vector<std::pair<SymbolId, mpq_class>> compute_mul(SymbolId a,
                                                          SymbolId b) const;

  Kind kind_;
  CoeffRing coeff_;
  std::string name_;
  std::vector<std::string> index_;  // S for direct sums, I for matrices
  std::unordered_map<std::string, std::size_t> index_pos_;
  std::string variable_ = "x";
  GroupRingSpec group_;
  PresentationSpec presentation_;

  mutable std::mutex mu_;
  mutable std::vector<std::string> symbols_;
  mutable std::unordered_map<std::string, SymbolId> ids_;
  mutable std::unordered_map<std::uint64_t,
                             std::vector<std::pair<SymbolId, mpq_class>>>
      mul_cache_;
};

using RingPtr = std::shared_ptr<const RingDescriptor>;

// k^(S): basis 1_v, v in S, with 1_v 1_w = delta_{v,w} 1_v. Symbols are the
// names in S.
RingPtr make_direct_sum(const CoeffRing& k, const std::vector<std::string>& S,
                        const std::string& name = "k^(S)");
// Finite-support matrices over k indexed by I. Symbols "E[i,j]".
RingPtr make_matrix_ring(const CoeffRing& k, const std::vector<std::string>& I,
                         const std::string& name = "M_I(k)");
// k[x, x^-1]. Symbols "x^n".
RingPtr make_laurent(const CoeffRing& k, const std::string& variable = "x");
RingPtr make_group_ring(const CoeffRing& k, GroupRingSpec spec);
RingPtr make_free_quotient(const CoeffRing& k, PresentationSpec spec);

std::string matrix_unit_symbol(const std::string& i, const std::string& j);
std::string laurent_symbol(long n, const std::string& variable = "x");

// Finite formal sum of basis symbols with exact coefficients. Terms are kept
// sorted by interned id with no zero coefficients.
class RingElement {
 public:
  RingElement() = default;
  explicit RingElement(RingPtr ring) : ring_(std::move(ring)) {}

  static RingElement basis(RingPtr ring, const std::string& sym,
                           const mpq_class& c = 1);
  static RingElement from_terms(RingPtr ring, const NamedTerms& terms);
  static RingElement from_ids(RingPtr ring, std::vector<Term> terms);
  static RingElement scalar_unit(RingPtr ring, const mpq_class& c);

  const RingPtr& ring() const { return ring_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  mpq_class coefficient(const std::string& sym) const;
  NamedTerms named_terms() const;  // sorted by symbol name
  std::string to_string() const;

  RingElement operator+(const RingElement& o) const;
  RingElement operator-(const RingElement& o) const;
  RingElement operator-() const;
  RingElement operator*(const RingElement& o) const;
  RingElement scaled(const mpq_class& c) const;
  RingElement& operator+=(const RingElement& o);
  bool operator==(const RingElement& o) const;
  bool operator!=(const RingElement& o) const { return !(*this == o); }

 private:
  void normalize();
  RingPtr ring_;
  std::vector<Term> terms_;
};

RingElement add(const RingElement& a, const RingElement& b);
RingElement mul(const RingElement& a, const RingElement& b);
bool is_idempotent(const RingElement& a);
// Idempotent e with e r = r e = r for every input; zero for an empty input.
// Throws DomainError for rings declared without a local-unit rule.
RingElement local_unit_for(const RingPtr& ring,
                           const std::vector<RingElement>& elements);

}  // namespace pimsner
