#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimsner/funcmod.hpp"

namespace pimsner {

// X side: T(X) = (+) X^(x)n as a right module. Xp side: T(X') as a left module.
enum class Side { X, Xp };

using Tuple = std::vector<std::uint32_t>;

// Degree-0 keys hold one index into the idempotent decomposition of R;
// degree-n keys hold n generator indices.
struct FockKey {
  std::uint32_t degree = 0;
  Tuple tuple;
  auto operator<=>(const FockKey&) const = default;
  bool operator==(const FockKey&) const = default;
};

class TruncatedFock;
using FockPtr = std::shared_ptr<const TruncatedFock>;

// X side: sum key . c with c = p_key c. Xp side: sum c . key with c = c q_key.
class FockVector {
 public:
  FockVector() = default;
  FockVector(FockPtr f, Side s) : fock_(std::move(f)), side_(s) {}
  static FockVector basis(const FockPtr& f, Side s, const FockKey& k);
  // r in degree 0.
  static FockVector from_ring(const FockPtr& f, Side s, const RingElement& r);
  static FockVector from_x(const FockPtr& f, const XVector& x);
  static FockVector from_xp(const FockPtr& f, const XpVector& phi);

  const FockPtr& fock() const { return fock_; }
  Side side() const { return side_; }
  const std::map<FockKey, RingElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  RingElement coefficient(const FockKey& k) const;
  FockVector component(std::size_t degree) const;
  std::optional<std::size_t> max_degree() const;
  std::string to_string() const;

  void add_term(const FockKey& k, const RingElement& c);
  FockVector operator+(const FockVector& o) const;
  FockVector operator-(const FockVector& o) const;
  FockVector scaled(const mpq_class& c) const;
  bool operator==(const FockVector& o) const;

 private:
  FockPtr fock_;
  Side side_ = Side::X;
  std::map<FockKey, RingElement> terms_;
};

// (+)_{n <= N} X^(x)n over a correspondence whose left action is diagonal on
// generator supports: Delta(p_b) b' is b' or 0 (likewise on X').
class TruncatedFock : public std::enable_shared_from_this<TruncatedFock> {
 public:
  static FockPtr create(CorrespondencePtr c, std::size_t depth);

  const CorrespondencePtr& correspondence() const { return corr_; }
  const ModulePtr& module() const { return corr_->module(); }
  const RingPtr& ring() const { return corr_->ring(); }
  std::size_t depth() const { return depth_; }
  const std::vector<std::string>& degree0() const { return units_; }
  const RingElement& unit(std::size_t a) const { return unit_elems_[a]; }

  // Graded basis in degree n <= depth.
  const std::vector<FockKey>& basis(Side s, std::size_t n) const;
  std::size_t dimension(Side s) const;
  bool valid(Side s, const Tuple& t) const;
  const RingElement& support(Side s, const FockKey& k) const;
  std::string key_name(Side s, const FockKey& k) const;

  // Exact (untruncated) tensor arithmetic.
  FockVector left_act(const RingElement& r, const FockVector& v) const;
  FockVector right_act(const FockVector& v, const RingElement& r) const;
  FockVector create(const XVector& x, const FockVector& v) const;          // x (x) p
  FockVector annihilate(const XpVector& phi, const FockVector& v) const;   // phi(p1) p2 ...
  FockVector create_star(const XVector& x, const FockVector& psi) const;   // psi_1 ... psi_n(x)
  FockVector annihilate_star(const XpVector& phi, const FockVector& psi) const;  // psi (x) phi
  FockVector truncate(const FockVector& v) const;
  // g~(psi, p) = psi_1(psi_2(... psi_n(p_1) p_2 ...) p_n), summed over degrees.
  RingElement pairing(const FockVector& psi, const FockVector& p) const;

 private:
  using TupleTerms = std::vector<std::pair<Tuple, RingElement>>;
  TruncatedFock() = default;
  FockPtr self() const { return shared_from_this(); }
  void check_vector(const FockVector& v, Side s, const char* where) const;
  const TupleTerms& left_tuple(SymbolId s, const Tuple& t) const;
  const TupleTerms& right_tuple(const Tuple& t, SymbolId s) const;
  TupleTerms left_tuple(const RingElement& r, const Tuple& t) const;
  TupleTerms right_tuple(const Tuple& t, const RingElement& r) const;

  CorrespondencePtr corr_;
  std::size_t depth_ = 0;
  std::vector<std::string> units_;
  std::vector<RingElement> unit_elems_;
  std::vector<std::vector<bool>> next_x_, next_xp_;
  std::vector<std::vector<FockKey>> basis_x_, basis_xp_;
  mutable std::mutex mu_;
  struct MemoHash {
    std::size_t operator()(const std::pair<SymbolId, Tuple>& k) const { return mix(k.first, k.second); }
    std::size_t operator()(const std::pair<Tuple, SymbolId>& k) const { return mix(k.second, k.first); }
    static std::size_t mix(SymbolId s, const Tuple& t) {
      std::size_t h = s * 0x9e3779b97f4a7c15ULL;
      for (auto x : t) h = (h ^ x) * 0x100000001b3ULL;
      return h;
    }
  };
  mutable std::unordered_map<std::pair<SymbolId, Tuple>, TupleTerms, MemoHash> left_memo_;
  mutable std::unordered_map<std::pair<Tuple, SymbolId>, TupleTerms, MemoHash> right_memo_;
};

// Letters of Toeplitz words. A starred letter is the adjoint acting on T(X').
struct Letter {
  enum class Kind { Create, Annihilate, Scalar };
  Kind kind = Kind::Scalar;
  XVector x;
  XpVector phi;
  RingElement r;
  bool star = false;

  static Letter create(const XVector& x);
  static Letter annihilate(const XpVector& phi);
  static Letter scalar(const RingElement& r);
  // Degree change on the side the letter acts on.
  int shift() const;
  std::string to_string() const;
};

// L1 L2 ... Lk acts as L1 o L2 o ... o Lk.
using Word = std::vector<Letter>;

Word adjoint(const Word& w);
// DomainError for words mixing starred and unstarred letters.
Side word_side(const Word& w);
// Largest intermediate rise of the degree when applied right to left.
long word_max_rise(const Word& w);
// Input degrees n <= max_input_degree keep every intermediate within depth N;
// -1 if none.
long max_input_degree(const Word& w, std::size_t depth);

enum class Representation { Pi0, Pi1 };

// Applies the word letter by letter, truncating after each step.
FockVector apply_word(const Word& w, const FockVector& v, Representation rep = Representation::Pi0);

// Operator on the graded basis, stored by columns: column k is the image of
// the basis vector k (k . p_k on the X side).
class FockOperator {
 public:
  FockOperator() = default;
  FockOperator(FockPtr f, Side s) : fock_(std::move(f)), side_(s) {}
  // Columns f(basis k) for k of degree min_degree..max_degree, truncated.
  static FockOperator materialize(const FockPtr& f, Side s,
                                  const std::function<FockVector(const FockVector&)>& fn,
                                  std::size_t min_degree, std::size_t max_degree);

  const FockPtr& fock() const { return fock_; }
  Side side() const { return side_; }
  const std::map<FockKey, FockVector>& columns() const { return cols_; }
  const std::optional<Word>& word() const { return word_; }
  void set_word(Word w) { word_ = std::move(w); }
  void set_column(const FockKey& k, FockVector v);

  FockVector apply(const FockVector& v) const;
  FockOperator compose(const FockOperator& b) const;  // this o b
  FockOperator operator+(const FockOperator& o) const;
  FockOperator operator-(const FockOperator& o) const;
  FockOperator scaled(const mpq_class& c) const;
  bool operator==(const FockOperator& o) const;
  bool is_zero() const;

  RingElement entry(const FockKey& target, const FockKey& source) const;
  // (target degree, source degree) pairs carrying a nonzero entry.
  std::set<std::pair<std::size_t, std::size_t>> block_support() const;
  FockOperator restrict_source(std::size_t min_degree, std::size_t max_degree) const;
  std::string to_string() const;

 private:
  FockPtr fock_;
  Side side_ = Side::X;
  std::map<FockKey, FockVector> cols_;
  std::optional<Word> word_;
};

FockOperator creation(const XVector& x, const FockPtr& f);
FockOperator annihilation(const XpVector& phi, const FockPtr& f);
FockOperator scalar_operator(const RingElement& r, const FockPtr& f);
// Adjoint of a word operator; DomainError if the operator carries no word.
FockOperator adjoint(const FockOperator& op);
FockOperator pi0(const Word& w, const FockPtr& f);
FockOperator pi1(const Word& w, const FockPtr& f);

// Finite sum of T_mu s T_nu* with mu a basis tuple of X, nu a basis tuple of
// X' and s = p_mu s q_nu: the creations-left-of-annihilations normal form.
// Products are reduced with phi(x) pairings and the bimodule laws.
class ToeplitzElement {
 public:
  struct Key {
    Tuple mu, nu;
    auto operator<=>(const Key&) const = default;
    bool operator==(const Key&) const = default;
  };

  ToeplitzElement() = default;
  explicit ToeplitzElement(FockPtr f) : fock_(std::move(f)) {}
  static ToeplitzElement scalar(const FockPtr& f, const RingElement& r);
  static ToeplitzElement creation(const FockPtr& f, const XVector& x);
  static ToeplitzElement annihilation(const FockPtr& f, const XpVector& phi);
  static ToeplitzElement monomial(const FockPtr& f, const Tuple& mu, const RingElement& s,
                                  const Tuple& nu);
  // Normal form of an unstarred word.
  static ToeplitzElement from_word(const FockPtr& f, const Word& w);

  const FockPtr& fock() const { return fock_; }
  const std::map<Key, RingElement>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const Key& k, const RingElement& s);
  long max_rise() const;
  std::size_t max_annihilations() const;
  std::string to_string() const;

  ToeplitzElement operator+(const ToeplitzElement& o) const;
  ToeplitzElement operator-(const ToeplitzElement& o) const;
  ToeplitzElement operator*(const ToeplitzElement& o) const;
  ToeplitzElement scaled(const mpq_class& c) const;
  bool operator==(const ToeplitzElement& o) const;

  // Exact action on T(X), no truncation.
  FockVector apply(const FockVector& v) const;
  // Columns of degree 0..depth, results truncated at depth.
  FockOperator materialize() const;

 private:
  FockPtr fock_;
  std::map<Key, RingElement> terms_;
};

// Basis monomials T_mu e T_nu* with |mu| + |nu| <= bound, e running over the
// degree-0 idempotents; used as test vectors.
std::vector<ToeplitzElement> test_words(const FockPtr& f, std::size_t bound);

struct CheckResult {
  bool ok = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::vector<std::size_t> degrees;  // input degrees actually checked
  std::string detail;
  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

// A representation (S, T, sigma) of the correspondence on T(X).
struct CovariantRep {
  std::function<FockOperator(const XpVector&)> S;
  std::function<FockOperator(const XVector&)> T;
  std::function<FockOperator(const RingElement&)> sigma;
};

CovariantRep canonical_representation(const FockPtr& f);

// Bimodule laws and sigma(phi(x)) = S(phi) T(x) on every basis pair, checked
// on input degrees 0..N-1.
CheckResult covariant_check(const FockPtr& f, const CovariantRep& rep);

// i id - sum T_{x_j} T_{phi_j} with Delta(i) = sum theta_{x_j, phi_j}.
// Throws NotCompact.
FockOperator p0_compact_form(const RingElement& i, const FockPtr& f);
ToeplitzElement p0_element(const RingElement& i, const FockPtr& f);
// T_{p_1} ... T_{p_n} (i P0) T_{psi_1} ... T_{psi_m}. DepthError if n or m
// exceeds the depth.
FockOperator j_ideal_generator(const std::vector<XVector>& p, const RingElement& i,
                               const std::vector<XpVector>& psi, const FockPtr& f);

// pi0(w) - pi1(w). DepthError if no input degree above the word's
// annihilation count fits the budget.
FockOperator quasi_hom_defect(const Word& w, const FockPtr& f);

// Checks that the defect of T_{p1}..T_{pk} T_{phi1}..T_{phil} lives in the
// (k, l) block only and equals p (x) g~(phi, .) there.
CheckResult defect_support_check(const std::vector<XVector>& p, const std::vector<XpVector>& phi,
                                 const FockPtr& f);

// Univariate polynomial over Q.
class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<mpq_class> c);
  static Poly t() { return Poly{0, 1}; }
  const std::vector<mpq_class>& coeffs() const { return c_; }
  std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
  bool is_zero() const { return c_.empty(); }
  mpq_class operator()(const mpq_class& t) const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  bool operator==(const Poly& o) const { return c_ == o.c_; }
  std::string to_string() const;

 private:
  void trim();
  std::vector<mpq_class> c_;
};

// t (2t - t^3) + (1 - t^2)^2 = 1 in Q[t].
bool homotopy_coefficient_identity();

// Operator on T(X) (x)_R T: column k maps k (x) tau to sum_i i (x) E_ik tau
// with E_ik in the Toeplitz ring (left multiplication).
class OuterOperator {
 public:
  OuterOperator() = default;
  explicit OuterOperator(FockPtr f) : fock_(std::move(f)) {}
  // Entries r of a Fock operator become the scalars r of T.
  static OuterOperator lift(const FockOperator& op);
  // Left multiplication by tau on the degree-0 column R (x)_R T = T.
  static OuterOperator lambda1(const FockPtr& f, const ToeplitzElement& tau);

  const FockPtr& fock() const { return fock_; }
  const std::map<FockKey, std::map<FockKey, ToeplitzElement>>& columns() const { return cols_; }
  void add_entry(const FockKey& target, const FockKey& source, const ToeplitzElement& e);
  ToeplitzElement entry(const FockKey& target, const FockKey& source) const;

  OuterOperator operator+(const OuterOperator& o) const;
  OuterOperator operator-(const OuterOperator& o) const;
  OuterOperator operator*(const OuterOperator& o) const;  // composition
  OuterOperator scaled(const mpq_class& c) const;
  bool is_zero() const { return cols_.empty(); }

 private:
  FockPtr fock_;
  std::map<FockKey, std::map<FockKey, ToeplitzElement>> cols_;
};

class PolyOperator {
 public:
  PolyOperator() = default;
  explicit PolyOperator(FockPtr f) : fock_(std::move(f)) {}
  const FockPtr& fock() const { return fock_; }
  const std::map<std::size_t, OuterOperator>& coefficients() const { return c_; }
  void add(std::size_t power, const OuterOperator& op);
  void add(const Poly& p, const OuterOperator& op);
  PolyOperator operator+(const PolyOperator& o) const;
  PolyOperator operator-(const PolyOperator& o) const;
  PolyOperator operator*(const PolyOperator& o) const;
  OuterOperator evaluate(const mpq_class& t) const;

 private:
  FockPtr fock_;
  std::map<std::size_t, OuterOperator> c_;
};

// H(T_x) = (1 - t^2) l0(T_x) + (2t - t^3) l1(T_x) + pi1(T_x),
// H(T_phi) = (1 - t^2) l0(T_phi) + t l1(T_phi) + pi1(T_phi), H(r) = r id.
PolyOperator homotopy_H(const Letter& generator, const FockPtr& f);

// Compares outer operators on source degrees <= max_source_degree. Entries
// that differ symbolically are evaluated against the test words of length
// <= word_bound on basis vectors of degree <= depth.
CheckResult compare_outer(const OuterOperator& a, const OuterOperator& b,
                          std::size_t max_source_degree, std::size_t word_bound);

// Coefficientwise compare_outer.
CheckResult compare_poly(const PolyOperator& a, const PolyOperator& b,
                         std::size_t max_source_degree, std::size_t word_bound);

// H(0) = pi0 (x) id and H(1) = l1 + pi1 (x) id for one generator.
CheckResult homotopy_endpoint_check(const Letter& generator, const FockPtr& f,
                                    std::size_t word_bound);
// H(T_phi) H(T_x) = H(phi(x)) coefficientwise in t.
CheckResult homotopy_pairing_check(const XVector& x, const XpVector& phi, const FockPtr& f,
                                   std::size_t word_bound);

}  // namespace pimsner
