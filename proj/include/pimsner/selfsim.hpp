#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pimsner/abgroup.hpp"
#include "pimsner/fock.hpp"
#include "pimsner/funcmod.hpp"

namespace pimsner {

struct GroupLetter {
  std::size_t gen = 0;
  int exp = 1;  // +1 or -1
  auto operator<=>(const GroupLetter&) const = default;
};

// Freely reduced word in the generators and their inverses. The product g h
// acts as g after h.
class GroupWord {
 public:
  GroupWord() = default;
  explicit GroupWord(const std::vector<GroupLetter>& letters);
  static GroupWord generator(std::size_t g, int exp = 1);

  const std::vector<GroupLetter>& letters() const { return letters_; }
  bool is_identity() const { return letters_.empty(); }
  std::size_t length() const { return letters_.size(); }
  GroupWord inverse() const;
  GroupWord operator*(const GroupWord& o) const;
  auto operator<=>(const GroupWord&) const = default;

 private:
  std::vector<GroupLetter> letters_;
};

// Word over the alphabet, as letter indices.
using AlphabetWord = std::vector<std::size_t>;

struct GroupEquality {
  bool equal = true;      // same action on all words of length <= depth
  bool certified = true;  // g h^-1 restricts to the empty word by that depth
};

struct GeneratorRecursion {
  std::string name;
  std::vector<std::size_t> perm;          // sigma_g(x) = perm[x]
  std::vector<std::string> restrictions;  // g|_x, one per letter
};

class SelfSimilarGroup;
using SelfSimilarPtr = std::shared_ptr<const SelfSimilarGroup>;

class SelfSimilarGroup {
 public:
  // Throws SemanticError for |X| < 2, duplicate names, a non-bijective
  // sigma_g, a wrong restriction count, or unknown generators.
  static SelfSimilarPtr make(std::vector<std::string> alphabet,
                             const std::vector<GeneratorRecursion>& gens);
  // DSL:
  //   alphabet: 0 1
  //   a = (perm 0 1)(e, a)
  // The perm group is a product of cycles; "(perm)" or omitting it gives the
  // identity. Restrictions are words like "e", "a", "a^-1 b", "a*b^2".
  static SelfSimilarPtr parse(const std::string& text);
  // a = (perm 0 1)(e, a) on {0, 1}.
  static SelfSimilarPtr odometer();
  // Trivial group on the alphabet 0..d-1.
  static SelfSimilarPtr trivial(std::size_t d);

  const std::vector<std::string>& alphabet() const { return alphabet_; }
  const std::vector<std::string>& generators() const { return names_; }
  std::size_t degree() const { return alphabet_.size(); }
  std::size_t letter_index(const std::string& x) const;
  std::size_t generator_index(const std::string& g) const;

  // Group words: "e", or letters "a", "a^-1", "a^3" separated by '.', '*' or
  // spaces. The canonical encoding joins with '.'.
  GroupWord word(const std::string& text) const;
  std::string format(const GroupWord& g) const;
  // Alphabet words: concatenated letters when every letter is one character,
  // otherwise space separated.
  AlphabetWord letters(const std::string& text) const;
  std::string format(const AlphabetWord& w) const;

  std::size_t act_letter(const GroupWord& g, std::size_t x) const;
  AlphabetWord act(const GroupWord& g, const AlphabetWord& w) const;
  GroupWord restriction(const GroupWord& g, std::size_t x) const;
  GroupWord restriction(const GroupWord& g, const AlphabetWord& w) const;
  GroupEquality equal(const GroupWord& g, const GroupWord& h, long depth) const;
  // Every generator equals the identity at `depth`, with certificate.
  bool is_trivial(long depth) const;

  std::string to_dsl() const;

 private:
  SelfSimilarGroup() = default;
  static SelfSimilarPtr build_parsed(const std::vector<std::string>& alphabet, std::vector<GeneratorRecursion> gens,
                                     const std::vector<std::vector<std::vector<std::string>>>& cycles);
  GroupEquality trivial_below(const GroupWord& f, long depth,
                              std::map<std::pair<GroupWord, long>, GroupEquality>& memo) const;

  std::vector<std::string> alphabet_, names_;
  std::unordered_map<std::string, std::size_t> letter_pos_, gen_pos_;
  std::vector<std::vector<std::size_t>> perm_, inv_perm_;
  std::vector<std::vector<GroupWord>> rest_;  // rest_[g][x] = g|_x
  bool single_char_ = true;
};

// X = (+)_x x kG over R = kG with <x', y> = delta_{x,y} e, left action
// g . x = g(x) . g|_x, and X' = (+)_x kG x' with x' . t = t|_{t^-1(x)} (t^-1 x)'.
// Generators of X are the letters, those of X' are the letters with a prime.
struct NekCorrespondence {
  SelfSimilarPtr group;
  RingPtr ring;
  CorrespondencePtr correspondence;
  long depth = 8;
  std::vector<std::pair<std::string, CheckResult>> checks;

  RingElement element(const GroupWord& g, const mpq_class& c = 1) const;
  // x . g
  XVector vector(std::size_t x, const GroupWord& g, const mpq_class& c = 1) const;
  // x . sum c_g g  |->  sum c_g g^-1 . x'
  XpVector dual(const XVector& v) const;
  // Delta(g) as a d x d matrix over kG: entry (g(x), x) is g|_x.
  std::vector<std::vector<RingElement>> left_matrix(const GroupWord& g) const;
};

// Builds kG (group equality at `depth`) and the correspondence, then checks
// the left-module law, adjointability and compactness on generators. Throws
// InvariantViolation if a check fails.
NekCorrespondence build_nek_correspondence(const SelfSimilarPtr& group, const CoeffRing& k,
                                           long depth = 8);

// sum_x lambda_x mu_x g_x^-1 h_x
RingElement nek_pairing(const NekCorrespondence& n, const XVector& xi, const XVector& eta);

// The long exact sequence with map 1 - E_n(X). `action` is the matrix of
// E_0(X) on a finite invariant quotient; for the trivial group it is read
// from the correspondence. nullopt when neither is available.
std::optional<LesReport> nek_k_groups(const NekCorrespondence& n,
                                      const std::map<int, CoeffGroup>& presets,
                                      const std::optional<IntMatrix>& action = std::nullopt);

struct SelfSimilarSuite {
  CheckResult bijectivity;
  CheckResult recursion;
  CheckResult cocycle;
};

// Exhaustive checks on generators and their inverses for words of length
// <= depth (capped at |X|^n <= 10^5), plus `samples` random group words of
// length <= 4 for the recursion and cocycle identities.
SelfSimilarSuite selfsim_suite(const SelfSimilarGroup& g, long depth, std::uint64_t seed,
                               std::size_t samples = 32);

}  // namespace pimsner
