#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pimsner/coeff.hpp"

namespace pimsner {

// Dense row-major matrix of arbitrary-precision integers. Empty shapes
// (0 x n, n x 0) are legal.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

  static IntMatrix identity(std::size_t n);
  static IntMatrix zero(std::size_t rows, std::size_t cols) { return IntMatrix(rows, cols); }
  // "1 0; 0 1" style. Throws DomainError on ragged or malformed input.
  static IntMatrix parse(const std::string& text);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  mpz_class& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const mpz_class& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  bool operator==(const IntMatrix& o) const = default;
  IntMatrix transposed() const;
  IntMatrix permuted(const std::vector<std::size_t>& row_perm,
                     const std::vector<std::size_t>& col_perm) const;
  bool is_zero() const;
  std::string to_string() const;

  void swap_rows(std::size_t a, std::size_t b);
  void swap_cols(std::size_t a, std::size_t b);
  // row[dst] += factor * row[src]
  void add_row(std::size_t dst, std::size_t src, const mpz_class& factor);
  void add_col(std::size_t dst, std::size_t src, const mpz_class& factor);
  void negate_row(std::size_t r);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<mpz_class> data_;
};

// Fraction-free (Bareiss) determinant of a square matrix.
mpz_class determinant(const IntMatrix& a);

// Finitely generated abelian group Z^free_rank + Z/d_1 + ... + Z/d_k with
// 2 <= d_1 | d_2 | ... | d_k.
class FgAbelianGroup {
 public:
  FgAbelianGroup() = default;
  // Accepts arbitrary cyclic orders; 0 counts as a free summand and 1 is
  // dropped, then the torsion is brought into invariant-factor form.
  static FgAbelianGroup from_cyclic(std::size_t free_rank, const std::vector<mpz_class>& orders);
  static FgAbelianGroup free(std::size_t rank) { return from_cyclic(rank, {}); }
  static FgAbelianGroup cyclic(const mpz_class& m) { return from_cyclic(0, {m}); }

  std::size_t free_rank() const { return free_rank_; }
  const std::vector<mpz_class>& torsion() const { return torsion_; }
  bool is_trivial() const { return free_rank_ == 0 && torsion_.empty(); }
  bool is_free() const { return torsion_.empty(); }
  FgAbelianGroup direct_sum(const FgAbelianGroup& o) const;
  FgAbelianGroup power(std::size_t copies) const;
  std::string to_string() const;
  bool operator==(const FgAbelianGroup& o) const = default;

 private:
  std::size_t free_rank_ = 0;
  std::vector<mpz_class> torsion_;
};

struct SnfResult {
  IntMatrix S;
  IntMatrix U;
  IntMatrix V;
  std::size_t rank = 0;
  std::vector<mpz_class> diagonal() const;
};

// U * A * V = S, U and V unimodular, S diagonal with d_1 | d_2 | ... >= 0.
SnfResult smith_normal_form(const IntMatrix& a);
// Columns form a Z-basis of { v : A v = 0 }.
IntMatrix kernel_basis(const IntMatrix& a);
// Z^rows / colspan(A).
FgAbelianGroup cokernel(const IntMatrix& a);
std::size_t rank(const IntMatrix& a);

struct LesSegment {
  FgAbelianGroup kernel;
  FgAbelianGroup cokernel;
  IntMatrix map_matrix;
  bool operator==(const LesSegment& o) const = default;
};

// Kernel and cokernel of the map coeff^cols -> coeff^rows induced by `map`.
// `coeff` must be free or cyclic; anything mixed throws DomainError.
LesSegment les_segment(const IntMatrix& map, const FgAbelianGroup& coeff);

// One summand of a coefficient group in primary-decomposed form.
struct CoeffComponent {
  enum class Kind { Free, Cyclic, CountableFree };
  Kind kind = Kind::Free;
  std::size_t rank = 1;  // Free only
  mpz_class order;       // Cyclic only, a prime power
};

// Direct sum of primary components, e.g. E_1(F_p) = Z/(p-1) decomposed.
struct CoeffGroup {
  std::vector<CoeffComponent> components;

  static CoeffGroup zero() { return {}; }
  static CoeffGroup free(std::size_t rank);
  // Splits Z/m into its primary parts.
  static CoeffGroup cyclic(const mpz_class& m);
  static CoeffGroup countable_free();
  CoeffGroup& add(const CoeffGroup& o);
  // Throws DomainError unless every cyclic order is a prime power >= 2.
  void validate() const;
  std::string to_string() const;
};

// finite + (countable)^(N); the second part appears only for Q^x-type presets.
struct GroupValue {
  FgAbelianGroup finite;
  std::optional<FgAbelianGroup> countable;
  bool is_free() const { return finite.is_free() && (!countable || countable->is_free()); }
  GroupValue direct_sum(const GroupValue& o) const;
  std::string to_string() const;
  bool operator==(const GroupValue& o) const = default;
};

struct LesDegree {
  int n = 0;
  GroupValue kernel;    // ker of the map on E_n
  GroupValue cokernel;  // coker of the map on E_n
  std::optional<GroupValue> assembled;  // coker_n + ker_{n-1} when split
  std::string split_status;             // "split-assembled" | "unassembled"
  bool operator==(const LesDegree& o) const = default;
};

struct LesReport {
  IntMatrix map;
  std::vector<LesDegree> degrees;
  bool operator==(const LesReport& o) const = default;
};

// Evaluates  ... -> E_n^cols --map--> E_n^rows -> E_n(quotient) -> E_{n-1}^cols -> ...
// for the degrees present in `presets`.
LesReport evaluate_les(const IntMatrix& map, const std::map<int, CoeffGroup>& presets);

// Dense system over a coefficient ring; entries must already be ring values.
using RationalRows = std::vector<std::vector<mpq_class>>;

// One solution of A x = b over k (free variables set to 0), or nullopt.
std::optional<std::vector<mpq_class>> solve_linear(const RationalRows& a, std::size_t cols,
                                                   const std::vector<mpq_class>& b,
                                                   const CoeffRing& k);
// True iff A x = 0 has only the trivial solution over k (over Q for k = Z).
bool has_trivial_kernel(const RationalRows& a, std::size_t cols, const CoeffRing& k);

// Rank over k: over Q for Z and Q, over F_p for a prime modulus. Throws
// DomainError for a composite modulus.
std::size_t rank_over(const RationalRows& a, std::size_t cols, const CoeffRing& k);

// Prime-power factorization of m >= 1. Throws DomainError if m has a prime
// factor beyond the trial-division bound that is not itself prime.
std::vector<std::pair<mpz_class, unsigned>> factorize(const mpz_class& m);

}  // namespace pimsner
