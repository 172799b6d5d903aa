#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

namespace pimsner {

// Exact commutative coefficient ring: Z, Q or Z/m. Values are carried as
// mpq_class and kept in the ring's normal form (integers for Z, lowest
// terms for Q, residues 0 <= v < m for Z/m).
class CoeffRing {
 public:
  enum class Kind { Integers, Rationals, Modular };

  static CoeffRing integers() { return CoeffRing(Kind::Integers, 0); }
  static CoeffRing rationals() { return CoeffRing(Kind::Rationals, 0); }
  // Throws DomainError for m < 2.
  static CoeffRing modular(const mpz_class& m);
  // Like modular() but asserts that p is prime.
  static CoeffRing prime_field(const mpz_class& p);
  // Accepts "z", "q", "zmod:m", "fp:p".
  static CoeffRing parse(const std::string& spec);

  Kind kind() const { return kind_; }
  const mpz_class& modulus() const { return modulus_; }
  bool is_field() const;
  std::string spec() const;

  // Throws DomainError when v has no image in the ring (a non-integral
  // rational in Z, or a denominator not invertible mod m).
  mpq_class normalize(const mpq_class& v) const;
  std::optional<mpq_class> try_normalize(const mpq_class& v) const;
  std::optional<mpq_class> inverse(const mpq_class& v) const;
  bool is_unit(const mpq_class& v) const { return inverse(v).has_value(); }

  bool operator==(const CoeffRing& o) const {
    return kind_ == o.kind_ && modulus_ == o.modulus_;
  }

 private:
  CoeffRing(Kind k, mpz_class m) : kind_(k), modulus_(std::move(m)) {}
  Kind kind_;
  mpz_class modulus_;
};

bool is_probable_prime(const mpz_class& n);
std::string to_string(const mpq_class& v);

}  // namespace pimsner
