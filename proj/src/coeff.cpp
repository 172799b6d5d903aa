#include "pimsner/coeff.hpp"

#include "pimsner/error.hpp"

namespace pimsner {

bool is_probable_prime(const mpz_class& n) {
  return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), 30) > 0;
}

std::string to_string(const mpq_class& v) { return v.get_str(); }

CoeffRing CoeffRing::modular(const mpz_class& m) {
  if (m < 2) throw DomainError("modulus must be >= 2, got " + m.get_str());
  return CoeffRing(Kind::Modular, m);
}

CoeffRing CoeffRing::prime_field(const mpz_class& p) {
  if (!is_probable_prime(p)) throw DomainError("fp modulus " + p.get_str() + " is not prime");
  return CoeffRing(Kind::Modular, p);
}

CoeffRing CoeffRing::parse(const std::string& spec) {
  if (spec == "z") return integers();
  if (spec == "q") return rationals();
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string head = spec.substr(0, colon);
    std::string tail = spec.substr(colon + 1);
    mpz_class m;
    if (tail.empty() || m.set_str(tail, 10) != 0)
      throw DomainError("bad coefficient modulus in '" + spec + "'");
    if (head == "zmod") return modular(m);
    if (head == "fp") return prime_field(m);
  }
  throw DomainError("unknown coefficient ring '" + spec + "' (expected z | q | zmod:m | fp:p)");
}

bool CoeffRing::is_field() const {
  switch (kind_) {
    case Kind::Integers: return false;
    case Kind::Rationals: return true;
    case Kind::Modular: return is_probable_prime(modulus_);
  }
  return false;
}

std::string CoeffRing::spec() const {
  switch (kind_) {
    case Kind::Integers: return "z";
    case Kind::Rationals: return "q";
    case Kind::Modular:
      return (is_probable_prime(modulus_) ? "fp:" : "zmod:") + modulus_.get_str();
  }
  return "?";
}

std::optional<mpq_class> CoeffRing::try_normalize(const mpq_class& v) const {
  switch (kind_) {
    case Kind::Rationals: return v;
    case Kind::Integers:
      if (v.get_den() != 1) return std::nullopt;
      return v;
    case Kind::Modular: {
      mpz_class num = v.get_num();
      mpz_class den = v.get_den();
      mpz_class r;
      mpz_mod(r.get_mpz_t(), num.get_mpz_t(), modulus_.get_mpz_t());
      if (den != 1) {
        mpz_class inv;
        if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus_.get_mpz_t()) == 0)
          return std::nullopt;
        r = r * inv;
        mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus_.get_mpz_t());
      }
      return mpq_class(r);
    }
  }
  return std::nullopt;
}

mpq_class CoeffRing::normalize(const mpq_class& v) const {
  auto r = try_normalize(v);
  if (!r) throw DomainError("value " + v.get_str() + " is not in coefficient ring " + spec());
  return *r;
}

std::optional<mpq_class> CoeffRing::inverse(const mpq_class& v) const {
  auto n = try_normalize(v);
  if (!n || *n == 0) return std::nullopt;
  switch (kind_) {
    case Kind::Rationals: return 1 / *n;
    case Kind::Integers:
      if (abs(*n) == 1) return *n;
      return std::nullopt;
    case Kind::Modular: {
      mpz_class num = n->get_num();
      mpz_class inv;
      if (mpz_invert(inv.get_mpz_t(), num.get_mpz_t(), modulus_.get_mpz_t()) == 0)
        return std::nullopt;
      return mpq_class(inv);
    }
  }
  return std::nullopt;
}

}  // namespace pimsner
