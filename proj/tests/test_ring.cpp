#include <random>

#include "doctest.h"
#include "pimsner/error.hpp"
#include "pimsner/ring.hpp"

using namespace pimsner;

namespace {

RingPtr cyclic3_group_ring(const CoeffRing& k) {
  GroupRingSpec spec;
  spec.name = "kC3";
  auto idx = [](const std::string& s) { return s == "e" ? 0 : s == "a" ? 1 : 2; };
  const char* names[] = {"e", "a", "a2"};
  spec.multiply = [=](const std::string& x, const std::string& y) {
    return std::string(names[(idx(x) + idx(y)) % 3]);
  };
  spec.is_element = [](const std::string& s) { return s == "e" || s == "a" || s == "a2"; };
  spec.generators = {"a"};
  return make_group_ring(k, spec);
}

// Upper triangular 2x2 matrices presented by basis e11, e12, e22.
RingPtr triangular(const CoeffRing& k) {
  PresentationSpec spec;
  spec.name = "T2";
  spec.is_element = [](const std::string& s) { return s == "e11" || s == "e12" || s == "e22"; };
  spec.multiply = [](const std::string& a, const std::string& b) -> NamedTerms {
    if (a[2] != b[1]) return {};
    return {{std::string("e") + a[1] + b[2], 1}};
  };
  spec.local_units = [](const std::string&) { return std::vector<std::string>{"e11", "e22"}; };
  spec.idempotents = {"e11", "e22"};
  spec.generators = {"e11", "e12", "e22"};
  return make_free_quotient(k, spec);
}

RingElement random_element(std::mt19937_64& rng, const RingPtr& ring,
                           const std::vector<std::string>& symbols) {
  RingElement e(ring);
  std::uniform_int_distribution<int> c(-4, 4);
  int n = static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i)
    e += RingElement::basis(ring, symbols[rng() % symbols.size()], c(rng));
  return e;
}

void ring_laws(const RingPtr& ring, const std::vector<std::string>& symbols, unsigned seed) {
  std::mt19937_64 rng(seed);
  for (int it = 0; it < 1000; ++it) {
    auto a = random_element(rng, ring, symbols);
    auto b = random_element(rng, ring, symbols);
    auto c = random_element(rng, ring, symbols);
    REQUIRE((a * b) * c == a * (b * c));
    REQUIRE(a * (b + c) == a * b + a * c);
    REQUIRE((a + b) * c == a * c + b * c);
    auto u = local_unit_for(ring, {a, b, c});
    REQUIRE(is_idempotent(u));
    for (auto* r : {&a, &b, &c}) {
      REQUIRE(u * *r == *r);
      REQUIRE(*r * u == *r);
    }
  }
}

}  // namespace

TEST_CASE("direct sum arithmetic") {
  auto R = make_direct_sum(CoeffRing::integers(), {"v", "w", "u"});
  auto v = RingElement::basis(R, "v"), w = RingElement::basis(R, "w");
  CHECK((v + v) == RingElement::basis(R, "v", 2));
  CHECK((v + (-v)).is_zero());
  CHECK((v * w).is_zero());
  CHECK(is_idempotent(v));
  CHECK(!is_idempotent(v.scaled(2)));
  auto e = local_unit_for(R, {v, w});
  CHECK(e == v + w);
  CHECK(e * v == v);
  CHECK(local_unit_for(R, {}).is_zero());
  CHECK_THROWS_AS(RingElement::basis(R, "nope"), SemanticError);
  auto other = make_direct_sum(CoeffRing::integers(), {"v"});
  CHECK_THROWS_AS(v + RingElement::basis(other, "v"), RingMismatch);
}

TEST_CASE("matrix units and Laurent monomials") {
  auto M = make_matrix_ring(CoeffRing::integers(), {"1", "2"});
  auto e12 = RingElement::basis(M, "E[1,2]"), e21 = RingElement::basis(M, "E[2,1]");
  CHECK(e12 * e21 == RingElement::basis(M, "E[1,1]"));
  CHECK(is_idempotent(RingElement::basis(M, "E[1,1]") + RingElement::basis(M, "E[2,2]")));
  CHECK(local_unit_for(M, {e12}) ==
        RingElement::basis(M, "E[1,1]") + RingElement::basis(M, "E[2,2]"));

  auto L = make_laurent(CoeffRing::integers());
  auto x2 = RingElement::basis(L, "x^2"), xm2 = RingElement::basis(L, "x^-2");
  CHECK(x2 * xm2 == RingElement::basis(L, "x^0"));
  auto s = RingElement::basis(L, "x^1") + RingElement::basis(L, "x^-1");
  CHECK(s.named_terms() == NamedTerms{{"x^-1", 1}, {"x^1", 1}});
}

TEST_CASE("modular coefficients reduce") {
  auto R = make_direct_sum(CoeffRing::modular(6), {"v"});
  auto v = RingElement::basis(R, "v", 4);
  CHECK((v + v) == RingElement::basis(R, "v", 2));
  CHECK((v * RingElement::basis(R, "v", 3)).is_zero());
  CHECK_THROWS_AS(RingElement::basis(R, "v", mpq_class(1, 2)), DomainError);
  auto F = make_direct_sum(CoeffRing::prime_field(5), {"v"});
  CHECK(RingElement::basis(F, "v", mpq_class(1, 2)) == RingElement::basis(F, "v", 3));
}

TEST_CASE("coefficient ring parsing") {
  CHECK(CoeffRing::parse("z") == CoeffRing::integers());
  CHECK(CoeffRing::parse("q") == CoeffRing::rationals());
  CHECK(CoeffRing::parse("zmod:6").modulus() == 6);
  CHECK(CoeffRing::parse("fp:7").is_field());
  CHECK_THROWS_AS(CoeffRing::parse("fp:6"), DomainError);
  CHECK_THROWS_AS(CoeffRing::parse("zmod:1"), DomainError);
  CHECK_THROWS_AS(CoeffRing::parse("r"), DomainError);
}

TEST_CASE("property: ring laws per kind") {
  auto k = CoeffRing::integers();
  ring_laws(make_direct_sum(k, {"a", "b", "c"}), {"a", "b", "c"}, 1);
  ring_laws(make_matrix_ring(k, {"1", "2", "3"}),
            {"E[1,1]", "E[1,2]", "E[2,3]", "E[3,1]", "E[2,2]", "E[3,3]"}, 2);
  ring_laws(make_laurent(CoeffRing::rationals()), {"x^-2", "x^-1", "x^0", "x^1", "x^3"}, 3);
  ring_laws(cyclic3_group_ring(CoeffRing::modular(4)), {"e", "a", "a2"}, 4);
  ring_laws(triangular(CoeffRing::prime_field(7)), {"e11", "e12", "e22"}, 5);
}

TEST_CASE("property: finite sums of direct-sum units are idempotent") {
  std::vector<std::string> S{"p", "q", "r", "s", "t"};
  auto R = make_direct_sum(CoeffRing::integers(), S);
  for (unsigned mask = 0; mask < 32; ++mask) {
    RingElement e(R);
    for (unsigned i = 0; i < 5; ++i)
      if (mask & (1u << i)) e += RingElement::basis(R, S[i]);
    CHECK(is_idempotent(e));
  }
}

TEST_CASE("rings without a local-unit rule") {
  PresentationSpec spec;
  spec.name = "nil";
  spec.is_element = [](const std::string& s) { return s == "n"; };
  spec.multiply = [](const std::string&, const std::string&) { return NamedTerms{}; };
  auto R = make_free_quotient(CoeffRing::integers(), spec);
  CHECK_THROWS_AS(local_unit_for(R, {RingElement::basis(R, "n")}), DomainError);
}
