#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "printers.hpp"
#include "pimsner/error.hpp"
#include "pimsner/funcmod.hpp"
#include "pimsner/leavitt.hpp"

using namespace pimsner;

namespace {

struct QuiverFixture {
  Quiver q = Quiver::make({"v", "w"}, {{"e", "v", "w"}, {"f", "v", "v"}, {"g", "w", "v"}});
  CorrespondencePtr c = quiver_correspondence(q, CoeffRing::integers());
  ModulePtr m = c->module();
  RingPtr R = c->ring();
  XVector x(const std::string& e) const { return XVector::basis(m, e); }
  XpVector p(const std::string& e) const { return XpVector::basis(m, e + "*"); }
  RingElement v(const std::string& n) const { return RingElement::basis(R, n); }
};

XVector random_x(std::mt19937_64& rng, const ModulePtr& m) {
  XVector out(m);
  if (m->x_gens().empty()) return out;
  auto dec = m->ring()->idempotent_decomposition();
  for (int i = 0, n = gen::coin(rng, 0, 3); i < n; ++i) {
    std::size_t b = rng() % m->x_gens().size();
    out = out + XVector::make(m, b, RingElement::basis(m->ring(), dec[rng() % dec.size()], gen::coin(rng, -3, 3)));
  }
  return out;
}

XpVector random_p(std::mt19937_64& rng, const ModulePtr& m) {
  XpVector out(m);
  if (m->xp_gens().empty()) return out;
  auto dec = m->ring()->idempotent_decomposition();
  for (int i = 0, n = gen::coin(rng, 0, 3); i < n; ++i) {
    std::size_t b = rng() % m->xp_gens().size();
    out = out + XpVector::make(m, b, RingElement::basis(m->ring(), dec[rng() % dec.size()], gen::coin(rng, -3, 3)));
  }
  return out;
}

CompactOperator random_k(std::mt19937_64& rng, const ModulePtr& m) {
  CompactOperator k(m);
  for (int i = 0, n = gen::coin(rng, 0, 3); i < n; ++i)
    k = k + CompactOperator::elementary(random_x(rng, m), random_p(rng, m));
  return k;
}

}  // namespace

TEST_CASE("quiver pairing table") {
  QuiverFixture f;
  CHECK(pair(f.p("e"), f.x("e")) == f.v("w"));
  CHECK(pair(f.p("f"), f.x("f")) == f.v("v"));
  CHECK(pair(f.p("e"), f.x("f")).is_zero());
  CHECK(pair(XpVector(f.m), f.x("e")).is_zero());
  // right action 1_e 1_v = delta_{r(e), v} 1_e
  CHECK((f.x("e") * f.v("v")).is_zero());
  CHECK(f.x("e") * f.v("w") == f.x("e"));
  CHECK((f.v("v") * f.p("e")).is_zero());
}

TEST_CASE("free module pairing is the dot product") {
  auto R = make_direct_sum(CoeffRing::integers(), {"a", "b"});
  auto m = make_free_module(R, {"1", "2"});
  auto ra = RingElement::basis(R, "a"), rb = RingElement::basis(R, "b");
  XpVector alpha = XpVector::make(m, m->xp_index("1@a"), ra.scaled(2)) +
                   XpVector::make(m, m->xp_index("2@b"), rb.scaled(5));
  XVector beta = XVector::make(m, m->x_index("1@a"), ra.scaled(3)) +
                 XVector::make(m, m->x_index("2@b"), rb.scaled(7)) +
                 XVector::make(m, m->x_index("2@a"), ra);
  CHECK(pair(alpha, beta) == ra.scaled(6) + rb.scaled(35));
}

TEST_CASE("compact products and theta") {
  QuiverFixture f;
  auto t = CompactOperator::elementary(f.x("e"), f.p("e"));
  CHECK(t * t == t);
  CHECK((t * CompactOperator(f.m)).is_zero());
  CHECK(theta_apply(t, f.x("e")) == f.x("e"));
  CHECK(theta_apply(t, XVector(f.m)).is_zero());
  CHECK(theta_apply(t, f.x("f")).is_zero());
  CHECK(theta_apply_right(f.p("e"), t) == f.p("e"));
  CHECK(theta_apply_right(XpVector(f.m), t).is_zero());
  CHECK(theta_apply_right(f.p("g"), t).is_zero());

  // K(R^(I)) = M_I(R): e1 (x) eps2 times e2 (x) eps1 is e1 (x) eps1.
  auto R = make_direct_sum(CoeffRing::integers(), {"1"});
  auto m = make_free_module(R, {"1", "2"});
  auto e = [&](const char* i) { return XVector::basis(m, std::string(i) + "@1"); };
  auto eps = [&](const char* i) { return XpVector::basis(m, std::string(i) + "@1"); };
  CHECK(CompactOperator::elementary(e("1"), eps("2")) * CompactOperator::elementary(e("2"), eps("1")) ==
        CompactOperator::elementary(e("1"), eps("1")));
}

TEST_CASE("module mismatch is reported") {
  QuiverFixture f, g;
  CHECK_THROWS_AS(pair(f.p("e"), g.x("e")), ModuleMismatch);
  CHECK_THROWS_AS(CompactOperator::elementary(f.x("e"), f.p("e")) *
                      CompactOperator::elementary(g.x("e"), g.p("e")),
                  ModuleMismatch);
}

TEST_CASE("fs witnesses") {
  QuiverFixture f;
  auto w = fs_witness(f.m, {f.x("e")}, {});
  REQUIRE(w.found);
  CHECK(w.theta1 == CompactOperator::elementary(f.x("e"), f.p("e")));
  auto empty = fs_witness(f.m, {}, {});
  CHECK(empty.found);
  CHECK(empty.theta1.is_zero());
  CHECK(empty.theta2.is_zero());
  std::vector<XVector> all_x;
  std::vector<XpVector> all_p;
  CompactOperator sum(f.m);
  for (auto& e : f.q.edges()) {
    all_x.push_back(f.x(e.name));
    all_p.push_back(f.p(e.name));
    sum = sum + CompactOperator::elementary(f.x(e.name), f.p(e.name));
  }
  auto w2 = fs_witness(f.m, all_x, all_p);
  REQUIRE(w2.found);
  CHECK(w2.theta1 == sum);
  CHECK(w2.theta2 == sum);

  // R^(I) over a ring with local units: e1 r is fixed by e1 u (x) eps1.
  auto R = make_direct_sum(CoeffRing::integers(), {"a", "b"});
  auto m = make_free_module(R, {"1", "2"});
  auto ra = RingElement::basis(R, "a"), rb = RingElement::basis(R, "b");
  RingElement r = ra.scaled(2) + rb.scaled(3);
  XVector e1 = XVector::basis(m, "1@a") + XVector::basis(m, "1@b");
  XpVector eps1 = XpVector::basis(m, "1@a") + XpVector::basis(m, "1@b");
  RingElement u = local_unit_for(R, {r});
  auto w3 = fs_witness(m, {e1 * r}, {});
  REQUIRE(w3.found);
  CHECK(w3.theta1 == CompactOperator::elementary(e1 * u, eps1));
}

TEST_CASE("fs witness failure is a result") {
  // X = R with a pairing that is multiplication by 2 over Z: theta(x) = x needs c * 2 = 1.
  auto R = make_direct_sum(CoeffRing::integers(), {"a"});
  auto ra = RingElement::basis(R, "a");
  auto m = FunctionalModule::create(R, "2R", {{"x", ra}}, {{"x'", ra}},
                                    [&](std::size_t, std::size_t) { return ra.scaled(2); });
  auto w = fs_witness(m, {XVector::basis(m, 0)}, {});
  CHECK(!w.found);
  CHECK(!w.detail.empty());
  auto Rq = make_direct_sum(CoeffRing::rationals(), {"a"});
  auto rq = RingElement::basis(Rq, "a");
  auto mq = FunctionalModule::create(Rq, "2R", {{"x", rq}}, {{"x'", rq}},
                                     [&](std::size_t, std::size_t) { return rq.scaled(2); });
  auto wq = fs_witness(mq, {XVector::basis(mq, 0)}, {XpVector::basis(mq, 0)});
  REQUIRE(wq.found);
  CHECK(wq.theta1.entries().begin()->second == rq.scaled(mpq_class(1, 2)));
}

TEST_CASE("functional homs") {
  QuiverFixture f;
  CHECK(check_functional_hom(identity_hom(f.m)));
  REQUIRE(f.c->hom());
  CHECK(check_functional_hom(*f.c->hom()));
  FunctionalHom twice = *f.c->hom();
  for (auto& u : twice.U) u = u.scaled(2);
  CHECK(!check_functional_hom(twice));

  const FunctionalHom& h = *f.c->hom();
  auto k = CompactOperator::elementary(f.x("f"), f.p("g"));  // r(f) = v = r(g)
  auto img = induced_compact_map(h, k);
  REQUIRE(img.entries().size() == 1);
  auto key = img.entries().begin()->first;
  CHECK(h.target->x_gens()[key.first].name == "f@v");
  CHECK(h.target->xp_gens()[key.second].name == "g@v");
  CHECK(img.entries().begin()->second == f.v("v"));
  CHECK(CompactOperator::elementary(f.x("e"), f.p("g")).is_zero());
  CHECK(induced_compact_map(h, CompactOperator(f.m)).is_zero());
  CHECK(induced_compact_map(identity_hom(f.m), k) == k);
}

TEST_CASE("direct sums") {
  QuiverFixture f;
  auto zero = FunctionalModule::create(f.R, "0", {}, {}, [&](std::size_t, std::size_t) { return RingElement(f.R); });
  auto s = direct_sum(f.m, zero);
  CHECK(s->x_gens().size() == f.m->x_gens().size());
  auto ring_mod = make_ring_module(f.R);
  auto t = direct_sum(ring_mod, f.m);
  CHECK(t->x_gens().size() == 2 + 3);
  CHECK(t->x_gens()[0].name == "1.v");
  CHECK(t->x_gens()[2].name == "2.e");
  for (std::size_t bp = 0; bp < 2; ++bp)
    for (std::size_t b = 2; b < 5; ++b) CHECK(t->g(bp, b).is_zero());
  auto other = make_direct_sum(CoeffRing::integers(), {"v"});
  CHECK_THROWS_AS(direct_sum(f.m, make_ring_module(other)), RingMismatch);
}

TEST_CASE("tensor products") {
  QuiverFixture f;
  auto id = identity_correspondence(f.R);
  auto xr = tensor(f.c, id);
  CHECK(xr->module()->x_gens().size() == f.m->x_gens().size());
  auto rx = tensor(id, f.c);
  CHECK(rx->module()->x_gens().size() == f.m->x_gens().size());
  // pairing is preserved under the relabeling e -> e(x)r(e), e* -> r(e)(x)e*
  const auto& T = xr->module();
  for (auto& e : f.q.edges())
    for (auto& e2 : f.q.edges()) {
      std::string rv = f.q.vertices()[e.range], rv2 = f.q.vertices()[e2.range];
      CHECK(T->g(T->xp_index(rv + "(x)" + e.name + "*"), T->x_index(e2.name + "(x)" + rv2)) ==
            f.m->g(f.m->xp_index(e.name + "*"), f.m->x_index(e2.name)));
    }
  REQUIRE(xr->hom());
  CHECK(check_functional_hom(*xr->hom()));
  CHECK(xr->check_adjointable());

  auto c2 = quiver_correspondence(gen::a2(), CoeffRing::integers());
  auto sq = tensor(c2, c2);
  CHECK(sq->module()->x_gens().empty());

  auto xx = tensor(f.c, f.c);
  // paths of length 2: ef? r(e)=w=s(g): eg; f f, f e; g f, g e
  CHECK(xx->module()->x_gens().size() == 5);
  REQUIRE(xx->hom());
  CHECK(check_functional_hom(*xx->hom()));
  CHECK(xx->check_adjointable());
  CHECK(xx->check_left_module());
  CHECK(check_nondegenerate(xx->module()));
  auto other = quiver_correspondence(Quiver::rose(2), CoeffRing::integers());
  CHECK_THROWS_AS(tensor(f.c, other), RingMismatch);
}

TEST_CASE("non-degeneracy") {
  QuiverFixture f;
  CHECK(check_nondegenerate(f.m));
  auto R = make_direct_sum(CoeffRing::integers(), {"a"});
  auto ra = RingElement::basis(R, "a");
  auto deg = FunctionalModule::create(R, "deg", {{"x", ra}, {"y", ra}}, {{"x'", ra}},
                                      [&](std::size_t, std::size_t b) { return b == 0 ? ra : RingElement(R); });
  CHECK(!check_nondegenerate(deg));
  CHECK_THROWS_AS(FunctionalModule::create(R, "bad", {{"x", ra.scaled(2)}}, {}, nullptr), DomainError);
}

TEST_CASE("property: compact operator algebra on bundled modules") {
  std::mt19937_64 rng(99);
  std::vector<CorrespondencePtr> corrs;
  corrs.push_back(QuiverFixture().c);
  corrs.push_back(quiver_correspondence(Quiver::rose(3), CoeffRing::rationals()));
  corrs.push_back(quiver_correspondence(gen::random_quiver(rng), CoeffRing::modular(6)));
  corrs.push_back(tensor(corrs[0], corrs[0]));
  for (auto& c : corrs) {
    const ModulePtr& m = c->module();
    if (m->x_gens().empty()) continue;
    const FunctionalHom& h = *c->hom();
    for (int it = 0; it < 500; ++it) {
      auto k1 = random_k(rng, m), k2 = random_k(rng, m), k3 = random_k(rng, m);
      REQUIRE((k1 * k2) * k3 == k1 * (k2 * k3));
      auto y = random_x(rng, m);
      REQUIRE(theta_apply(k1 * k2, y) == theta_apply(k1, theta_apply(k2, y)));
      auto psi = random_p(rng, m);
      REQUIRE(theta_apply_right(psi, k1 * k2) == theta_apply_right(theta_apply_right(psi, k1), k2));
      REQUIRE(induced_compact_map(h, k1 * k2) == induced_compact_map(h, k1) * induced_compact_map(h, k2));
    }
    // adjoint law and f theta = theta_{f x} for f = Delta(r)
    auto dec = m->ring()->idempotent_decomposition();
    for (int it = 0; it < 100; ++it) {
      RingElement r = RingElement::basis(m->ring(), dec[rng() % dec.size()], gen::coin(rng, -2, 2));
      auto x = random_x(rng, m), y = random_x(rng, m);
      auto phi = random_p(rng, m);
      REQUIRE(pair(phi, c->left(r, x)) == pair(c->right(phi, r), x));
      auto th = CompactOperator::elementary(x, phi);
      REQUIRE(c->left(r, theta_apply(th, y)) == theta_apply(CompactOperator::elementary(c->left(r, x), phi), y));
      REQUIRE(theta_apply(th, c->left(r, y)) == theta_apply(CompactOperator::elementary(x, c->right(phi, r)), y));
    }
    CHECK(c->check_adjointable());
    CHECK(c->check_left_module());
    CHECK(c->check_nondegenerate_action());
  }
}

TEST_CASE("property: U and V are injective when the target is non-degenerate") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 20; ++it) {
    auto c = quiver_correspondence(gen::random_quiver(rng), CoeffRing::integers());
    const FunctionalHom& h = *c->hom();
    REQUIRE(check_functional_hom(h));
    REQUIRE(check_nondegenerate(h.target));
    for (int j = 0; j < 20; ++j) {
      auto x = random_x(rng, c->module());
      if (!x.is_zero()) CHECK(!h.apply_u(x).is_zero());
      auto p = random_p(rng, c->module());
      if (!p.is_zero()) CHECK(!h.apply_v(p).is_zero());
    }
  }
}

TEST_CASE("compact left action") {
  QuiverFixture f;
  auto k = f.c->compact_left_action(f.v("v"));
  CHECK(k == CompactOperator::elementary(f.x("e"), f.p("e")) + CompactOperator::elementary(f.x("f"), f.p("f")));
  auto sink = quiver_correspondence(gen::a2(), CoeffRing::integers());
  CHECK(sink->compact_left_action(RingElement::basis(sink->ring(), "w")).is_zero());
}
