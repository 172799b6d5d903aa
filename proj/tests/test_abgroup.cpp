#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "printers.hpp"
#include "pimsner/abgroup.hpp"
#include "pimsner/error.hpp"

using namespace pimsner;

namespace {

bool is_diagonal_chain(const IntMatrix& s) {
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) != 0) return false;
  const std::size_t lim = std::min(s.rows(), s.cols());
  bool seen_zero = false;
  for (std::size_t i = 0; i < lim; ++i) {
    if (s(i, i) < 0) return false;
    if (seen_zero && s(i, i) != 0) return false;
    if (s(i, i) == 0) seen_zero = true;
    if (i + 1 < lim && s(i + 1, i + 1) != 0 &&
        !mpz_divisible_p(s(i + 1, i + 1).get_mpz_t(), s(i, i).get_mpz_t()))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("hand reduction of [[2,4],[6,8]]") {
  // R2 -= 3 R1 -> [[2,4],[0,-4]]; C2 -= 2 C1 -> [[2,0],[0,-4]]; negate -> diag(2,4).
  IntMatrix a{{2, 4}, {6, 8}};
  IntMatrix h = a;
  h.add_row(1, 0, -3);
  h.add_col(1, 0, -2);
  h.negate_row(1);
  CHECK(h == IntMatrix{{2, 0}, {0, 4}});
  auto snf = smith_normal_form(a);
  CHECK(snf.S == h);
  CHECK(snf.U * a * snf.V == snf.S);
}

TEST_CASE("snf trivial shapes") {
  auto id = smith_normal_form(IntMatrix::identity(3));
  CHECK(id.S == IntMatrix::identity(3));
  CHECK(id.U == IntMatrix::identity(3));
  CHECK(id.V == IntMatrix::identity(3));
  CHECK(smith_normal_form(IntMatrix::zero(2, 2)).S == IntMatrix::zero(2, 2));
  auto empty = smith_normal_form(IntMatrix(0, 3));
  CHECK(empty.rank == 0);
  CHECK(empty.V == IntMatrix::identity(3));
  CHECK(kernel_basis(IntMatrix(0, 3)).cols() == 3);
  CHECK(cokernel(IntMatrix(2, 0)) == FgAbelianGroup::free(2));
}

TEST_CASE("snf matches determinantal divisors") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 400; ++it) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IntMatrix a = oracle::random_matrix(rng, r, c, -9, 9);
    auto snf = smith_normal_form(a);
    auto expect = oracle::determinantal_invariants(a);
    CHECK(snf.diagonal() == expect);
  }
}

TEST_CASE("kernel and cokernel examples") {
  CHECK(kernel_basis(IntMatrix::identity(3)).cols() == 0);
  IntMatrix col{{1}, {-1}};
  CHECK(kernel_basis(col).cols() == 0);
  auto k = kernel_basis(IntMatrix{{0}});
  CHECK(k.cols() == 1);
  CHECK(abs(k(0, 0)) == 1);
  CHECK(cokernel(IntMatrix{{1 - 3}}) == FgAbelianGroup::cyclic(2));
  CHECK(cokernel(col) == FgAbelianGroup::free(1));
  CHECK(cokernel(IntMatrix{{0}}) == FgAbelianGroup::free(1));
}

TEST_CASE("les_segment examples") {
  auto z = FgAbelianGroup::free(1);
  auto s0 = les_segment(IntMatrix{{0}}, z);
  CHECK(s0.kernel == z);
  CHECK(s0.cokernel == z);
  auto s1 = les_segment(IntMatrix{{-1}}, z);
  CHECK(s1.kernel.is_trivial());
  CHECK(s1.cokernel.is_trivial());
  auto s2 = les_segment(IntMatrix{{2}}, FgAbelianGroup::cyclic(4));
  CHECK(s2.kernel == FgAbelianGroup::cyclic(2));
  CHECK(s2.cokernel == FgAbelianGroup::cyclic(2));
  CHECK_THROWS_AS(les_segment(IntMatrix{{2}}, FgAbelianGroup::from_cyclic(1, {2})), DomainError);
}

TEST_CASE("les_segment over Z/m agrees with enumeration") {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 150; ++it) {
    std::size_t r = 1 + rng() % 3, c = 1 + rng() % 3;
    long m = 2 + static_cast<long>(rng() % 7);
    IntMatrix a = oracle::random_matrix(rng, r, c, -6, 6);
    std::vector<std::vector<long>> rows(r, std::vector<long>(c));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) rows[i][j] = a(i, j).get_si();
    auto counts = oracle::enumerate_mod(rows, c, m);
    auto seg = les_segment(a, FgAbelianGroup::cyclic(m));
    CHECK(seg.kernel.free_rank() == 0);
    CHECK(oracle::group_orders(seg.kernel) == counts.kernel_orders);
    long domain = 1;
    for (std::size_t i = 0; i < r; ++i) domain *= m;
    long coker_size = 1;
    for (auto& d : seg.cokernel.torsion()) coker_size *= d.get_si();
    CHECK(seg.cokernel.free_rank() == 0);
    CHECK(coker_size * counts.image_size == domain);
  }
}

TEST_CASE("free coefficients agree with kernel_basis and cokernel") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    IntMatrix a = oracle::random_matrix(rng, 1 + rng() % 4, 1 + rng() % 4, -5, 5);
    for (std::size_t r = 1; r <= 3; ++r) {
      auto seg = les_segment(a, FgAbelianGroup::free(r));
      CHECK(seg.kernel == FgAbelianGroup::free(kernel_basis(a).cols() * r));
      CHECK(seg.cokernel == cokernel(a).power(r));
    }
  }
}

TEST_CASE("property: snf certificate on random matrices") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 1500; ++it) {
    std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
    IntMatrix a = oracle::random_matrix(rng, r, c, -9, 9);
    auto snf = smith_normal_form(a);
    REQUIRE(snf.U * a * snf.V == snf.S);
    REQUIRE(abs(determinant(snf.U)) == 1);
    REQUIRE(abs(determinant(snf.V)) == 1);
    REQUIRE(is_diagonal_chain(snf.S));
    // rank-nullity
    auto k = kernel_basis(a);
    CHECK(k.cols() + snf.rank == c);
    CHECK((a * k).is_zero());
    // permutation independence
    std::vector<std::size_t> rp(r), cp(c);
    for (std::size_t i = 0; i < r; ++i) rp[i] = i;
    for (std::size_t j = 0; j < c; ++j) cp[j] = j;
    std::shuffle(rp.begin(), rp.end(), rng);
    std::shuffle(cp.begin(), cp.end(), rng);
    CHECK(cokernel(a.permuted(rp, cp)) == cokernel(a));
  }
}

TEST_CASE("abelian group normal form") {
  auto g = FgAbelianGroup::from_cyclic(1, {6, 4, 1, 0});
  CHECK(g.free_rank() == 2);
  CHECK(g.torsion() == std::vector<mpz_class>{2, 12});
  CHECK(g.to_string() == "Z^2 + Z/2 + Z/12");
  CHECK(FgAbelianGroup::cyclic(2).direct_sum(FgAbelianGroup::cyclic(3)) == FgAbelianGroup::cyclic(6));
  CHECK(FgAbelianGroup().to_string() == "0");
}

TEST_CASE("determinant") {
  CHECK(determinant(IntMatrix{{2, 4}, {6, 8}}) == -8);
  CHECK(determinant(IntMatrix{{0, 1}, {1, 0}}) == -1);
  CHECK(determinant(IntMatrix{{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}) == 0);
  std::mt19937_64 rng(5);
  for (int it = 0; it < 100; ++it) {
    std::size_t n = 1 + rng() % 5;
    IntMatrix a = oracle::random_matrix(rng, n, n, -9, 9);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    CHECK(determinant(a) == oracle::minor_det(a, all, all));
  }
}

TEST_CASE("matrix parsing") {
  CHECK(IntMatrix::parse("1 0; 0 1") == IntMatrix::identity(2));
  CHECK(IntMatrix::parse("-1") == IntMatrix{{-1}});
  CHECK_THROWS_AS(IntMatrix::parse("1 2; 3"), DomainError);
  CHECK_THROWS_AS(IntMatrix::parse("1 x"), DomainError);
}

TEST_CASE("coefficient groups and assembly") {
  auto c = CoeffGroup::cyclic(12);
  REQUIRE(c.components.size() == 2);
  CHECK(c.to_string() == "Z/4 + Z/3");
  CoeffGroup bad;
  bad.components.push_back({CoeffComponent::Kind::Cyclic, 0, 6});
  CHECK_THROWS_AS(bad.validate(), DomainError);

  // rose_1 style map [0] with E_0 = Z, E_1 = Z/2.
  std::map<int, CoeffGroup> presets{{-1, CoeffGroup::zero()}, {0, CoeffGroup::free(1)}, {1, CoeffGroup::cyclic(2)}};
  auto rep = evaluate_les(IntMatrix{{0}}, presets);
  REQUIRE(rep.degrees.size() == 3);
  CHECK(rep.degrees[1].n == 0);
  CHECK(rep.degrees[1].split_status == "split-assembled");
  CHECK(rep.degrees[1].assembled->finite == FgAbelianGroup::free(1));
  // E_1 gets coker(Z/2) + ker on E_0 = Z/2 + Z.
  CHECK(rep.degrees[2].assembled->finite == FgAbelianGroup::from_cyclic(1, {2}));
  // Kernel with torsion blocks assembly one degree up.
  std::map<int, CoeffGroup> p2{{0, CoeffGroup::cyclic(2)}, {1, CoeffGroup::free(1)}};
  auto rep2 = evaluate_les(IntMatrix{{0}}, p2);
  CHECK(rep2.degrees[1].split_status == "unassembled");
  CHECK(!rep2.degrees[1].assembled);

  std::map<int, CoeffGroup> pq{{0, CoeffGroup::free(1)}, {1, CoeffGroup::cyclic(2).add(CoeffGroup::countable_free())}};
  auto rq = evaluate_les(IntMatrix{{-2}}, pq);
  // Z/2 summand: -2 acts as 0. Countable part: coker (Z/2)^(N).
  CHECK(rq.degrees[1].assembled->to_string() == "Z/2 + (Z/2)^(N)");
}

TEST_CASE("factorize") {
  auto f = factorize(360);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == std::pair<mpz_class, unsigned>{2, 3});
  CHECK(f[2] == std::pair<mpz_class, unsigned>{5, 1});
  CHECK(factorize(1).empty());
}
