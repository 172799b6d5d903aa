#include <doctest.h>

#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pimsner/pimsner.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  pimsner_string_free(s);
  return out;
}

long det(const std::vector<long>& a, std::size_t cols, const std::vector<std::size_t>& r,
         const std::vector<std::size_t>& c) {
  std::size_t k = r.size();
  if (k == 0) return 1;
  long total = 0;
  std::vector<std::size_t> rest_c;
  for (std::size_t j = 0; j < k; ++j) {
    rest_c.assign(c.begin(), c.end());
    rest_c.erase(rest_c.begin() + static_cast<long>(j));
    std::vector<std::size_t> rest_r(r.begin() + 1, r.end());
    long term = a[r[0] * cols + c[j]] * det(a, cols, rest_r, rest_c);
    total += j % 2 ? -term : term;
  }
  return total;
}

void choose(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out) {
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == k) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

// Invariant factors from gcds of k x k minors.
std::vector<long> invariant_factors(const std::vector<long>& a, std::size_t rows, std::size_t cols) {
  std::vector<long> out;
  long prev = 1;
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    std::vector<std::vector<std::size_t>> rs, cs;
    choose(rows, k, rs);
    choose(cols, k, cs);
    long g = 0;
    for (auto& r : rs)
      for (auto& c : cs) g = std::gcd(g, det(a, cols, r, c));
    if (g == 0) {
      out.resize(std::min(rows, cols), 0);
      return out;
    }
    out.push_back(g / prev);
    prev = g;
  }
  return out;
}

}  // namespace

TEST_CASE("smith diagonal matches determinantal divisors") {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<long> entry(-6, 6);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  for (int t = 0; t < 300; ++t) {
    std::size_t r = dim(rng), c = dim(rng);
    std::vector<long> a(r * c);
    for (auto& x : a) x = entry(rng);
    std::vector<long> diag(std::min(r, c), -1);
    std::size_t rank = 99;
    REQUIRE(pimsner_smith_diagonal(a.data(), r, c, diag.data(), &rank) == PIMSNER_OK);
    auto expect = invariant_factors(a, r, c);
    CHECK(diag == expect);
    std::size_t nz = 0;
    for (long d : expect) nz += d != 0;
    CHECK(rank == nz);
  }
  std::size_t rank = 0;
  CHECK(pimsner_smith_diagonal(nullptr, 0, 0, nullptr, &rank) == PIMSNER_OK);
  CHECK(rank == 0);
  CHECK(pimsner_smith_diagonal(nullptr, 2, 2, nullptr, &rank) == PIMSNER_ERR_ARGUMENT);
}

TEST_CASE("quiver handles") {
  for (std::size_t d = 2; d <= 6; ++d) {
    pimsner_quiver* q = nullptr;
    REQUIRE(pimsner_quiver_rose(d, &q) == PIMSNER_OK);
    CHECK(pimsner_quiver_vertex_count(q) == 1);
    CHECK(pimsner_quiver_edge_count(q) == d);
    char* s = nullptr;
    REQUIRE(pimsner_quiver_k_group(q, "z", 0, &s) == PIMSNER_OK);
    std::string expect = d == 2 ? "0" : "Z/" + std::to_string(d - 1);
    CHECK(take(s) == expect);
    pimsner_quiver_free(q);
  }
  pimsner_quiver* q = nullptr;
  REQUIRE(pimsner_quiver_parse("vertices: v w\nedges:\n  e: v -> w\n", &q) == PIMSNER_OK);
  char* s = nullptr;
  REQUIRE(pimsner_quiver_k_group(q, "q", 0, &s) == PIMSNER_OK);
  CHECK(take(s) == "Z");
  CHECK(pimsner_quiver_k_group(q, "q", -1, &s) == PIMSNER_ERR_ARGUMENT);
  CHECK(pimsner_quiver_k_group(q, "zmod:6", 0, &s) == PIMSNER_ERR_PARSE);
  pimsner_quiver_free(q);

  q = nullptr;
  CHECK(pimsner_quiver_parse("vertices: v\nedges:\n  e: v -> u\n", &q) == PIMSNER_ERR_PARSE);
  CHECK(q == nullptr);
  CHECK(std::string(pimsner_last_error()).find("line 3") != std::string::npos);
}

TEST_CASE("group handles") {
  pimsner_group* g = nullptr;
  REQUIRE(pimsner_group_odometer(&g) == PIMSNER_OK);
  char* s = nullptr;
  REQUIRE(pimsner_group_act(g, "a", "111", &s) == PIMSNER_OK);
  CHECK(take(s) == "000");
  REQUIRE(pimsner_group_act(g, "a^5", "0000", &s) == PIMSNER_OK);
  CHECK(take(s) == "1010");
  REQUIRE(pimsner_group_restriction(g, "a", "1", &s) == PIMSNER_OK);
  CHECK(take(s) == "a");
  REQUIRE(pimsner_group_restriction(g, "a", "0", &s) == PIMSNER_OK);
  CHECK(take(s) == "e");
  int eq = -1, cert = -1;
  REQUIRE(pimsner_group_equal(g, "a.a^-1", "e", 6, &eq, &cert) == PIMSNER_OK);
  CHECK(eq == 1);
  CHECK(cert == 1);
  REQUIRE(pimsner_group_equal(g, "a^2", "e", 6, &eq, &cert) == PIMSNER_OK);
  CHECK(eq == 0);
  CHECK(pimsner_group_equal(g, "a", "e", 0, &eq, &cert) == PIMSNER_ERR_ARGUMENT);
  CHECK(pimsner_group_act(g, "b", "0", &s) == PIMSNER_ERR_PARSE);
  CHECK(pimsner_group_act(g, "a", "2", &s) == PIMSNER_ERR_PARSE);
  pimsner_group_free(g);

  g = nullptr;
  REQUIRE(pimsner_group_parse("alphabet: 0 1\na = (perm 0 1)(e, e)\nb = (a, c)\nc = (a, d)\nd = (e, b)\n", &g) ==
          PIMSNER_OK);
  REQUIRE(pimsner_group_equal(g, "b.c", "d", 8, &eq, &cert) == PIMSNER_OK);
  CHECK(eq == 1);
  CHECK(cert == 1);
  pimsner_group_free(g);
  CHECK(pimsner_group_parse("a = (e, e)\n", &g) == PIMSNER_ERR_PARSE);
}

TEST_CASE("run results") {
  auto run = [](const char* command, const char* text, const char* matrix, long n) {
    pimsner_config* c = pimsner_config_new(command);
    if (text) REQUIRE(pimsner_config_set_input_text(c, "mem", text) == PIMSNER_OK);
    if (matrix) REQUIRE(pimsner_config_set_matrix(c, matrix) == PIMSNER_OK);
    REQUIRE(pimsner_config_set_int(c, "fock_depth", n) == PIMSNER_OK);
    REQUIRE(pimsner_config_set_string(c, "format", "text") == PIMSNER_OK);
    pimsner_result* r = nullptr;
    REQUIRE(pimsner_run(c, &r) == PIMSNER_OK);
    pimsner_config_free(c);
    std::pair<int, std::string> out{pimsner_result_exit_code(r), pimsner_result_output(r)};
    pimsner_result_free(r);
    return out;
  };
  const char* rose = "vertices: v\nedges:\n  a: v -> v\n  b: v -> v\n  c: v -> v\n";
  auto k = run("kgroups", rose, nullptr, 6);
  CHECK(k.first == 0);
  CHECK(k.second.find("degree 0: kernel 0, cokernel Z/2") != std::string::npos);
  CHECK(run("kgroups", "vertices v\n", nullptr, 6).first == 2);
  CHECK(run("verify", rose, nullptr, 1).first == 3);
  CHECK(run("verify", rose, nullptr, 3).first == 0);
  CHECK(run("pv", nullptr, "1 2; 3 4; 5 6", 6).first == 2);
  auto p = run("pv", nullptr, "-1", 6);
  CHECK(p.first == 0);
  CHECK(p.second.find("cokernel Z/2") != std::string::npos);

  pimsner_config* c = pimsner_config_new("kgroups");
  CHECK(pimsner_config_set_int(c, "depth", 3) == PIMSNER_ERR_ARGUMENT);
  CHECK(pimsner_config_set_string(c, "colour", "red") == PIMSNER_ERR_ARGUMENT);
  CHECK(pimsner_config_set_input_file(c, "/nonexistent/file") == PIMSNER_ERR_IO);
  pimsner_config_free(c);
  CHECK(std::string(pimsner_status_name(PIMSNER_ERR_DEPTH)) == "insufficient depth");
}

TEST_CASE("semantic errors carry a line") {
  auto message = [](const char* text, bool group) {
    pimsner_status s;
    if (group) {
      pimsner_group* g = nullptr;
      s = pimsner_group_parse(text, &g);
      pimsner_group_free(g);
    } else {
      pimsner_quiver* q = nullptr;
      s = pimsner_quiver_parse(text, &q);
      pimsner_quiver_free(q);
    }
    CHECK(s == PIMSNER_ERR_PARSE);
    return std::string(pimsner_last_error());
  };
  CHECK(message("vertices: v\nedges:\n  e: v -> v\n  e: v -> v\n", false).rfind("line 4:", 0) == 0);
  CHECK(message("vertices: v\n  w v\n", false).rfind("line 2:", 0) == 0);
  CHECK(message("alphabet: 0 1\na = (perm 0 1)(e, e)\nb = (a, q)\n", true).rfind("line 3:", 0) == 0);
  CHECK(message("alphabet: 0 1\na = (perm 0 1)(e, e)\na = (e, e)\n", true).rfind("line 3:", 0) == 0);
  CHECK(message("alphabet: 0 1\na = (perm 0 0)(e, e)\n", true).rfind("line 2:", 0) == 0);
  CHECK(message("alphabet: 0 0\n", true).rfind("line 1:", 0) == 0);
}
