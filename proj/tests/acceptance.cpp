// One line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "generators.hpp"
#include "oracles.hpp"
#include "pimsner/abgroup.hpp"
#include "pimsner/fock.hpp"
#include "pimsner/funcmod.hpp"
#include "pimsner/leavitt.hpp"
#include "pimsner/selfsim.hpp"

using namespace pimsner;

namespace {

constexpr int kSnfSamples = 10000;
constexpr std::size_t kSnfMaxDim = 6;
constexpr long kSnfEntry = 9;
constexpr double kSnfBudgetSeconds = 30.0;
constexpr int kSnfOracleSamples = 500;
constexpr std::uint64_t kSnfSeed = 1001;

constexpr int kRandomQuivers = 20;
constexpr std::size_t kQuiverMaxVertices = 4;
constexpr std::size_t kQuiverMaxEdges = 6;
constexpr std::size_t kFockDepth = 6;
constexpr std::size_t kDefectWordBound = 4;
constexpr std::uint64_t kQuiverSeed = 2025;

constexpr std::size_t kHomotopyWordBound = 3;

constexpr std::size_t kMatrixMaxIndex = 5;
constexpr int kMatrixPairs = 1000;
constexpr std::uint64_t kMatrixSeed = 606;

constexpr long kOdometerDepth = 10;
constexpr std::uint64_t kOdometerSeed = 7;

constexpr std::size_t kRoseMin = 2, kRoseMax = 5;

constexpr int kLeavittQuivers = 30;
constexpr int kLeavittTriples = 60;
constexpr std::uint64_t kLeavittSeed = 909;
constexpr std::size_t kP0TopDegree = 4;

struct Outcome {
  bool ok = true;
  std::string note;
  void fail(const std::string& why) {
    if (ok) note = why;
    ok = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

bool divisibility_chain(const IntMatrix& s) {
  const std::size_t lim = std::min(s.rows(), s.cols());
  for (std::size_t i = 0; i < s.rows(); ++i)
    for (std::size_t j = 0; j < s.cols(); ++j)
      if (i != j && s(i, j) != 0) return false;
  for (std::size_t i = 0; i < lim; ++i) {
    if (s(i, i) < 0) return false;
    if (i + 1 == lim) break;
    const mpz_class& a = s(i, i);
    const mpz_class& b = s(i + 1, i + 1);
    if (a == 0 && b != 0) return false;
    if (a != 0 && !mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) return false;
  }
  return true;
}

Outcome snf_correctness() {
  Outcome o;
  std::mt19937_64 rng(kSnfSeed);
  auto start = std::chrono::steady_clock::now();
  for (int it = 0; it < kSnfSamples && o.ok; ++it) {
    std::size_t r = 1 + rng() % kSnfMaxDim, c = 1 + rng() % kSnfMaxDim;
    IntMatrix a = oracle::random_matrix(rng, r, c, -kSnfEntry, kSnfEntry);
    auto snf = smith_normal_form(a);
    if (!(snf.U * a * snf.V == snf.S)) o.fail("U A V != S at sample " + std::to_string(it));
    if (abs(determinant(snf.U)) != 1 || abs(determinant(snf.V)) != 1)
      o.fail("non-unimodular transform at sample " + std::to_string(it));
    if (!divisibility_chain(snf.S)) o.fail("divisibility chain broken at sample " + std::to_string(it));
    if (it < kSnfOracleSamples && snf.diagonal() != oracle::determinantal_invariants(a))
      o.fail("diagonal differs from determinantal divisors at sample " + std::to_string(it));
  }
  double t = seconds_since(start);
  if (t >= kSnfBudgetSeconds) o.fail("took " + std::to_string(t) + " s");
  std::ostringstream ss;
  ss << kSnfSamples << " matrices, " << t << " s";
  if (o.ok) o.note = ss.str();
  return o;
}

FgAbelianGroup oracle_coker(const IntMatrix& m) {
  std::size_t nonzero = 0;
  std::vector<mpz_class> tors;
  for (auto& d : oracle::determinantal_invariants(m))
    if (d != 0) {
      ++nonzero;
      tors.push_back(d);
    }
  return FgAbelianGroup::from_cyclic(m.rows() - nonzero, tors);
}

FgAbelianGroup oracle_ker(const IntMatrix& m) {
  std::size_t nonzero = 0;
  for (auto& d : oracle::determinantal_invariants(m)) nonzero += d != 0;
  return FgAbelianGroup::free(m.cols() - nonzero);
}

const LesDegree& degree(const LesReport& r, int n) {
  for (auto& d : r.degrees)
    if (d.n == n) return d;
  throw std::runtime_error("degree missing");
}

Outcome leavitt_k0() {
  Outcome o;
  auto presets = field_presets(CoeffRing::rationals());
  auto check = [&](const std::string& name, const Quiver& q, const IntMatrix& m, const FgAbelianGroup& k0,
                   const FgAbelianGroup& kernel) {
    // oracle on the hand-written matrix first, then the pipeline
    if (oracle_coker(m) != k0) o.fail(name + ": oracle cokernel disagrees with the expected value");
    if (oracle_ker(m) != kernel) o.fail(name + ": oracle kernel disagrees with the expected value");
    auto rep = k_groups(q, presets);
    const LesDegree& d0 = degree(rep, 0);
    if (!d0.assembled || d0.assembled->finite != k0 || d0.assembled->countable)
      o.fail(name + ": K0 = " + (d0.assembled ? d0.assembled->to_string() : "-"));
    if (d0.kernel.finite != kernel) o.fail(name + ": kernel = " + d0.kernel.to_string());
  };
  for (std::size_t d = 2; d <= 6; ++d) {
    IntMatrix m{{1 - static_cast<long>(d)}};
    check("rose_" + std::to_string(d), Quiver::rose(d), m, FgAbelianGroup::cyclic(d - 1), FgAbelianGroup{});
  }
  check("A2", gen::a2(), IntMatrix{{1}, {-1}}, FgAbelianGroup::free(1), FgAbelianGroup{});
  check("rose_1", Quiver::rose(1), IntMatrix{{0}}, FgAbelianGroup::free(1), FgAbelianGroup::free(1));
  if (o.ok) o.note = "rose_2..6, A2, rose_1";
  return o;
}

std::vector<Quiver> criterion_quivers() {
  std::mt19937_64 rng(kQuiverSeed);
  std::vector<Quiver> out;
  for (int i = 0; i < kRandomQuivers; ++i) out.push_back(gen::random_quiver(rng, kQuiverMaxVertices, kQuiverMaxEdges));
  return out;
}

FockPtr fock_for(const Quiver& q, std::size_t depth) {
  return TruncatedFock::create(quiver_correspondence(q, CoeffRing::integers()), depth);
}

Outcome covariant_relation(const std::vector<Quiver>& qs) {
  Outcome o;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < qs.size(); ++i) {
    auto f = fock_for(qs[i], kFockDepth);
    auto r = covariant_check(f, canonical_representation(f));
    checked += r.checked;
    if (!r.ok) o.fail("quiver " + std::to_string(i) + ": " + r.detail);
    if (r.degrees.size() != kFockDepth) o.fail("quiver " + std::to_string(i) + ": not every degree checked");
  }
  if (o.ok) o.note = std::to_string(qs.size()) + " quivers, " + std::to_string(checked) + " identities";
  return o;
}

Outcome defect_support(const std::vector<Quiver>& qs) {
  Outcome o;
  std::size_t words = 0;
  for (std::size_t i = 0; i < qs.size() && o.ok; ++i) {
    auto f = fock_for(qs[i], kFockDepth);
    const ModulePtr& m = f->module();
    for (std::size_t k = 0; k <= kDefectWordBound; ++k)
      for (std::size_t l = 0; k + l <= kDefectWordBound; ++l) {
        if (k + l == 0) continue;
        auto mus = k ? f->basis(Side::X, k) : std::vector<FockKey>{FockKey{}};
        auto nus = l ? f->basis(Side::Xp, l) : std::vector<FockKey>{FockKey{}};
        for (auto& mu : mus)
          for (auto& nu : nus) {
            std::vector<XVector> p;
            std::vector<XpVector> phi;
            for (std::size_t j = 0; j < k; ++j) p.push_back(XVector::basis(m, mu.tuple[j]));
            for (std::size_t j = 0; j < l; ++j) phi.push_back(XpVector::basis(m, nu.tuple[j]));
            auto r = defect_support_check(p, phi, f);
            ++words;
            if (!r.ok) o.fail("quiver " + std::to_string(i) + ": " + r.detail);
          }
      }
  }
  if (o.ok) o.note = std::to_string(words) + " words T_mu T_nu*";
  return o;
}

Outcome homotopy() {
  Outcome o;
  Poly t = Poly::t(), one{1};
  Poly sum = t * (Poly{2} * t - t * t * t) + (one - t * t) * (one - t * t);
  if (sum.to_string() != "1" || !homotopy_coefficient_identity()) o.fail("t(2t - t^3) + (1 - t^2)^2 != 1");
  std::vector<Quiver> qs = {gen::a2(), Quiver::rose(2),
                            Quiver::make({"v", "w"}, {{"e", "v", "w"}, {"f", "v", "v"}, {"g", "w", "v"}})};
  std::size_t endpoints = 0, pairs = 0;
  for (auto& q : qs) {
    auto f = fock_for(q, kFockDepth);
    const ModulePtr& m = f->module();
    std::vector<Letter> gens;
    for (std::size_t b = 0; b < m->x_gens().size(); ++b) gens.push_back(Letter::create(XVector::basis(m, b)));
    for (std::size_t b = 0; b < m->xp_gens().size(); ++b) gens.push_back(Letter::annihilate(XpVector::basis(m, b)));
    for (auto& v : q.vertices()) gens.push_back(Letter::scalar(RingElement::basis(f->ring(), v)));
    for (auto& g : gens) {
      auto r = homotopy_endpoint_check(g, f, kHomotopyWordBound);
      ++endpoints;
      if (!r.ok) o.fail("endpoint: " + r.detail);
    }
    for (std::size_t b = 0; b < m->x_gens().size(); ++b)
      for (std::size_t bp = 0; bp < m->xp_gens().size(); ++bp) {
        auto r = homotopy_pairing_check(XVector::basis(m, b), XpVector::basis(m, bp), f, kHomotopyWordBound);
        ++pairs;
        if (!r.ok) o.fail("pairing: " + r.detail);
      }
  }
  if (o.ok)
    o.note = std::to_string(endpoints) + " endpoint generators, " + std::to_string(pairs) + " generator pairs";
  return o;
}

RingElement random_entry(std::mt19937_64& rng, const RingPtr& R) {
  RingElement r(R);
  for (auto& s : R->generators())
    if (rng() % 2) r += RingElement::basis(R, s, gen::coin(rng, -3, 3));
  return r;
}

Outcome matrix_identification() {
  Outcome o;
  std::mt19937_64 rng(kMatrixSeed);
  RingPtr R = make_matrix_ring(CoeffRing::integers(), {"1", "2"});
  auto units = R->idempotent_decomposition();
  using Mat = std::vector<std::vector<RingElement>>;
  int done = 0;
  for (std::size_t n = 1; n <= kMatrixMaxIndex; ++n) {
    std::vector<std::string> index;
    for (std::size_t i = 0; i < n; ++i) index.push_back(std::to_string(i));
    ModulePtr m = make_free_module(R, index);
    auto random_mat = [&] {
      Mat a(n, std::vector<RingElement>(n, RingElement(R)));
      for (auto& row : a)
        for (auto& x : row) x = random_entry(rng, R);
      return a;
    };
    auto to_compact = [&](const Mat& a) {
      CompactOperator k(m);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (auto& s : units)
            for (auto& t : units) {
              RingElement c = RingElement::basis(R, s) * a[i][j] * RingElement::basis(R, t);
              if (!c.is_zero()) k.add_entry(m->x_index(index[i] + "@" + s), m->xp_index(index[j] + "@" + t), c);
            }
      return k;
    };
    auto to_matrix = [&](const CompactOperator& k) {
      Mat a(n, std::vector<RingElement>(n, RingElement(R)));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (auto& s : units)
            for (auto& t : units) {
              auto it = k.entries().find({m->x_index(index[i] + "@" + s), m->xp_index(index[j] + "@" + t)});
              if (it != k.entries().end()) a[i][j] += it->second;
            }
      return a;
    };
    int quota = kMatrixPairs / static_cast<int>(kMatrixMaxIndex);
    for (int it = 0; it < quota; ++it, ++done) {
      Mat a = random_mat(), b = random_mat();
      Mat ab(n, std::vector<RingElement>(n, RingElement(R)));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t l = 0; l < n; ++l) ab[i][j] += a[i][l] * b[l][j];
      CompactOperator ka = to_compact(a), kb = to_compact(b);
      if (to_matrix(ka) != a) o.fail("identification is not a bijection for |I| = " + std::to_string(n));
      if (to_matrix(compact_mul(ka, kb)) != ab)
        o.fail("compact_mul differs from the matrix product for |I| = " + std::to_string(n));
    }
  }
  if (o.ok) o.note = std::to_string(done) + " pairs over M_2(Z), |I| = 1.." + std::to_string(kMatrixMaxIndex);
  return o;
}

Outcome odometer() {
  Outcome o;
  auto g = SelfSimilarGroup::odometer();
  auto s = selfsim_suite(*g, kOdometerDepth, kOdometerSeed);
  for (auto* r : {&s.bijectivity, &s.recursion, &s.cocycle}) {
    if (!r->ok) o.fail(r->detail);
    if (r->skipped != 0 || r->degrees.empty() || r->degrees.back() != static_cast<std::size_t>(kOdometerDepth))
      o.fail("enumeration was not exhaustive");
  }
  GroupWord a = g->word("a");
  std::size_t words = 0;
  for (std::size_t n = 0; n <= static_cast<std::size_t>(kOdometerDepth); ++n) {
    AlphabetWord ones(n, 1);
    if (g->act(a, ones) != AlphabetWord(n, 0)) o.fail("a(1^" + std::to_string(n) + ") != 0^" + std::to_string(n));
    for (unsigned long bits = 0; bits < (1UL << n); ++bits, ++words) {
      AlphabetWord w;
      for (std::size_t i = 0; i < n; ++i) w.push_back((bits >> i) & 1);
      AlphabetWord expect;
      unsigned long next = (bits + 1) % (1UL << n);
      for (std::size_t i = 0; i < n; ++i) expect.push_back((next >> i) & 1);
      if (g->act(a, w) != expect) o.fail("increment fails on " + g->format(w));
    }
  }
  if (o.ok) o.note = "suites to length 10, " + std::to_string(words) + " increments";
  return o;
}

Outcome cross_pipeline() {
  Outcome o;
  for (const CoeffRing& k : {CoeffRing::rationals(), CoeffRing::integers(), CoeffRing::parse("fp:5")}) {
    auto presets = field_presets(k);
    for (std::size_t d = kRoseMin; d <= kRoseMax; ++d) {
      auto rep = nek_k_groups(build_nek_correspondence(SelfSimilarGroup::trivial(d), k), presets);
      auto rose = k_groups(Quiver::rose(d), presets);
      if (!rep || !(*rep == rose)) o.fail("d = " + std::to_string(d) + " over " + k.spec());
    }
  }
  if (o.ok) o.note = "d = 2..5 over q, z, fp:5";
  return o;
}

Outcome leavitt_arithmetic() {
  Outcome o;
  std::mt19937_64 rng(kLeavittSeed);
  std::size_t triples = 0, relations = 0, p0 = 0;
  std::vector<Quiver> qs;
  for (std::size_t d = 1; d <= 4; ++d) qs.push_back(Quiver::rose(d));
  qs.push_back(gen::a2());
  for (int i = 0; i < kLeavittQuivers; ++i) qs.push_back(gen::random_quiver(rng));
  for (auto& q : qs) {
    auto L = LeavittAlgebra::make(q, CoeffRing::integers());
    for (int it = 0; it < kLeavittTriples; ++it, ++triples) {
      auto a = gen::random_lpa_word(rng, L), b = gen::random_lpa_word(rng, L), c = gen::random_lpa_word(rng, L);
      if (!(lpa_mul(lpa_mul(a, b), c) == lpa_mul(a, lpa_mul(b, c)))) o.fail("associativity");
    }
    for (auto& e : q.edges()) {
      ++relations;
      if (!(lpa_mul(L->ghost(e.name), L->edge(e.name)) == L->vertex(q.vertices()[e.range])))
        o.fail("e* e != r(e) for " + e.name);
    }
    auto f = fock_for(q, kP0TopDegree + 1);
    const ModulePtr& m = f->module();
    for (auto v : q.regular()) {
      RingElement s(L->ring());
      FockOperator sum(f, Side::X);
      for (auto e : q.out_edges(v)) {
        const std::string& name = q.edges()[e].name;
        s += lpa_mul(L->edge(name), L->ghost(name));
        sum = sum + creation(XVector::basis(m, name), f).compose(annihilation(XpVector::basis(m, name + "*"), f));
      }
      ++relations;
      if (!(s == L->vertex(q.vertices()[v]))) o.fail("sum e e* != v");
      RingElement i = RingElement::basis(f->ring(), q.vertices()[v]);
      FockOperator P = scalar_operator(i, f) - sum;
      FockOperator compact = p0_compact_form(i, f);
      for (auto& w : q.vertices()) {
        FockVector x = FockVector::from_ring(f, Side::X, RingElement::basis(f->ring(), w));
        FockVector expect = w == q.vertices()[v] ? x : FockVector(f, Side::X);
        if (!(P.apply(x) == expect) || !(compact.apply(x) == expect)) o.fail("i P0 on degree 0");
        ++p0;
      }
      for (std::size_t n = 1; n <= kP0TopDegree; ++n)
        for (auto& k : f->basis(Side::X, n)) {
          FockVector x = FockVector::basis(f, Side::X, k);
          if (!P.apply(x).is_zero() || !compact.apply(x).is_zero())
            o.fail("i P0 nonzero on degree " + std::to_string(n));
          ++p0;
        }
    }
  }
  if (o.ok)
    o.note = std::to_string(triples) + " triples, " + std::to_string(relations) + " relations, " +
             std::to_string(p0) + " P0 columns";
  return o;
}

}  // namespace

int main() {
  auto quivers = criterion_quivers();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"SNF correctness", snf_correctness},
      {"Leavitt K0 regression", leavitt_k0},
      {"covariant relation", [&] { return covariant_relation(quivers); }},
      {"defect support", [&] { return defect_support(quivers); }},
      {"homotopy checks", homotopy},
      {"matrix-ring identification", matrix_identification},
      {"self-similar suites", odometer},
      {"cross-pipeline agreement", cross_pipeline},
      {"Leavitt arithmetic", leavitt_arithmetic},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.ok;
    std::printf("criterion %zu: %s  %s (%s; %.1f s)\n", i + 1, o.ok ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.note.c_str(), seconds_since(start));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
