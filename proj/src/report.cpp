#include "pimsner/report.hpp"

#include <json.hpp>

#include <random>
#include <sstream>

#include "pimsner/error.hpp"

namespace pimsner {

using nlohmann::ordered_json;

namespace {

NamedCheck named(const std::string& name, const CheckResult& r) {
  return {name, r.ok ? "pass" : "fail", r};
}

NamedCheck insufficient(const std::string& name, const std::string& why) {
  NamedCheck c{name, "insufficient depth", {}};
  c.result.ok = false;
  c.result.detail = why;
  return c;
}

void merge(CheckResult& into, const CheckResult& r) {
  into.checked += r.checked;
  into.skipped += r.skipped;
  for (auto d : r.degrees)
    if (std::find(into.degrees.begin(), into.degrees.end(), d) == into.degrees.end()) into.degrees.push_back(d);
  if (!r.ok) into.fail(r.detail);
}

CheckResult leavitt_relations(const Quiver& q, const CoeffRing& k, std::uint64_t seed) {
  CheckResult res;
  auto L = LeavittAlgebra::make(q, k);
  for (auto& e : q.edges())
    for (auto& f : q.edges()) {
      ++res.checked;
      RingElement lhs = lpa_mul(L->ghost(e.name), L->edge(f.name));
      RingElement rhs = e.name == f.name ? L->vertex(q.vertices()[e.range]) : RingElement(L->ring());
      if (!(lhs == rhs)) res.fail(e.name + "* " + f.name + " has the wrong normal form");
    }
  for (std::size_t v : q.regular()) {
    ++res.checked;
    RingElement sum(L->ring());
    for (std::size_t e : q.out_edges(v)) sum += lpa_mul(L->edge(q.edges()[e].name), L->ghost(q.edges()[e].name));
    if (!(sum == L->vertex(q.vertices()[v]))) res.fail("sum e e* != " + q.vertices()[v]);
  }
  std::vector<RingElement> gens;
  for (auto& v : q.vertices()) gens.push_back(L->vertex(v));
  for (auto& e : q.edges()) {
    gens.push_back(L->edge(e.name));
    gens.push_back(L->ghost(e.name));
  }
  std::mt19937_64 rng(seed);
  auto pick = [&] {
    RingElement r = gens[rng() % gens.size()];
    std::size_t len = rng() % 3;
    for (std::size_t i = 0; i < len; ++i) r = lpa_mul(r, gens[rng() % gens.size()]);
    return r;
  };
  for (int i = 0; i < 40; ++i) {
    ++res.checked;
    RingElement a = pick(), b = pick() + pick(), c = pick();
    if (!(lpa_mul(lpa_mul(a, b), c) == lpa_mul(a, lpa_mul(b, c)))) res.fail("(ab)c != a(bc)");
  }
  return res;
}

}  // namespace

std::vector<NamedCheck> verify_quiver(const Quiver& q, const CoeffRing& k, const SuiteOptions& o) {
  std::vector<NamedCheck> out;
  auto corr = quiver_correspondence(q, k);
  const std::size_t N = o.fock_depth, W = o.word_bound;
  if (N == 0) {
    out.push_back(insufficient("covariant relation", "fock depth 0"));
  } else {
    auto f = TruncatedFock::create(corr, N);
    out.push_back(named("covariant relation", covariant_check(f, canonical_representation(f))));
  }
  if (N < 2) {
    std::string why = "fock depth " + std::to_string(N) + " < 2";
    out.push_back(insufficient("defect support", why));
    out.push_back(insufficient("homotopy endpoints", why));
    out.push_back(insufficient("pairing preservation", why));
  } else {
    auto f = TruncatedFock::create(corr, N);
    const ModulePtr& m = f->module();
    CheckResult defect;
    for (std::size_t kk = 0; kk <= W; ++kk)
      for (std::size_t l = 0; kk + l <= W; ++l) {
        if (kk + l == 0 || kk > N || l > N) continue;
        const auto& mus = f->basis(Side::X, kk);
        const auto& nus = f->basis(Side::Xp, l);
        for (auto& mu : (kk ? mus : std::vector<FockKey>{FockKey{}}))
          for (auto& nu : (l ? nus : std::vector<FockKey>{FockKey{}})) {
            std::vector<XVector> p;
            std::vector<XpVector> phi;
            for (std::size_t i = 0; i < kk; ++i) p.push_back(XVector::basis(m, mu.tuple[i]));
            for (std::size_t i = 0; i < l; ++i) phi.push_back(XpVector::basis(m, nu.tuple[i]));
            try {
              merge(defect, defect_support_check(p, phi, f));
            } catch (const DepthError&) {
              ++defect.skipped;
            }
          }
      }
    out.push_back(named("defect support", defect));

    std::vector<Letter> gens;
    for (std::size_t b = 0; b < m->x_gens().size(); ++b) gens.push_back(Letter::create(XVector::basis(m, b)));
    for (std::size_t b = 0; b < m->xp_gens().size(); ++b) gens.push_back(Letter::annihilate(XpVector::basis(m, b)));
    for (auto& v : q.vertices()) gens.push_back(Letter::scalar(RingElement::basis(f->ring(), v)));
    CheckResult ends;
    for (auto& g : gens) merge(ends, homotopy_endpoint_check(g, f, W));
    out.push_back(named("homotopy endpoints", ends));
    CheckResult pairing;
    for (std::size_t b = 0; b < m->x_gens().size(); ++b)
      for (std::size_t bp = 0; bp < m->xp_gens().size(); ++bp)
        merge(pairing, homotopy_pairing_check(XVector::basis(m, b), XpVector::basis(m, bp), f, W));
    out.push_back(named("pairing preservation", pairing));
  }
  out.push_back(named("leavitt relations", leavitt_relations(q, k, o.seed)));
  return out;
}

std::vector<NamedCheck> verify_selfsim(const SelfSimilarPtr& g, const CoeffRing& k, const SuiteOptions& o) {
  std::vector<NamedCheck> out;
  auto suite = selfsim_suite(*g, o.equality_depth, o.seed);
  out.push_back(named("bijectivity", suite.bijectivity));
  out.push_back(named("self-similarity", suite.recursion));
  out.push_back(named("cocycle", suite.cocycle));
  try {
    auto n = build_nek_correspondence(g, k, o.equality_depth);
    for (auto& [name, r] : n.checks) out.push_back(named(name, r));
  } catch (const InvariantViolation& e) {
    CheckResult r;
    r.fail(e.what());
    out.push_back(named("correspondence", r));
  }
  return out;
}

bool looks_like_selfsim(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    std::size_t a = line.find_first_not_of(" \t\r");
    if (a == std::string::npos) continue;
    return line.compare(a, 9, "alphabet:") == 0;
  }
  return false;
}

// ---------------------------------------------------------------------------

namespace {

ordered_json group_json(const GroupValue& g) {
  ordered_json j;
  j["text"] = g.to_string();
  j["free_rank"] = g.finite.free_rank();
  ordered_json tors = ordered_json::array();
  for (auto& t : g.finite.torsion()) tors.push_back(t.get_str());
  j["torsion"] = tors;
  j["countable"] = g.countable ? ordered_json(g.countable->to_string()) : ordered_json(nullptr);
  return j;
}

ordered_json matrix_json(const IntMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j).get_si());
    rows.push_back(r);
  }
  return rows;
}

ordered_json degrees_json(const LesReport& rep) {
  ordered_json ds = ordered_json::array();
  for (auto& d : rep.degrees) {
    ordered_json j;
    j["n"] = d.n;
    j["kernel"] = group_json(d.kernel);
    j["cokernel"] = group_json(d.cokernel);
    j["assembled_group"] = d.assembled ? group_json(*d.assembled) : ordered_json(nullptr);
    j["split_status"] = d.split_status;
    ds.push_back(j);
  }
  return ds;
}

ordered_json checks_json(const std::vector<NamedCheck>& cs) {
  ordered_json arr = ordered_json::array();
  for (auto& c : cs) {
    ordered_json j;
    j["name"] = c.name;
    j["status"] = c.status;
    j["checked"] = c.result.checked;
    j["skipped"] = c.result.skipped;
    std::vector<std::size_t> ds = c.result.degrees;
    std::sort(ds.begin(), ds.end());
    j["degrees"] = ds;
    j["detail"] = c.result.detail;
    arr.push_back(j);
  }
  return arr;
}

int checks_exit(const std::vector<NamedCheck>& cs) {
  int code = kExitOk;
  for (auto& c : cs) {
    if (c.status == "fail") return kExitInvariant;
    if (c.status == "insufficient depth") code = kExitDepth;
  }
  return code;
}

std::string les_text(const LesReport& rep) {
  std::ostringstream os;
  for (auto& d : rep.degrees) {
    os << "degree " << d.n << ": kernel " << d.kernel.to_string() << ", cokernel " << d.cokernel.to_string()
       << ", quotient " << (d.assembled ? d.assembled->to_string() : std::string("-")) << " (" << d.split_status
       << ")\n";
  }
  return os.str();
}

std::string checks_text(const std::vector<NamedCheck>& cs) {
  std::ostringstream os;
  for (auto& c : cs) {
    os << c.status << "  " << c.name << " (" << c.result.checked << " checked";
    if (c.result.skipped) os << ", " << c.result.skipped << " skipped";
    os << ")";
    if (!c.result.detail.empty()) os << ": " << c.result.detail;
    os << "\n";
  }
  return os.str();
}

ordered_json header(const RunConfig& c) {
  ordered_json j;
  j["schema"] = 1;
  j["command"] = c.command;
  if (!c.input_name.empty()) j["input"] = c.input_name;
  j["coeff"] = c.coeff;
  j["seed"] = c.seed;
  return j;
}

std::string emit(const RunConfig& c, const ordered_json& j, const std::string& text) {
  if (c.format == "text") return text;
  return j.dump(2) + "\n";
}

RunResult cmd_kgroups(const RunConfig& c) {
  CoeffRing k = CoeffRing::parse(c.coeff);
  Quiver q = Quiver::parse(c.input);
  AdjacencyData adj = adjacency(q);
  LesReport rep = k_groups(q, field_presets(k));
  ordered_json j = header(c);
  ordered_json qj;
  qj["vertices"] = q.vertices();
  ordered_json es = ordered_json::array();
  for (auto& e : q.edges())
    es.push_back({{"name", e.name}, {"source", q.vertices()[e.source]}, {"range", q.vertices()[e.range]}});
  qj["edges"] = es;
  j["quiver"] = qj;
  std::vector<std::string> reg;
  for (auto v : adj.regular) reg.push_back(q.vertices()[v]);
  j["regular_vertices"] = reg;
  j["matrix_M"] = {{"rows", q.vertices()}, {"columns", reg}, {"entries", matrix_json(adj.theorem_map)}};
  j["degrees"] = degrees_json(rep);

  std::ostringstream os;
  os << "quiver: " << q.vertices().size() << " vertices, " << q.edges().size() << " edges\n";
  os << "regular:";
  for (auto& r : reg) os << " " << r;
  os << "\nM:\n" << adj.theorem_map.to_string() << "\n" << les_text(rep);
  return {kExitOk, emit(c, j, os.str()), ""};
}

RunResult cmd_verify(const RunConfig& c) {
  CoeffRing k = CoeffRing::parse(c.coeff);
  SuiteOptions o;
  o.fock_depth = static_cast<std::size_t>(std::max(c.fock_depth, 0L));
  o.word_bound = static_cast<std::size_t>(c.word_bound);
  o.equality_depth = c.equality_depth;
  o.seed = c.seed;
  ordered_json j = header(c);
  std::vector<NamedCheck> checks;
  if (looks_like_selfsim(c.input)) {
    auto g = SelfSimilarGroup::parse(c.input);
    j["input_kind"] = "selfsim";
    j["equality_depth"] = c.equality_depth;
    checks = verify_selfsim(g, k, o);
  } else {
    Quiver q = Quiver::parse(c.input);
    j["input_kind"] = "quiver";
    j["fock_depth"] = c.fock_depth;
    j["word_bound"] = c.word_bound;
    checks = verify_quiver(q, k, o);
  }
  j["checks"] = checks_json(checks);
  int code = checks_exit(checks);
  return {code, emit(c, j, checks_text(checks)), code == kExitOk ? "" : "one or more checks did not pass"};
}

RunResult cmd_pv(const RunConfig& c) {
  IntMatrix alpha = IntMatrix::parse(c.matrix);
  LesReport rep = crossed_product_k_groups(alpha, pv_presets());
  ordered_json j = header(c);
  j.erase("coeff");
  j["alpha"] = matrix_json(alpha);
  j["map"] = matrix_json(rep.map);
  j["degrees"] = degrees_json(rep);
  return {kExitOk, emit(c, j, "1 - alpha:\n" + rep.map.to_string() + "\n" + les_text(rep)), ""};
}

RunResult cmd_selfsim(const RunConfig& c) {
  CoeffRing k = CoeffRing::parse(c.coeff);
  auto g = SelfSimilarGroup::parse(c.input);
  ordered_json j = header(c);
  j["equality_depth"] = c.equality_depth;
  j["equality"] = "depth-bounded: equal means equal action on words of length <= " +
                  std::to_string(c.equality_depth);
  j["alphabet"] = g->alphabet();
  ordered_json gens = ordered_json::array();
  for (std::size_t i = 0; i < g->generators().size(); ++i) {
    GroupWord w = GroupWord::generator(i);
    ordered_json perm, rest;
    for (std::size_t x = 0; x < g->degree(); ++x) {
      perm[g->alphabet()[x]] = g->alphabet()[g->act_letter(w, x)];
      rest[g->alphabet()[x]] = g->format(g->restriction(w, x));
    }
    gens.push_back({{"name", g->generators()[i]}, {"permutation", perm}, {"restrictions", rest}});
  }
  j["generators"] = gens;
  SuiteOptions o;
  o.equality_depth = c.equality_depth;
  o.seed = c.seed;
  auto checks = verify_selfsim(g, k, o);
  j["checks"] = checks_json(checks);
  std::ostringstream os;
  os << g->to_dsl() << checks_text(checks);
  int code = checks_exit(checks);
  if (code == kExitOk) {
    auto n = build_nek_correspondence(g, k, c.equality_depth);
    j["trivial_group"] = n.ring->k0_components().has_value();
    ordered_json left;
    for (std::size_t i = 0; i < g->generators().size(); ++i) {
      ordered_json rows = ordered_json::array();
      for (auto& row : n.left_matrix(GroupWord::generator(i))) {
        ordered_json r = ordered_json::array();
        for (auto& e : row) r.push_back(e.to_string());
        rows.push_back(r);
      }
      left[g->generators()[i]] = rows;
    }
    j["left_action"] = left;
    auto rep = nek_k_groups(n, field_presets(k));
    if (rep) {
      j["matrix_M"] = matrix_json(rep->map);
      j["degrees"] = degrees_json(*rep);
      os << les_text(*rep);
    } else {
      j["degrees"] = nullptr;
      os << "K-groups: not computed (no finite invariant quotient supplied)\n";
    }
  }
  return {code, emit(c, j, os.str()), code == kExitOk ? "" : "one or more checks did not pass"};
}

}  // namespace

RunResult run(const RunConfig& c) {
  try {
    if (c.format != "json" && c.format != "text") throw DomainError("unknown output format '" + c.format + "'");
    if (c.word_bound < 1) throw DomainError("word bound must be at least 1");
    if (c.equality_depth < 1) throw DomainError("equality depth must be at least 1");
    if (c.command == "kgroups") return cmd_kgroups(c);
    if (c.command == "verify") return cmd_verify(c);
    if (c.command == "pv") return cmd_pv(c);
    if (c.command == "selfsim") return cmd_selfsim(c);
    throw DomainError("unknown command '" + c.command + "'");
  } catch (const ParseError& e) {
    return {kExitParse, "", (c.input_name.empty() ? "" : c.input_name + ": ") + e.what()};
  } catch (const SemanticError& e) {
    return {kExitParse, "", e.what()};
  } catch (const DomainError& e) {
    return {kExitParse, "", e.what()};
  } catch (const DepthError& e) {
    return {kExitDepth, "", e.what()};
  } catch (const std::exception& e) {
    return {kExitInvariant, "", std::string("internal error: ") + e.what()};
  }
}

}  // namespace pimsner
