#include "pimsner/pimsner.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pimsner/error.hpp"
#include "pimsner/report.hpp"

struct pimsner_config {
  pimsner::RunConfig cfg;
};

struct pimsner_result {
  pimsner::RunResult res;
};

struct pimsner_quiver {
  pimsner::Quiver q;
};

struct pimsner_group {
  pimsner::SelfSimilarPtr g;
};

namespace {

thread_local std::string last_error;

pimsner_status fail(pimsner_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

template <class F>
pimsner_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const pimsner::ParseError& e) {
    return fail(PIMSNER_ERR_PARSE, e.what());
  } catch (const pimsner::SemanticError& e) {
    return fail(PIMSNER_ERR_PARSE, e.what());
  } catch (const pimsner::DomainError& e) {
    return fail(PIMSNER_ERR_PARSE, e.what());
  } catch (const pimsner::DepthError& e) {
    return fail(PIMSNER_ERR_DEPTH, e.what());
  } catch (const std::exception& e) {
    return fail(PIMSNER_ERR_INVARIANT, e.what());
  } catch (...) {
    return fail(PIMSNER_ERR_INVARIANT, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* pimsner_version(void) { return "0.1.0"; }

const char* pimsner_status_name(pimsner_status s) {
  switch (s) {
    case PIMSNER_OK: return "ok";
    case PIMSNER_ERR_ARGUMENT: return "invalid argument";
    case PIMSNER_ERR_PARSE: return "parse error";
    case PIMSNER_ERR_DEPTH: return "insufficient depth";
    case PIMSNER_ERR_INVARIANT: return "invariant violation";
    case PIMSNER_ERR_IO: return "i/o error";
  }
  return "unknown";
}

const char* pimsner_last_error(void) { return last_error.c_str(); }

void pimsner_string_free(char* s) { std::free(s); }

pimsner_config* pimsner_config_new(const char* command) {
  auto* c = new pimsner_config();
  if (command) c->cfg.command = command;
  return c;
}

void pimsner_config_free(pimsner_config* c) { delete c; }

pimsner_status pimsner_config_set_input_file(pimsner_config* c, const char* path) {
  if (!c || !path) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail(PIMSNER_ERR_IO, std::string("cannot open '") + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  c->cfg.input = ss.str();
  c->cfg.input_name = path;
  return PIMSNER_OK;
}

pimsner_status pimsner_config_set_input_text(pimsner_config* c, const char* name, const char* text) {
  if (!c || !text) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  c->cfg.input = text;
  c->cfg.input_name = name ? name : "";
  return PIMSNER_OK;
}

pimsner_status pimsner_config_set_matrix(pimsner_config* c, const char* rows) {
  if (!c || !rows) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  c->cfg.matrix = rows;
  return PIMSNER_OK;
}

pimsner_status pimsner_config_set_int(pimsner_config* c, const char* key, long value) {
  if (!c || !key) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  std::string k = key;
  if (k == "fock_depth")
    c->cfg.fock_depth = value;
  else if (k == "word_bound")
    c->cfg.word_bound = value;
  else if (k == "equality_depth")
    c->cfg.equality_depth = value;
  else
    return fail(PIMSNER_ERR_ARGUMENT, "unknown integer option '" + k + "'");
  return PIMSNER_OK;
}

pimsner_status pimsner_config_set_string(pimsner_config* c, const char* key, const char* value) {
  if (!c || !key || !value) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  std::string k = key;
  if (k == "coeff")
    c->cfg.coeff = value;
  else if (k == "format")
    c->cfg.format = value;
  else
    return fail(PIMSNER_ERR_ARGUMENT, "unknown string option '" + k + "'");
  return PIMSNER_OK;
}

pimsner_status pimsner_config_set_seed(pimsner_config* c, uint64_t seed) {
  if (!c) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  c->cfg.seed = seed;
  return PIMSNER_OK;
}

pimsner_status pimsner_run(const pimsner_config* c, pimsner_result** out) {
  if (!c || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto* r = new pimsner_result{pimsner::run(c->cfg)};
    *out = r;
    if (r->res.exit_code != 0) last_error = r->res.error;
    return PIMSNER_OK;
  });
}

int pimsner_result_exit_code(const pimsner_result* r) { return r ? r->res.exit_code : PIMSNER_ERR_ARGUMENT; }
const char* pimsner_result_output(const pimsner_result* r) { return r ? r->res.output.c_str() : ""; }
const char* pimsner_result_error(const pimsner_result* r) { return r ? r->res.error.c_str() : ""; }
void pimsner_result_free(pimsner_result* r) { delete r; }

pimsner_status pimsner_smith_diagonal(const long* a, size_t rows, size_t cols, long* diag, size_t* rank) {
  if ((!a && rows && cols) || (!diag && rows && cols) || !rank) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    pimsner::IntMatrix m(rows, cols);
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < cols; ++j) m(i, j) = a[i * cols + j];
    auto snf = pimsner::smith_normal_form(m);
    auto d = snf.diagonal();
    for (size_t i = 0; i < d.size(); ++i) {
      if (!d[i].fits_slong_p()) return fail(PIMSNER_ERR_INVARIANT, "diagonal entry overflows long");
      diag[i] = d[i].get_si();
    }
    *rank = snf.rank;
    return PIMSNER_OK;
  });
}

pimsner_status pimsner_quiver_parse(const char* text, pimsner_quiver** out) {
  if (!text || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new pimsner_quiver{pimsner::Quiver::parse(text)};
    return PIMSNER_OK;
  });
}

pimsner_status pimsner_quiver_rose(size_t d, pimsner_quiver** out) {
  if (!out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new pimsner_quiver{pimsner::Quiver::rose(d)};
    return PIMSNER_OK;
  });
}

void pimsner_quiver_free(pimsner_quiver* q) { delete q; }
size_t pimsner_quiver_vertex_count(const pimsner_quiver* q) { return q ? q->q.vertices().size() : 0; }
size_t pimsner_quiver_edge_count(const pimsner_quiver* q) { return q ? q->q.edges().size() : 0; }

pimsner_status pimsner_quiver_k_group(const pimsner_quiver* q, const char* coeff, int n, char** out) {
  if (!q || !coeff || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    auto rep = pimsner::k_groups(q->q, pimsner::field_presets(pimsner::CoeffRing::parse(coeff)));
    for (auto& d : rep.degrees) {
      if (d.n != n) continue;
      if (!d.assembled) return fail(PIMSNER_ERR_ARGUMENT, "degree " + std::to_string(n) + " is unassembled");
      *out = dup(d.assembled->to_string());
      return PIMSNER_OK;
    }
    return fail(PIMSNER_ERR_ARGUMENT, "degree " + std::to_string(n) + " is not covered by the presets");
  });
}

pimsner_status pimsner_group_parse(const char* text, pimsner_group** out) {
  if (!text || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new pimsner_group{pimsner::SelfSimilarGroup::parse(text)};
    return PIMSNER_OK;
  });
}

pimsner_status pimsner_group_odometer(pimsner_group** out) {
  if (!out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  *out = new pimsner_group{pimsner::SelfSimilarGroup::odometer()};
  return PIMSNER_OK;
}

void pimsner_group_free(pimsner_group* g) { delete g; }

pimsner_status pimsner_group_act(const pimsner_group* g, const char* element, const char* word, char** out) {
  if (!g || !element || !word || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(g->g->format(g->g->act(g->g->word(element), g->g->letters(word))));
    return PIMSNER_OK;
  });
}

pimsner_status pimsner_group_restriction(const pimsner_group* g, const char* element, const char* word,
                                         char** out) {
  if (!g || !element || !word || !out) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup(g->g->format(g->g->restriction(g->g->word(element), g->g->letters(word))));
    return PIMSNER_OK;
  });
}

pimsner_status pimsner_group_equal(const pimsner_group* g, const char* a, const char* b, long depth, int* equal,
                                   int* certified) {
  if (!g || !a || !b || !equal) return fail(PIMSNER_ERR_ARGUMENT, "null argument");
  if (depth < 1) return fail(PIMSNER_ERR_ARGUMENT, "depth must be at least 1");
  return guarded([&] {
    auto r = g->g->equal(g->g->word(a), g->g->word(b), depth);
    *equal = r.equal ? 1 : 0;
    if (certified) *certified = r.certified ? 1 : 0;
    return PIMSNER_OK;
  });
}

}  // extern "C"
