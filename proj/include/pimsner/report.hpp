#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pimsner/fock.hpp"
#include "pimsner/leavitt.hpp"
#include "pimsner/selfsim.hpp"

namespace pimsner {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitDepth = 3,
  kExitInvariant = 4,
};

struct NamedCheck {
  std::string name;
  std::string status;  // "pass", "fail" or "insufficient depth"
  CheckResult result;
};

struct SuiteOptions {
  std::size_t fock_depth = 6;
  std::size_t word_bound = 4;
  long equality_depth = 8;
  std::uint64_t seed = 1;
};

// Covariant relation, defect support over all words T_mu T_nu* with
// 1 <= |mu| + |nu| <= word_bound, homotopy endpoints and pairing
// preservation, and a seeded Leavitt relation suite.
std::vector<NamedCheck> verify_quiver(const Quiver& q, const CoeffRing& k, const SuiteOptions& o);
// Bijectivity, recursion and cocycle suites plus the correspondence checks.
std::vector<NamedCheck> verify_selfsim(const SelfSimilarPtr& g, const CoeffRing& k, const SuiteOptions& o);

struct RunConfig {
  std::string command;     // kgroups | verify | pv | selfsim
  std::string input_name;  // shown in reports
  std::string input;       // file contents
  std::string matrix;      // pv only, rows separated by ';'
  long fock_depth = 6;
  long word_bound = 4;
  long equality_depth = 8;
  std::string coeff = "q";
  std::string format = "json";  // json | text
  std::uint64_t seed = 1;
};

struct RunResult {
  int exit_code = kExitOk;
  std::string output;  // report on stdout
  std::string error;   // diagnostic on stderr
};

// True when the first meaningful line starts with "alphabet:".
bool looks_like_selfsim(const std::string& text);

RunResult run(const RunConfig& config);

}  // namespace pimsner
