#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "pimsner/pimsner.h"

namespace {

struct Options {
  std::string file;
  std::string matrix;
  std::string coeff = "q";
  std::string out = "json";
  long fock_depth = 6;
  long word_bound = 4;
  long depth = 8;
  uint64_t seed = 1;
};

int execute(const std::string& command, const Options& o) {
  pimsner_config* cfg = pimsner_config_new(command.c_str());
  pimsner_status st = PIMSNER_OK;
  if (!o.file.empty()) st = pimsner_config_set_input_file(cfg, o.file.c_str());
  if (st == PIMSNER_OK && !o.matrix.empty()) st = pimsner_config_set_matrix(cfg, o.matrix.c_str());
  if (st == PIMSNER_OK) st = pimsner_config_set_string(cfg, "coeff", o.coeff.c_str());
  if (st == PIMSNER_OK) st = pimsner_config_set_string(cfg, "format", o.out.c_str());
  if (st == PIMSNER_OK) st = pimsner_config_set_int(cfg, "fock_depth", o.fock_depth);
  if (st == PIMSNER_OK) st = pimsner_config_set_int(cfg, "word_bound", o.word_bound);
  if (st == PIMSNER_OK) st = pimsner_config_set_int(cfg, "equality_depth", o.depth);
  if (st == PIMSNER_OK) st = pimsner_config_set_seed(cfg, o.seed);
  if (st != PIMSNER_OK) {
    std::fprintf(stderr, "pimsner: %s\n", pimsner_last_error());
    pimsner_config_free(cfg);
    return 2;
  }
  pimsner_result* res = nullptr;
  st = pimsner_run(cfg, &res);
  pimsner_config_free(cfg);
  if (st != PIMSNER_OK) {
    std::fprintf(stderr, "pimsner: %s\n", pimsner_last_error());
    return static_cast<int>(st);
  }
  std::fputs(pimsner_result_output(res), stdout);
  int code = pimsner_result_exit_code(res);
  if (*pimsner_result_error(res)) std::fprintf(stderr, "pimsner: %s\n", pimsner_result_error(res));
  pimsner_result_free(res);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cuntz-Pimsner rings, Leavitt path algebras and their K-theory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pimsner_version());
  Options o;

  auto* kg = app.add_subcommand("kgroups", "K-groups of a Leavitt path algebra from a quiver file");
  kg->add_option("file", o.file, "quiver file")->required();
  kg->add_option("--coeff", o.coeff, "coefficient ring: z | q | zmod:m | fp:p");
  kg->add_option("--out", o.out, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* ver = app.add_subcommand("verify", "run the verification suites on a quiver or self-similar group file");
  ver->add_option("file", o.file, "quiver or self-similar group file")->required();
  ver->add_option("--fock-depth", o.fock_depth, "Fock truncation depth N");
  ver->add_option("--word-bound", o.word_bound, "word bound W");
  ver->add_option("--depth", o.depth, "group equality depth D");
  ver->add_option("--seed", o.seed, "seed for randomized suites");
  ver->add_option("--coeff", o.coeff, "coefficient ring");
  ver->add_option("--out", o.out, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* pv = app.add_subcommand("pv", "crossed product K-groups for an automorphism matrix");
  pv->add_option("--matrix", o.matrix, "rows separated by ';', e.g. \"1 0; 0 1\"")->required();
  pv->add_option("--out", o.out, "json | text")->check(CLI::IsMember({"json", "text"}));

  auto* ss = app.add_subcommand("selfsim", "self-similar group report and correspondence checks");
  ss->add_option("file", o.file, "self-similar group file")->required();
  ss->add_option("--depth", o.depth, "group equality depth D");
  ss->add_option("--seed", o.seed, "seed for randomized suites");
  ss->add_option("--coeff", o.coeff, "coefficient ring");
  ss->add_option("--out", o.out, "json | text")->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  for (auto* sub : {kg, ver, pv, ss})
    if (sub->parsed()) return execute(sub->get_name(), o);
  return 2;
}
