#ifndef PIMSNER_H
#define PIMSNER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PIMSNER_API __declspec(dllexport)
#else
#define PIMSNER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as CLI exit codes. */
typedef enum pimsner_status {
  PIMSNER_OK = 0,
  PIMSNER_ERR_ARGUMENT = 1,
  PIMSNER_ERR_PARSE = 2,
  PIMSNER_ERR_DEPTH = 3,
  PIMSNER_ERR_INVARIANT = 4,
  PIMSNER_ERR_IO = 5
} pimsner_status;

typedef struct pimsner_config pimsner_config;
typedef struct pimsner_result pimsner_result;
typedef struct pimsner_quiver pimsner_quiver;
typedef struct pimsner_group pimsner_group;

PIMSNER_API const char* pimsner_version(void);
PIMSNER_API const char* pimsner_status_name(pimsner_status s);
/* Message of the last failing call on this thread; never NULL. */
PIMSNER_API const char* pimsner_last_error(void);
/* Frees strings returned through char** out-parameters. */
PIMSNER_API void pimsner_string_free(char* s);

/* Run configuration. Defaults: fock_depth 6, word_bound 4, equality_depth 8,
   coeff "q", format "json", seed 1. */
PIMSNER_API pimsner_config* pimsner_config_new(const char* command);
PIMSNER_API void pimsner_config_free(pimsner_config* c);
PIMSNER_API pimsner_status pimsner_config_set_input_file(pimsner_config* c, const char* path);
PIMSNER_API pimsner_status pimsner_config_set_input_text(pimsner_config* c, const char* name,
                                                         const char* text);
PIMSNER_API pimsner_status pimsner_config_set_matrix(pimsner_config* c, const char* rows);
/* key: "fock_depth", "word_bound" or "equality_depth". */
PIMSNER_API pimsner_status pimsner_config_set_int(pimsner_config* c, const char* key, long value);
/* key: "coeff" (z | q | zmod:m | fp:p) or "format" (json | text). */
PIMSNER_API pimsner_status pimsner_config_set_string(pimsner_config* c, const char* key,
                                                     const char* value);
PIMSNER_API pimsner_status pimsner_config_set_seed(pimsner_config* c, uint64_t seed);

/* Runs the command. A result is produced whenever the configuration is
   usable; its exit code reports parse, depth and invariant failures. */
PIMSNER_API pimsner_status pimsner_run(const pimsner_config* c, pimsner_result** out);
PIMSNER_API int pimsner_result_exit_code(const pimsner_result* r);
PIMSNER_API const char* pimsner_result_output(const pimsner_result* r);
PIMSNER_API const char* pimsner_result_error(const pimsner_result* r);
PIMSNER_API void pimsner_result_free(pimsner_result* r);

/* Smith normal form of a row-major rows x cols matrix. diag receives
   min(rows, cols) entries d_1 | d_2 | ... */
PIMSNER_API pimsner_status pimsner_smith_diagonal(const long* a, size_t rows, size_t cols,
                                                  long* diag, size_t* rank);

PIMSNER_API pimsner_status pimsner_quiver_parse(const char* text, pimsner_quiver** out);
PIMSNER_API pimsner_status pimsner_quiver_rose(size_t d, pimsner_quiver** out);
PIMSNER_API void pimsner_quiver_free(pimsner_quiver* q);
PIMSNER_API size_t pimsner_quiver_vertex_count(const pimsner_quiver* q);
PIMSNER_API size_t pimsner_quiver_edge_count(const pimsner_quiver* q);
/* K-theory degree n of L_k(Q) as text, e.g. "Z/3" or "Z^2 + Z/2".
   PIMSNER_ERR_ARGUMENT when the degree is unassembled or not covered. */
PIMSNER_API pimsner_status pimsner_quiver_k_group(const pimsner_quiver* q, const char* coeff, int n,
                                                  char** out);

PIMSNER_API pimsner_status pimsner_group_parse(const char* text, pimsner_group** out);
PIMSNER_API pimsner_status pimsner_group_odometer(pimsner_group** out);
PIMSNER_API void pimsner_group_free(pimsner_group* g);
PIMSNER_API pimsner_status pimsner_group_act(const pimsner_group* g, const char* element,
                                             const char* word, char** out);
PIMSNER_API pimsner_status pimsner_group_restriction(const pimsner_group* g, const char* element,
                                                     const char* word, char** out);
PIMSNER_API pimsner_status pimsner_group_equal(const pimsner_group* g, const char* a, const char* b,
                                               long depth, int* equal, int* certified);

#ifdef __cplusplus
}
#endif

#endif
