#ifndef ITEMA2C_H
#define ITEMA2C_H

/* C interface to the training library. Handles are opaque; every call that
 * can fail returns an ia2c_status and leaves a message for ia2c_last_error()
 * (thread-local, valid until the next failing call on the same thread). */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(ITEMA2C_BUILDING_LIBRARY)
#define IA2C_API __attribute__((visibility("default")))
#else
#define IA2C_API
#endif

typedef struct ia2c_config ia2c_config;
typedef struct ia2c_result ia2c_result;

typedef enum ia2c_status {
  IA2C_OK = 0,
  IA2C_INVALID_ARGUMENT = 1,
  IA2C_CONFIG_ERROR = 2,
  IA2C_IO_ERROR = 3,
  IA2C_OUTPUT_EXISTS = 4,
  IA2C_RUN_FAILED = 5,
  IA2C_CHECK_FAILED = 6,
  IA2C_INTERNAL = 7
} ia2c_status;

IA2C_API const char* ia2c_last_error(void);
IA2C_API const char* ia2c_status_name(ia2c_status status);

/* ---- configuration ---- */

IA2C_API ia2c_status ia2c_config_default(ia2c_config** out);
IA2C_API ia2c_status ia2c_config_load(const char* path, ia2c_config** out);
IA2C_API ia2c_status ia2c_config_parse(const char* text, ia2c_config** out);
IA2C_API void ia2c_config_free(ia2c_config* config);

/* key is "section.key"; the value is parsed as in a config file. */
IA2C_API ia2c_status ia2c_config_set(ia2c_config* config, const char* key, const char* value);
IA2C_API ia2c_status ia2c_config_validate(const ia2c_config* config);

/* Copy a NUL-terminated string into buf. *needed (optional) receives the
 * size including the terminator; a short buffer yields IA2C_INVALID_ARGUMENT. */
IA2C_API ia2c_status ia2c_config_get(const ia2c_config* config, const char* key, char* buf, size_t buf_size,
                                     size_t* needed);
IA2C_API ia2c_status ia2c_config_serialize(const ia2c_config* config, char* buf, size_t buf_size, size_t* needed);

/* 12 hex digits plus terminator. n_seeds == 0 uses training.seeds. */
IA2C_API ia2c_status ia2c_run_id(const ia2c_config* config, const uint64_t* seeds, size_t n_seeds, char out[13]);

/* ---- runs ---- */

typedef void (*ia2c_progress_fn)(void* user, uint64_t seed, size_t step, size_t total_steps, double mean_reward,
                                 double mean_depth);

typedef struct ia2c_train_options {
  const char* output_root; /* NULL: $ITEMA2C_OUTPUT_ROOT, then output.dir */
  const uint64_t* seeds;   /* NULL or n_seeds == 0: training.seeds */
  size_t n_seeds;
  int force; /* replace an existing run directory */
  ia2c_progress_fn progress;
  void* progress_user;
} ia2c_train_options;

/* Trains every seed and writes <root>/<run id>/ with curve_seed<S>.csv,
 * checkpoint_seed<S>.txt, config.ini and summary.json. Nothing is left
 * behind on failure. */
IA2C_API ia2c_status ia2c_train(const ia2c_config* config, const ia2c_train_options* options, ia2c_result** out);

typedef enum ia2c_sweep_param { IA2C_SWEEP_ALPHA = 0, IA2C_SWEEP_K = 1 } ia2c_sweep_param;

typedef void (*ia2c_sweep_fn)(void* user, double value, uint64_t seed, int ok, const char* error);

typedef struct ia2c_sweep_options {
  const char* output_root;
  const uint64_t* seeds;
  size_t n_seeds;
  size_t jobs; /* 0 or 1: sequential */
  int force;
  ia2c_sweep_fn on_run;
  void* on_run_user;
} ia2c_sweep_options;

/* Writes sweep_runs.csv, sweep_summary.csv, config.ini and summary.json under
 * <root>/sweep-<param>-<id>/. Failed runs are listed, not fatal. */
IA2C_API ia2c_status ia2c_sweep(const ia2c_config* config, ia2c_sweep_param param, const double* values,
                                size_t n_values, const ia2c_sweep_options* options, ia2c_result** out);

/* Greedy evaluation of a checkpoint written by ia2c_train. */
IA2C_API ia2c_status ia2c_eval(const ia2c_config* config, const char* checkpoint_path, uint64_t seed, size_t steps,
                               ia2c_result** out);

IA2C_API const char* ia2c_result_output_dir(const ia2c_result* result); /* "" when nothing was written */
IA2C_API const char* ia2c_result_summary_json(const ia2c_result* result);
IA2C_API const char* ia2c_result_table(const ia2c_result* result);
IA2C_API void ia2c_result_free(ia2c_result* result);

/* ---- checks and utilities ---- */

typedef void (*ia2c_line_fn)(void* user, const char* line);

/* One line per loss family. *all_passed is 1 iff every family passed. */
IA2C_API ia2c_status ia2c_gradcheck(size_t instances, int inject_bug, ia2c_line_fn on_line, void* user,
                                    int* all_passed);

/* Future-impact shares for click credits; out_weights has k entries.
 * fallback (optional) is set to 1 when the uniform split was used. */
IA2C_API ia2c_status ia2c_reweight(const double* credits, size_t k, double alpha, double* out_weights, int* fallback);

#ifdef __cplusplus
}
#endif

#endif /* ITEMA2C_H */
