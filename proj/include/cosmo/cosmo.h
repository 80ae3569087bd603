#ifndef COSMO_COSMO_H
#define COSMO_COSMO_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define COSMO_API __declspec(dllexport)
#else
#define COSMO_API __attribute__((visibility("default")))
#endif

/* Status codes double as CLI exit codes. */
typedef enum cosmo_status {
  COSMO_OK = 0,
  COSMO_E_USAGE = 1,
  COSMO_E_DATA = 2,
  COSMO_E_VERIFY = 3,
  COSMO_E_INTERNAL = 4
} cosmo_status;

typedef struct cosmo_dataset cosmo_dataset;
typedef struct cosmo_model cosmo_model;

/* Message of the last failed call on this thread; "" after a success. */
COSMO_API const char* cosmo_last_error(void);
COSMO_API const char* cosmo_version(void);

/* Every char** output is heap-allocated and released with this. */
COSMO_API void cosmo_string_free(char* s);

/* Context spec JSON for a named preset: "desk" (options: {"noise"}) or
 * "suite" (options: contexts, objects_per_context, relations_per_context,
 * affordances_per_context, object_probability, triple_probability, noise,
 * seed). options_json may be NULL. */
COSMO_API cosmo_status cosmo_context_spec_preset(const char* name, const char* options_json,
                                                 char** spec_json);

COSMO_API cosmo_status cosmo_dataset_synthesize(const char* spec_json, size_t n, uint64_t seed,
                                                cosmo_dataset** out);
COSMO_API cosmo_status cosmo_dataset_load(const char* path, cosmo_dataset** out);
COSMO_API cosmo_status cosmo_dataset_save(const cosmo_dataset* dataset, const char* path);
/* {"scenes", "objects", "relation_types", "affordance_types", "fingerprint",
 *  "vocabulary_fingerprint"} */
COSMO_API cosmo_status cosmo_dataset_info(const cosmo_dataset* dataset, char** info_json);
COSMO_API void cosmo_dataset_free(cosmo_dataset* dataset);

/* Splits the dataset with the config seed and trains on the train part.
 * summary_json: {"epochs_run", "early_stopped", "split": {...}}. Either
 * string output may be NULL. */
COSMO_API cosmo_status cosmo_train(const cosmo_dataset* dataset, const char* config_json,
                                   cosmo_model** out, char** curves_csv, char** summary_json);

/* Trains every point of a grid; see the README for the grid format. */
COSMO_API cosmo_status cosmo_sweep(const cosmo_dataset* dataset, const char* grid_json,
                                   size_t threads, char** curves_csv);

COSMO_API cosmo_status cosmo_model_load(const char* path, cosmo_model** out);
COSMO_API cosmo_status cosmo_model_save(const cosmo_model* model, const char* path);
/* {"model_kind", "dims", "parameters", "vocabulary_fingerprint", "schedule",
 *  "config", "format_version"} */
COSMO_API cosmo_status cosmo_model_info(const cosmo_model* model, char** info_json);
COSMO_API void cosmo_model_free(cosmo_model* model);

/* Runs the task protocol on one split of the dataset. Options keys: tasks,
 * theta, theta_sweep, gibbs_steps, seed, threads, split ("train",
 * "validation", "test"), split_seed, chance_trials, rectify_lists,
 * theta_add, theta_drop, model_name. Refuses a dataset whose vocabulary
 * differs from the model's with COSMO_E_DATA. */
COSMO_API cosmo_status cosmo_evaluate(const cosmo_model* model, const cosmo_dataset* dataset,
                                      const char* options_json, char** report_csv);

/* Draws n scenes with the listed first-layer hidden units clamped on.
 * Options keys: hidden, gibbs_steps, seed, free_others. Output is a dataset
 * JSON document over the model vocabulary. */
COSMO_API cosmo_status cosmo_generate(const cosmo_model* model, const char* options_json, size_t n,
                                      char** scenes_json);

/* Task 7 on one detection list ([{"label", "score"}]). label_map_json maps
 * detector labels to object names and may be NULL. Options keys:
 * gibbs_steps, seed, theta_add, theta_drop, min_score. */
COSMO_API cosmo_status cosmo_rectify(const cosmo_model* model, const char* detections_json,
                                     const char* label_map_json, const char* options_json,
                                     char** result_json);

/* Runs the exact-enumeration property suite. *all_passed is 1 or 0. */
COSMO_API cosmo_status cosmo_verify(uint64_t seed, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
