/* fanova — functional-ANOVA module-effect analysis for modular optimizer
 * frameworks. C API over the C++ core: opaque handles, status codes, and
 * thread-local error messages. All strings are UTF-8, all paths are
 * filesystem paths.
 */
#ifndef FANOVA_H
#define FANOVA_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FANOVA_API __declspec(dllexport)
#else
#define FANOVA_API __attribute__((visibility("default")))
#endif

/* Status codes double as process exit codes. */
typedef enum fv_status {
    FV_OK = 0,
    FV_ERR_USAGE = 1,    /* bad request: flags, parameters, combinations */
    FV_ERR_DATA = 2,     /* bad input data: files, schemas, coverage */
    FV_ERR_INTERNAL = 3  /* violated invariant; report as a bug */
} fv_status;

/* Message for the most recent failure on this thread. Valid until the next
 * fanova call on the same thread. Never NULL. */
FANOVA_API const char* fv_last_error(void);

/* ---- configuration space ---------------------------------------------- */

typedef struct fv_space fv_space;

/* JSON document: [{"name": "...", "options": ["...", ...]}, ...] */
FANOVA_API fv_status fv_space_from_json(const char* json_text, fv_space** out);
FANOVA_API fv_status fv_space_from_file(const char* path, fv_space** out);
FANOVA_API void fv_space_free(fv_space* space);

FANOVA_API int fv_space_module_count(const fv_space* space);
FANOVA_API int64_t fv_space_cardinality(const fv_space* space);
/* Returned pointers stay valid for the lifetime of the space. */
FANOVA_API const char* fv_space_module_name(const fv_space* space, int module);
FANOVA_API int fv_space_option_count(const fv_space* space, int module);
FANOVA_API const char* fv_space_option_label(const fv_space* space, int module, int option);

/* ---- datasets ---------------------------------------------------------- */

typedef struct fv_dataset fv_dataset;

/* Dataset CSV: variant_id,<one column per module>,response */
FANOVA_API fv_status fv_dataset_from_csv(const fv_space* space, const char* path, fv_dataset** out);
FANOVA_API void fv_dataset_free(fv_dataset* dataset);
FANOVA_API int64_t fv_dataset_row_count(const fv_dataset* dataset);

/* ---- models ------------------------------------------------------------ */

typedef struct fv_model fv_model;

typedef struct fv_fit_params {
    int n_trees;            /* default 64 */
    int bootstrap;          /* 0/1, default 1 */
    int features_per_split; /* 0: ceil(n/2); -1: all modules */
    int min_samples_leaf;   /* default 1 */
    int max_depth;          /* 0: unlimited */
    uint64_t seed;          /* default 0 */
} fv_fit_params;

FANOVA_API void fv_fit_params_init(fv_fit_params* params);
/* One tree, no bootstrap, all features: reproduces full-factorial
 * distinct-response training data exactly. */
FANOVA_API void fv_fit_params_exact(fv_fit_params* params);

FANOVA_API fv_status fv_model_fit(const fv_dataset* dataset, const fv_fit_params* params,
                                  fv_model** out);
/* Exhaustive decomposition of the empirical table itself (full-factorial
 * datasets only). */
FANOVA_API fv_status fv_model_exact(const fv_dataset* dataset, fv_model** out);
FANOVA_API fv_status fv_model_save(const fv_model* model, const char* path);
FANOVA_API fv_status fv_model_load(const fv_space* space, const char* path, fv_model** out);
/* option_indices: one option index per module. */
FANOVA_API fv_status fv_model_predict(const fv_model* model, const int* option_indices,
                                      double* out);
FANOVA_API void fv_model_free(fv_model* model);

/* ---- effect decompositions --------------------------------------------- */

typedef struct fv_effects fv_effects;

/* fraction_mode: "ratio" (per-tree V_U/V averaged) or "pooled". */
FANOVA_API fv_status fv_effects_compute(const fv_model* model, int max_order,
                                        const char* fraction_mode, fv_effects** out);
FANOVA_API void fv_effects_free(fv_effects* effects);

FANOVA_API int fv_effects_subset_count(const fv_effects* effects);
/* Writes the module indices of subset i; *size in/out: capacity/actual. */
FANOVA_API fv_status fv_effects_subset(const fv_effects* effects, int index, int* modules,
                                       int* size);
/* Fraction of total variance in [0,1]. */
FANOVA_API fv_status fv_effects_fraction(const fv_effects* effects, int index, double* out);
FANOVA_API int fv_effects_tree_count(const fv_effects* effects);
FANOVA_API fv_status fv_effects_tree_total_variance(const fv_effects* effects, int tree,
                                                    double* out);
FANOVA_API fv_status fv_effects_tree_subset_variance(const fv_effects* effects, int tree,
                                                     int index, double* out);
/* out[4]: cumulative individual, pairwise, triple, total percent. */
FANOVA_API fv_status fv_effects_cumulative(const fv_effects* effects, double* out);

/* ---- commands (what the CLI runs) -------------------------------------- */

typedef struct fv_analyze_request {
    const char* space_path;
    const char* data_path;    /* runs, cells, or dataset CSV; header-detected */
    const char* scenario;     /* "suite" | "problem" | "all-problems" */
    int problem_id;
    int dimension;
    int64_t budget;
    const char* engine;       /* "forest" | "exact" */
    fv_fit_params params;
    int max_order;             /* 0: min(3, module count) */
    const char* fraction_mode; /* "ratio" | "pooled" */
    const char* out_dir;
    const char* save_model_path; /* optional, may be NULL */
    const char* load_model_path; /* optional, may be NULL */
} fv_analyze_request;

FANOVA_API void fv_analyze_request_init(fv_analyze_request* request);
FANOVA_API fv_status fv_run_analyze(const fv_analyze_request* request);

typedef struct fv_similarity_request {
    const char* effects_dir; /* holds problem_<id>/effects.csv */
    const int* problem_ids;
    int problem_count;
    const char* out_path; /* similarity.csv */
} fv_similarity_request;

FANOVA_API fv_status fv_run_similarity(const fv_similarity_request* request);

typedef struct fv_synth_request {
    const char* space_path;
    const char* truth_path;
    double noise_sd;
    uint64_t seed;
    const char* out_dir; /* receives dataset.csv + truth.json */
} fv_synth_request;

FANOVA_API fv_status fv_run_synth(const fv_synth_request* request);

typedef struct fv_ingest_request {
    const char* space_path;
    const char* runs_path;         /* either runs ... */
    const char* trajectories_path; /* ... or trajectories + optima */
    const char* optima_path;
    const int64_t* budgets;
    int budget_count;
    int budgets_are_multipliers; /* budgets scale with the problem dimension */
    const char* out_dir;         /* receives cells.csv */
} fv_ingest_request;

FANOVA_API fv_status fv_run_ingest(const fv_ingest_request* request);

#ifdef __cplusplus
}
#endif

#endif /* FANOVA_H */
