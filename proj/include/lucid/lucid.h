/*
 * lucid: multi-scanner vulnerability report reconciliation toolkit.
 *
 * C API over the C++ core. All functions return a lucid_status_t; on failure
 * lucid_last_error() describes the problem for the calling thread. Objects
 * returned through out-parameters are owned by the caller and released with
 * the matching *_free function. Strings returned by accessors stay valid for
 * the lifetime of the object they came from.
 */
#ifndef LUCID_LUCID_H
#define LUCID_LUCID_H

#include <stddef.h>

#if defined(_WIN32)
#define LUCID_API __declspec(dllexport)
#else
#define LUCID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lucid_status_t {
    LUCID_OK = 0,
    LUCID_E_ARG = 1,      /* invalid argument / precondition violation */
    LUCID_E_PARSE = 2,    /* malformed input text */
    LUCID_E_IO = 3,       /* file system problem */
    LUCID_E_STATE = 4,    /* operation in the wrong store state */
    LUCID_E_INTERNAL = 5,
} lucid_status_t;

LUCID_API const char* lucid_version(void);

/* Message for the last failing call on this thread; empty string otherwise. */
LUCID_API const char* lucid_last_error(void);

/* ---- store ---- */

typedef struct lucid_store_t lucid_store_t;

LUCID_API lucid_status_t lucid_store_create(lucid_store_t** out);
LUCID_API void lucid_store_free(lucid_store_t* store);

/* format: "canonical", "trivy", "clair", or "snyk". */
LUCID_API lucid_status_t lucid_store_add_scan_report(lucid_store_t* store, const char* format,
                                                     const char* text, size_t* added);
/* manager: "dpkg", "rpm", or "apk"; the OS family follows the manager. */
LUCID_API lucid_status_t lucid_store_add_manifest(lucid_store_t* store, const char* image,
                                                  const char* manager, const char* text,
                                                  size_t* added);
LUCID_API lucid_status_t lucid_store_add_advisories(lucid_store_t* store, const char* text,
                                                    size_t* added);
LUCID_API lucid_status_t lucid_store_seal(lucid_store_t* store);

/* Reads/writes scan_results.csv, assigner_results.csv, image_packages.csv. */
LUCID_API lucid_status_t lucid_store_load_dir(lucid_store_t* store, const char* dir);
LUCID_API lucid_status_t lucid_store_save_dir(const lucid_store_t* store, const char* dir);

/* table: "scan_results", "assigner_results", or "image_packages".
 * Row counts for image_packages count package entries. */
LUCID_API lucid_status_t lucid_store_row_count(const lucid_store_t* store, const char* table,
                                               size_t* out);

/* ---- result documents ---- */

typedef struct lucid_report_t lucid_report_t;

LUCID_API void lucid_report_free(lucid_report_t* report);
LUCID_API const char* lucid_report_json(const lucid_report_t* report);
/* section NULL or "" selects the report's default section; unknown sections
 * return NULL. */
LUCID_API const char* lucid_report_csv(const lucid_report_t* report, const char* section);
/* Numeric lookups, e.g. "residual", "macro_f1", "percent.L2". */
LUCID_API lucid_status_t lucid_report_metric(const lucid_report_t* report, const char* key,
                                             double* out);

/* ---- pipeline ---- */

LUCID_API lucid_status_t lucid_detect(const lucid_store_t* store, int threads,
                                      lucid_report_t** out);

typedef struct lucid_resolve_opts_t {
    const char* const* credible_assigners; /* NULL: NVD, Redhat, Ubuntu */
    size_t credible_count;
    int threads;
} lucid_resolve_opts_t;

LUCID_API void lucid_resolve_opts_init(lucid_resolve_opts_t* opts);
/* `rewritten` (optional) receives the stripped store with resolved severities
 * applied. */
LUCID_API lucid_status_t lucid_resolve(const lucid_store_t* store,
                                       const lucid_resolve_opts_t* opts, lucid_report_t** report,
                                       lucid_store_t** rewritten);

typedef struct lucid_classify_opts_t {
    const char* algorithm; /* "decision_tree", "random_forest", "knn", "gaussian_nb" */
    unsigned long long seed;
    int folds;
    int threads;
    int tree_max_depth;    /* <= 0: unlimited */
    int tree_max_features; /* <= 0: default 200 (capped at the feature count) */
    int n_estimators;
    int forest_max_depth;
    int k_neighbors;
    int minkowski_p;
    double variance_smoothing; /* <= 0: default 1e-9 */
} lucid_classify_opts_t;

LUCID_API void lucid_classify_opts_init(lucid_classify_opts_t* opts);
LUCID_API lucid_status_t lucid_classify(const lucid_store_t* store,
                                        const lucid_classify_opts_t* opts, lucid_report_t** out);

/* Generates a synthetic corpus from a JSON config ("{}" for the defaults) and,
 * when out_dir is non-NULL, writes the three store CSVs plus ledger.csv. */
LUCID_API lucid_status_t lucid_synth(const char* config_json, const char* out_dir,
                                     lucid_report_t** out);

/* ---- CVSS ---- */

/* Scores a v3.0/v3.1 base vector string. Any out-pointer may be NULL.
 * band receives a static string ("None".."Critical"). */
LUCID_API lucid_status_t lucid_cvss_score(const char* vector_text, double* base_score,
                                          double* exploitability, double* impact,
                                          const char** band);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LUCID_LUCID_H */
