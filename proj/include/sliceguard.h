#ifndef SLICEGUARD_H
#define SLICEGUARD_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; the CLI maps them directly to exit codes. */
typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_USAGE = 1,    /* bad arguments or options */
  SG_ERR_DATA = 2,     /* unreadable/invalid input data */
  SG_ERR_CHECK = 3,    /* reproducibility check failed */
  SG_ERR_INTERNAL = 4  /* unexpected failure */
} sg_status;

/* Message for the calling thread's most recent error. Never NULL; empty
 * string when no error has occurred. Valid until the next failing call on
 * the same thread. */
const char* sg_last_error(void);

/* Run one pipeline operation: "generate", "inject", "featurize", "train",
 * "evaluate", "compare", "sweep", "serve", "report", or "repro".
 * options_json is a JSON object (NULL means "{}"). On success *summary_json
 * (if non-NULL) receives a JSON summary string; release it with sg_free. */
sg_status sg_run(const char* op, const char* options_json, char** summary_json);

void sg_free(char* ptr);

/* ---- model handle ------------------------------------------------------ */

typedef struct sg_model sg_model;

sg_status sg_model_open(const char* path, sg_model** out);

/* features: the 12 raw feature values in canonical column order. */
sg_status sg_model_predict(const sg_model* model, const double* features,
                           size_t n_features, int* label, double* confidence);

/* Kind, scope, training metadata as JSON. */
sg_status sg_model_info(const sg_model* model, char** info_json);

void sg_model_close(sg_model* model);

/* ---- streaming detector handle ----------------------------------------- */

typedef struct sg_detector sg_detector;

/* options_json keys: window_len_s (default 2.0), grace_ms (default 100.0),
 * digest_key (default "sliceguard"). NULL means all defaults. */
sg_status sg_detector_create(const char* options_json, sg_detector** out);

/* Route by the model's scope: per-slice artifacts serve their slice, a
 * pooled artifact becomes the fallback. */
sg_status sg_detector_add_model(sg_detector* detector, const char* model_path);

/* Feed one text-format packet record line. Any verdicts completed by this
 * packet are returned as newline-terminated JSON lines (empty string when
 * none); release with sg_free. Malformed lines are counted, not errors. */
sg_status sg_detector_feed_line(sg_detector* detector, const char* line,
                                char** verdict_lines);

/* Close all partial windows and return their verdicts. */
sg_status sg_detector_flush(sg_detector* detector, char** verdict_lines);

sg_status sg_detector_stats(const sg_detector* detector, char** stats_json);

void sg_detector_free(sg_detector* detector);

#ifdef __cplusplus
}
#endif

#endif /* SLICEGUARD_H */
