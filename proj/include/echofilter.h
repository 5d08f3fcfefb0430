/* Public C API for the echofilter pipeline.
 *
 * Every operation takes a JSON options string (documented per function) and
 * reports failure through an error code plus ef_last_error(). All pointers
 * returned through out-parameters are owned by the caller and released with
 * the matching _free function.
 */
#ifndef ECHOFILTER_H
#define ECHOFILTER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ef_status {
    EF_OK = 0,
    EF_ERR_INVALID_ARG = 1,
    EF_ERR_PARSE = 2,      /* malformed input file */
    EF_ERR_STRUCTURE = 3,  /* structurally inconsistent input */
    EF_ERR_DOMAIN = 4,     /* precondition or configuration violation */
    EF_ERR_IO = 5,
    EF_ERR_INTERNAL = 6
} ef_status;

/* Message for the most recent failure on this thread. Never NULL. */
const char* ef_last_error(void);

const char* ef_version(void);

/* Frees strings returned by this API. */
void ef_string_free(char* s);

/* CSV + EVL/EVR ingestion -> shard store.
 * options: {"raw_csv", "clean_csv", "entrained_evl", "seafloor_evl"?,
 *           "surface_evl"?, "upfacing"?, "output_dir", "recording_id"?} */
ef_status ef_generate_shards(const char* options_json);

/* Shard stores -> checkpoints + training log.
 * options: {"shard_dirs": [..], "upsample"?: [..], "output_dir", "seed"?,
 *           "epochs"?, "cycles"?, "batch_size"?, "max_lr"?, "augment"?,
 *           "width"?, "n_blocks"?, "groups"?, "input_w"?, "input_h"?,
 *           "log_path"?} */
ef_status ef_train(const char* options_json);

/* CSV + checkpoint -> EVL lines and EVR regions beside the input.
 * options: {"csv", "checkpoint", "upfacing"?, "output_stem"?,
 *           "autozoom_threshold"?, "offset"?, "logit_smoothing"?,
 *           "drop_bad"?} */
ef_status ef_infer(const char* options_json);

/* CSV -> EVL lines via the classical pickers.
 * options: {"csv", "upfacing"?, "output_stem"?} */
ef_status ef_baseline(const char* options_json);

/* Predicted vs target annotations -> metrics report (plain text + TSV).
 * options: {"files": [{"csv", "target_evl", "predicted_evl", "upfacing"?}],
 *           "mode"?: "pooled"|"per-file"}
 * report_out receives the plain-text table. */
ef_status ef_evaluate(const char* options_json, char** report_out);

/* Synthetic recording -> CSV/EVL/EVR corpus.
 * options: {"dir", "base"?, "seed"?, "n_pings"?, "upfacing"?, "depth_max"?,
 *           "depth_step"?, "air_base"?, "air_amplitude"?, "passive_every"?,
 *           "passive_length"?, "bad_period_every"?, "n_patches"?,
 *           "extra_range_fraction"?, ...} (unknown keys rejected) */
ef_status ef_synth(const char* options_json);

/* Echogram overlay or error-CDF raster (PPM).
 * options: {"mode": "echogram", "csv", "evl"?: [..], "upfacing"?, "output"}
 *       or {"mode": "cdf", "series": [{"label", "errors": [..]}], "output"} */
ef_status ef_plot(const char* options_json);

#ifdef __cplusplus
}
#endif

#endif /* ECHOFILTER_H */
