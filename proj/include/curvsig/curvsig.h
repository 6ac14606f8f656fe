// Copyright 2026 The Curvsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/*
 * curvsig C API.
 *
 * All objects are opaque handles created by a create, load or from call
 * and released by the matching *_destroy. Every fallible call returns a
 * cs_status; on failure cs_last_error() describes the problem for the
 * calling thread until its next failing call. Strings returned as
 * `const char*` are owned by the handle they came from and stay valid until
 * that handle is modified or destroyed.
 */
#ifndef CURVSIG_CURVSIG_H
#define CURVSIG_CURVSIG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CURVSIG_BUILDING_LIBRARY)
#    define CURVSIG_API __declspec(dllexport)
#  else
#    define CURVSIG_API __declspec(dllimport)
#  endif
#else
#  define CURVSIG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cs_status {
    CS_OK = 0,
    CS_ERR_INVALID_ARGUMENT = 1,
    CS_ERR_IO = 2,
    CS_ERR_DECODE = 3,
    CS_ERR_DIMENSION = 4,
    CS_ERR_TOO_SHORT = 5,
    CS_ERR_DEGENERATE = 6,
    CS_ERR_FORMAT = 7,
    CS_ERR_INTERNAL = 8
} cs_status;

typedef struct cs_config cs_config;
typedef struct cs_signature cs_signature;
typedef struct cs_dataset cs_dataset;
typedef struct cs_model cs_model;
typedef struct cs_report cs_report;

CURVSIG_API const char* cs_version(void);
CURVSIG_API const char* cs_last_error(void);
CURVSIG_API const char* cs_status_name(cs_status status);

/* ---- configuration ------------------------------------------------------
 * Keys: resize, background (auto|none|median), threshold, binarize,
 * grid_size, smoothing, channels (k1|k1k2), exclude_boundary, n_trees,
 * m_features (0 = auto), min_leaf, seed, threads. */
CURVSIG_API cs_status cs_config_create(cs_config** out);
CURVSIG_API void cs_config_destroy(cs_config* config);
CURVSIG_API cs_status cs_config_set(cs_config* config, const char* key, const char* value);
/* Writes the value of `key` (as text) into a string owned by `config`. */
CURVSIG_API cs_status cs_config_get(const cs_config* config, const char* key, const char** value);
CURVSIG_API const char* cs_config_json(const cs_config* config);

/* ---- signatures ---------------------------------------------------------- */
/* video: image directory or CRV file. mask and background may be NULL. */
CURVSIG_API cs_status cs_signature_from_video(const cs_config* config, const char* video, const char* mask,
                                              const char* background, cs_signature** out);
/* samples: rows x cols, row-major, one row per time step. */
CURVSIG_API cs_status cs_signature_from_series(const cs_config* config, const double* samples, size_t rows,
                                               size_t cols, cs_signature** out);
CURVSIG_API void cs_signature_destroy(cs_signature* sig);
CURVSIG_API size_t cs_signature_size(const cs_signature* sig);
CURVSIG_API double cs_signature_arc_step(const cs_signature* sig);
CURVSIG_API double cs_signature_total_length(const cs_signature* sig);
/* Each output array holds cs_signature_size() entries; any may be NULL. */
CURVSIG_API cs_status cs_signature_copy(const cs_signature* sig, double* s, double* k1, double* k2,
                                        unsigned char* valid);
CURVSIG_API const char* cs_signature_csv(const cs_signature* sig);
CURVSIG_API cs_status cs_signature_write_csv(const cs_signature* sig, const char* path);
CURVSIG_API cs_status cs_signature_write_crv(const cs_signature* sig, const char* path);
/* Writes up to `capacity` features (8 or 16 by the config's channel mode). */
CURVSIG_API cs_status cs_signature_features(const cs_signature* sig, const cs_config* config, double* out,
                                            size_t capacity, size_t* count);

/* ---- datasets ------------------------------------------------------------ */
CURVSIG_API cs_status cs_dataset_create(const char* const* class_names, size_t n_classes, size_t n_features,
                                        cs_dataset** out);
CURVSIG_API cs_status cs_dataset_add_row(cs_dataset* data, const double* row, size_t n_features,
                                         size_t label);
/* Runs every manifest entry through the pipeline. Fails (and still returns
 * nothing) when more than 10% of the entries cannot be processed. */
CURVSIG_API cs_status cs_dataset_from_manifest(const cs_config* config, const char* manifest, cs_dataset** out);
CURVSIG_API void cs_dataset_destroy(cs_dataset* data);
CURVSIG_API size_t cs_dataset_rows(const cs_dataset* data);
CURVSIG_API size_t cs_dataset_feature_count(const cs_dataset* data);
CURVSIG_API size_t cs_dataset_class_count(const cs_dataset* data);
CURVSIG_API const char* cs_dataset_class_name(const cs_dataset* data, size_t index);
CURVSIG_API size_t cs_dataset_failure_count(const cs_dataset* data);
CURVSIG_API const char* cs_dataset_failure_path(const cs_dataset* data, size_t index);
CURVSIG_API const char* cs_dataset_failure_message(const cs_dataset* data, size_t index);
CURVSIG_API const char* cs_dataset_summary_json(const cs_dataset* data);
/* Feature table with a header row and a final label column. */
CURVSIG_API cs_status cs_dataset_write_features_csv(const cs_dataset* data, const char* path);

/* ---- models -------------------------------------------------------------- */
CURVSIG_API cs_status cs_model_train(const cs_dataset* data, const cs_config* config, cs_model** out);
CURVSIG_API cs_status cs_model_load(const char* path, cs_model** out);
CURVSIG_API cs_status cs_model_parse(const char* text, cs_model** out);
CURVSIG_API cs_status cs_model_save(const cs_model* model, const char* path);
CURVSIG_API const char* cs_model_text(const cs_model* model);
CURVSIG_API void cs_model_destroy(cs_model* model);
CURVSIG_API size_t cs_model_class_count(const cs_model* model);
CURVSIG_API const char* cs_model_class_name(const cs_model* model, size_t index);
CURVSIG_API size_t cs_model_feature_count(const cs_model* model);
/* The pipeline config stored with the model. Caller destroys *out. */
CURVSIG_API cs_status cs_model_config(const cs_model* model, cs_config** out);
/* votes may be NULL, otherwise it receives cs_model_class_count() shares. */
CURVSIG_API cs_status cs_model_predict(const cs_model* model, const double* row, size_t n_features,
                                       size_t* label, double* votes);
CURVSIG_API cs_status cs_model_predict_video(const cs_model* model, const char* video, const char* mask,
                                             const char* background, size_t* label, double* votes);

/* ---- evaluation ---------------------------------------------------------- */
CURVSIG_API cs_status cs_model_evaluate(const cs_model* model, const cs_dataset* data, cs_report** out);
CURVSIG_API cs_status cs_cross_validate(const cs_dataset* data, const cs_config* config, size_t folds,
                                        cs_report** out);
/* One fold per subject (manifest group column or file-name prefix). */
CURVSIG_API cs_status cs_cross_validate_groups(const cs_dataset* data, const cs_config* config,
                                               cs_report** out);
CURVSIG_API void cs_report_destroy(cs_report* report);
CURVSIG_API double cs_report_accuracy(const cs_report* report);
CURVSIG_API const char* cs_report_json(const cs_report* report);

/* ---- misc ---------------------------------------------------------------- */
CURVSIG_API cs_status cs_gini(const double* probabilities, size_t n_classes, double* out);
/* kind: "classes" writes the 4-class dataset (CRV files + manifest.csv)
 * into the directory out_path; "helix", "circle", "blob" and
 * "blob_flipped" write one CRV file to out_path. per_class and noise only
 * apply to "classes". */
CURVSIG_API cs_status cs_synth_write(const char* kind, const char* out_path, size_t per_class, uint64_t seed,
                                     double noise);

#ifdef __cplusplus
}
#endif

#endif /* CURVSIG_CURVSIG_H */
