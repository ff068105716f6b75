/* SPDX-License-Identifier: Apache-2.0 */
#ifndef PROCSCENE_H
#define PROCSCENE_H

/* C interface to the procscene library. Every fallible call returns a
 * ps_status; on failure ps_last_error() describes the problem for the calling
 * thread until its next failing call. Strings returned through char** are
 * owned by the caller and released with ps_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PS_API __declspec(dllexport)
#else
#define PS_API __attribute__((visibility("default")))
#endif

typedef enum ps_status {
  PS_OK = 0,
  PS_ERR_INVALID_ARGUMENT = 1,
  PS_ERR_DEGENERATE = 2,
  PS_ERR_IO = 3,
  PS_ERR_FORMAT = 4,
  PS_ERR_INVARIANT = 5,
  PS_ERR_NOT_FOUND = 6,
  PS_ERR_INTERNAL = 99
} ps_status;

PS_API const char* ps_last_error(void);
PS_API const char* ps_status_name(ps_status status);
PS_API const char* ps_version(void);
PS_API void ps_string_free(char* s);

/* Yaw-oriented box: center, size (l, w, h), heading about +z in radians. */
typedef struct ps_box3 {
  double center[3];
  double size[3];
  double heading;
} ps_box3;

PS_API ps_status ps_iou3d(const ps_box3* a, const ps_box3* b, double* out);

/* --- generation config --------------------------------------------------- */
typedef struct ps_config ps_config;

PS_API ps_status ps_config_default(ps_config** out);
PS_API ps_status ps_config_load(const char* path, ps_config** out);
PS_API ps_status ps_config_to_json(const ps_config* cfg, char** out);
PS_API void ps_config_free(ps_config* cfg);

/* --- single scenes ----------------------------------------------------------- */
typedef struct ps_scene ps_scene;

PS_API ps_status ps_scene_generate(const ps_config* cfg, uint64_t seed, ps_scene** out);
PS_API size_t ps_scene_object_count(const ps_scene* scene);
PS_API ps_status ps_scene_object_box(const ps_scene* scene, size_t index, ps_box3* out);
/* Valid while the scene lives. */
PS_API ps_status ps_scene_object_category(const ps_scene* scene, size_t index,
                                          const char** out);
PS_API ps_status ps_scene_annotation_json(const ps_scene* scene, char** out);
PS_API void ps_scene_free(ps_scene* scene);

/* --- point clouds ------------------------------------------------------------ */
typedef struct ps_cloud ps_cloud;

PS_API ps_status ps_scene_sample_cloud(const ps_scene* scene, size_t points,
                                       double density, uint64_t seed, ps_cloud** out);
PS_API ps_status ps_cloud_read(const char* path, ps_cloud** out);
PS_API ps_status ps_cloud_write(const ps_cloud* cloud, const char* path);
PS_API size_t ps_cloud_size(const ps_cloud* cloud);
/* Copies 3 * size doubles. */
PS_API ps_status ps_cloud_positions(const ps_cloud* cloud, double* xyz);
PS_API void ps_cloud_free(ps_cloud* cloud);

/* --- dataset pipelines --------------------------------------------------------
 * threads = 0 uses every hardware thread; results never depend on it. */

typedef struct ps_generate_options {
  const char* config_path; /* NULL: built-in default config */
  size_t scenes;
  uint64_t seed;
  const char* out_dir;
  unsigned threads;
} ps_generate_options;
PS_API void ps_generate_options_init(ps_generate_options* o);
PS_API ps_status ps_generate(const ps_generate_options* o);

typedef struct ps_library_options {
  const char* config_path; /* NULL: built-in default config */
  const char* style;       /* "alpha" or "beta" */
  size_t per_category;
  uint64_t seed;
  const char* out_dir;
} ps_library_options;
PS_API void ps_library_options_init(ps_library_options* o);
PS_API ps_status ps_make_library(const ps_library_options* o);

typedef struct ps_swap_options {
  const char* in_dir;
  const char* library_dir;
  double tolerance;
  uint64_t seed;
  const char* out_dir;
  unsigned threads;
} ps_swap_options;
PS_API void ps_swap_options_init(ps_swap_options* o);
PS_API ps_status ps_swap(const ps_swap_options* o);

typedef struct ps_pointcloud_options {
  const char* in_dir;
  size_t points;
  double density;
  uint64_t seed;
  int vss;
  int cameras;
  double sigma;
  const char* out_dir; /* NULL: clouds go into in_dir */
  int ply;
  unsigned threads;
} ps_pointcloud_options;
PS_API void ps_pointcloud_options_init(ps_pointcloud_options* o);
PS_API ps_status ps_pointcloud(const ps_pointcloud_options* o);

/* format: "json" or "table". */
PS_API ps_status ps_stats(const char* in_dir, const char* format, char** out);

PS_API ps_status ps_fit(const char* in_dir, const char* out_path);

typedef struct ps_detect_options {
  const char* in_dir;
  const char* model_path;
  const char* out_path;
  const char* split; /* "train", "eval" (default) or "all" */
  const char* eval_config_path;
  unsigned threads;
} ps_detect_options;
PS_API void ps_detect_options_init(ps_detect_options* o);
PS_API ps_status ps_detect(const ps_detect_options* o);

typedef struct ps_eval_options {
  const char* pred_path;
  const char* gt_dir;
  double iou;
  const char* categories_path; /* NULL: every ground-truth category */
  const char* split;
  const char* format; /* "table" or "json" */
  const char* out_path; /* optional JSON report file */
} ps_eval_options;
PS_API void ps_eval_options_init(ps_eval_options* o);
PS_API ps_status ps_eval(const ps_eval_options* o, char** report);

/* Newline-separated scene ids in draw order. */
PS_API ps_status ps_fewshot(const char* in_dir, size_t k, uint64_t seed, char** out);

typedef struct ps_cache_options {
  const char* in_dir;
  const char* model_path;
  const char* out_path;
  const char* split; /* default "train" */
  unsigned threads;
} ps_cache_options;
PS_API void ps_cache_options_init(ps_cache_options* o);
PS_API ps_status ps_cache(const ps_cache_options* o);

typedef struct ps_pseudolabel_options {
  const char* pred_path;
  const char* cache_path; /* NULL: confidence filter only */
  size_t top_k;
  double agreement;
  double confidence;
  const char* out_dir;
  unsigned threads;
} ps_pseudolabel_options;
PS_API void ps_pseudolabel_options_init(ps_pseudolabel_options* o);
PS_API ps_status ps_pseudolabel(const ps_pseudolabel_options* o);

/* Per-category AP table followed by mAP. */
PS_API ps_status ps_benchmark(const char* recipe_path, const char* format, unsigned threads,
                              char** report);

#ifdef __cplusplus
}
#endif

#endif /* PROCSCENE_H */
