/* Copyright 2026 The bsvg Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BSVG_H
#define BSVG_H

/*
 * C interface of libbsvg.
 *
 * Every fallible call returns a bsvg_status. On failure a description is
 * available from bsvg_last_error() until the next failing call on the same
 * thread. Handles are opaque; each *_free accepts NULL.
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BSVG_API __declspec(dllexport)
#else
#define BSVG_API __attribute__((visibility("default")))
#endif

typedef enum bsvg_status {
    BSVG_OK = 0,
    BSVG_ERR_INVALID_ARGUMENT = 1,
    BSVG_ERR_DOMAIN = 2,
    BSVG_ERR_DIMENSION = 3,
    BSVG_ERR_UNSUPPORTED = 4,
    BSVG_ERR_STATE = 5,
    BSVG_ERR_IO = 6,
    BSVG_ERR_PARSE = 7,
    BSVG_ERR_NUMERIC = 8,
    BSVG_ERR_INTERNAL = 9
} bsvg_status;

typedef struct bsvg_config bsvg_config;
typedef struct bsvg_scene bsvg_scene;
typedef struct bsvg_result bsvg_result;

/* Called after every optimisation step. The scene is valid only during the
 * call. */
typedef void (*bsvg_step_fn)(int step, const bsvg_scene* scene, void* user);

BSVG_API const char* bsvg_version(void);
BSVG_API const char* bsvg_last_error(void);
BSVG_API const char* bsvg_status_name(bsvg_status status);

/* Configuration. Keys are "section.key" as in the YAML file. */
BSVG_API bsvg_status bsvg_config_new(bsvg_config** out);
BSVG_API bsvg_status bsvg_config_load(const char* path, bsvg_config** out);
BSVG_API bsvg_status bsvg_config_set(bsvg_config* config, const char* key, const char* value);
/* Writes the current value as text into buf (NUL-terminated, truncated to
 * size); *needed, when non-NULL, receives the full length plus one. */
BSVG_API bsvg_status bsvg_config_get(const bsvg_config* config, const char* key, char* buf, unsigned long size,
                                     unsigned long* needed);
BSVG_API bsvg_status bsvg_config_validate(const bsvg_config* config);
/* NULL-terminated list of every accepted key. */
BSVG_API const char* const* bsvg_config_keys(void);
BSVG_API void bsvg_config_free(bsvg_config* config);

/* Runs "fill", "abstract" or "areas". An aborted run (non-finite loss)
 * still yields a result holding the last finite scene; check
 * bsvg_result_aborted. */
BSVG_API bsvg_status bsvg_run(const bsvg_config* config, const char* command, bsvg_step_fn on_step, void* user,
                              bsvg_result** out);
/* Borrowed; lives as long as the result. */
BSVG_API const bsvg_scene* bsvg_result_scene(const bsvg_result* result);
/* Trace CSV text; borrowed. */
BSVG_API const char* bsvg_result_trace_csv(const bsvg_result* result);
BSVG_API int bsvg_result_aborted(const bsvg_result* result);
BSVG_API const char* bsvg_result_message(const bsvg_result* result);
BSVG_API void bsvg_result_free(bsvg_result* result);

/* Scenes. Loading accepts scene JSON or an SVG written by this library. */
BSVG_API bsvg_status bsvg_scene_load(const char* path, bsvg_scene** out);
BSVG_API bsvg_status bsvg_scene_info(const bsvg_scene* scene, int* width, int* height, int* paths);
BSVG_API bsvg_status bsvg_scene_save_json(const bsvg_scene* scene, const char* path);
BSVG_API bsvg_status bsvg_scene_save_svg(const bsvg_scene* scene, const char* path, int samples_per_span);
BSVG_API bsvg_status bsvg_scene_render_png(const bsvg_scene* scene, const char* path, int samples_per_span);
BSVG_API void bsvg_scene_free(bsvg_scene* scene);

#ifdef __cplusplus
}
#endif

#endif /* BSVG_H */
