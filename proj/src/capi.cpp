// Copyright 2026 The bsvg Authors
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


#include <bsvg/bsvg.h>

#include <bsvg/app.hpp>
#include <bsvg/image_io.hpp>
#include <bsvg/io.hpp>

#include <algorithm>
#include <memory>
#include <new>

struct bsvg_config {
    bsvg::Config cfg;
};

struct bsvg_scene {
    bsvg::Scene owned;
    const bsvg::Scene* view = nullptr;
    const bsvg::Scene& get() const { return view ? *view : owned; }
};

struct bsvg_result {
    bsvg::RunResult run;
    bsvg_scene scene;
    std::string csv;
};

namespace {

thread_local std::string last_error;

bsvg_status to_status(bsvg::Errc code) {
    switch (code) {
    case bsvg::Errc::invalid_argument:
        return BSVG_ERR_INVALID_ARGUMENT;
    case bsvg::Errc::domain:
        return BSVG_ERR_DOMAIN;
    case bsvg::Errc::dimension_mismatch:
        return BSVG_ERR_DIMENSION;
    case bsvg::Errc::unsupported:
        return BSVG_ERR_UNSUPPORTED;
    case bsvg::Errc::state:
        return BSVG_ERR_STATE;
    case bsvg::Errc::io:
        return BSVG_ERR_IO;
    case bsvg::Errc::parse:
        return BSVG_ERR_PARSE;
    case bsvg::Errc::numeric:
        return BSVG_ERR_NUMERIC;
    }
    return BSVG_ERR_INTERNAL;
}

bsvg_status fail(bsvg_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F> bsvg_status guarded(F&& body) {
    try {
        body();
        return BSVG_OK;
    } catch (const bsvg::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(BSVG_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(BSVG_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(BSVG_ERR_INTERNAL, "unknown error");
    }
}

bool null_args(std::initializer_list<const void*> ptrs) {
    for (const void* p : ptrs)
        if (!p) {
            last_error = "null argument";
            return true;
        }
    return false;
}

} // namespace

extern "C" {

const char* bsvg_version(void) { return "0.1.0"; }

const char* bsvg_last_error(void) { return last_error.c_str(); }

const char* bsvg_status_name(bsvg_status status) {
    switch (status) {
    case BSVG_OK:
        return "ok";
    case BSVG_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case BSVG_ERR_DOMAIN:
        return "domain error";
    case BSVG_ERR_DIMENSION:
        return "dimension mismatch";
    case BSVG_ERR_UNSUPPORTED:
        return "unsupported";
    case BSVG_ERR_STATE:
        return "invalid state";
    case BSVG_ERR_IO:
        return "i/o error";
    case BSVG_ERR_PARSE:
        return "parse error";
    case BSVG_ERR_NUMERIC:
        return "numeric error";
    case BSVG_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

bsvg_status bsvg_config_new(bsvg_config** out) {
    if (null_args({out}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new bsvg_config{}; });
}

bsvg_status bsvg_config_load(const char* path, bsvg_config** out) {
    if (null_args({path, out}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { *out = new bsvg_config{bsvg::load_config(path)}; });
}

bsvg_status bsvg_config_set(bsvg_config* config, const char* key, const char* value) {
    if (null_args({config, key, value}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { config->cfg.set(key, value); });
}

bsvg_status bsvg_config_get(const bsvg_config* config, const char* key, char* buf, unsigned long size,
                            unsigned long* needed) {
    if (null_args({config, key}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const std::string v = config->cfg.get(key);
        if (needed)
            *needed = static_cast<unsigned long>(v.size() + 1);
        if (buf && size > 0) {
            const size_t n = std::min<size_t>(v.size(), size - 1);
            v.copy(buf, n);
            buf[n] = '\0';
        }
    });
}

bsvg_status bsvg_config_validate(const bsvg_config* config) {
    if (null_args({config}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { config->cfg.validate(); });
}

const char* const* bsvg_config_keys(void) {
    static const std::vector<const char*> keys = [] {
        std::vector<const char*> k;
        for (const std::string& s : bsvg::Config::keys())
            k.push_back(s.c_str());
        k.push_back(nullptr);
        return k;
    }();
    return keys.data();
}

void bsvg_config_free(bsvg_config* config) { delete config; }

bsvg_status bsvg_run(const bsvg_config* config, const char* command, bsvg_step_fn on_step, void* user,
                     bsvg_result** out) {
    if (null_args({config, command, out}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        const bsvg::OptimJob job = bsvg::prepare_job(config->cfg, bsvg::parse_command(command));
        bsvg::RunCallbacks cb;
        if (on_step)
            cb.on_step = [&](int step, const bsvg::Scene& s) {
                bsvg_scene view;
                view.view = &s;
                on_step(step, &view, user);
            };
        auto r = std::make_unique<bsvg_result>();
        r->run = bsvg::run(job, cb);
        r->scene.view = &r->run.scene;
        r->csv = bsvg::trace_csv(r->run);
        *out = r.release();
    });
}

const bsvg_scene* bsvg_result_scene(const bsvg_result* result) { return result ? &result->scene : nullptr; }

const char* bsvg_result_trace_csv(const bsvg_result* result) { return result ? result->csv.c_str() : nullptr; }

int bsvg_result_aborted(const bsvg_result* result) { return result && result->run.aborted ? 1 : 0; }

const char* bsvg_result_message(const bsvg_result* result) {
    return result ? result->run.message.c_str() : nullptr;
}

void bsvg_result_free(bsvg_result* result) { delete result; }

bsvg_status bsvg_scene_load(const char* path, bsvg_scene** out) {
    if (null_args({path, out}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        auto s = std::make_unique<bsvg_scene>();
        s->owned = bsvg::load_scene(path);
        *out = s.release();
    });
}

bsvg_status bsvg_scene_info(const bsvg_scene* scene, int* width, int* height, int* paths) {
    if (null_args({scene}))
        return BSVG_ERR_INVALID_ARGUMENT;
    const bsvg::Scene& s = scene->get();
    if (width)
        *width = s.width;
    if (height)
        *height = s.height;
    if (paths)
        *paths = static_cast<int>(s.paths.size());
    return BSVG_OK;
}

bsvg_status bsvg_scene_save_json(const bsvg_scene* scene, const char* path) {
    if (null_args({scene, path}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { bsvg::save_scene(path, scene->get()); });
}

bsvg_status bsvg_scene_save_svg(const bsvg_scene* scene, const char* path, int samples_per_span) {
    if (null_args({scene, path}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] {
        bsvg::SvgOptions options;
        options.samples_per_span = samples_per_span;
        bsvg::write_text(path, bsvg::export_svg(scene->get(), options));
    });
}

bsvg_status bsvg_scene_render_png(const bsvg_scene* scene, const char* path, int samples_per_span) {
    if (null_args({scene, path}))
        return BSVG_ERR_INVALID_ARGUMENT;
    return guarded([&] { bsvg::write_png(path, bsvg::render_scene(scene->get(), samples_per_span)); });
}

void bsvg_scene_free(bsvg_scene* scene) { delete scene; }

} // extern "C"
