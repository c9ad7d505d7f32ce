#include "slowlab.h"

#include <new>
#include <string>

#include "slowlab/covering.hpp"
#include "slowlab/experiment.hpp"

struct slowlab_run {
    std::string config;
    slowlab::RunOverrides overrides;
    std::string error;
};

extern "C" {

slowlab_run* slowlab_run_create(const char* config_json) {
    return new (std::nothrow) slowlab_run{config_json ? config_json : "", {}, {}};
}

void slowlab_run_destroy(slowlab_run* run) { delete run; }

void slowlab_run_set_seed(slowlab_run* run, uint64_t seed) {
    if (run) run->overrides.seed = seed;
}

void slowlab_run_set_out_dir(slowlab_run* run, const char* out_dir) {
    if (run && out_dir) run->overrides.out_dir = out_dir;
}

void slowlab_run_set_threads(slowlab_run* run, int threads) {
    if (run) run->overrides.threads = threads;
}

int slowlab_run_execute(slowlab_run* run, const char* command) {
    if (!run) return SLOWLAB_ERR_SCHEMA;
    run->error.clear();
    try {
        slowlab::run_experiment(run->config, command ? command : "", run->overrides);
        return SLOWLAB_OK;
    } catch (const slowlab::Error& e) {
        run->error = e.what();
        switch (e.code()) {
        case slowlab::Errc::insufficient_fiber_data:
            return SLOWLAB_ERR_FIBER_DATA;
        case slowlab::Errc::unsupported_operation:
        case slowlab::Errc::numerical_degeneracy:
            return SLOWLAB_ERR_UNSUPPORTED;
        default:
            return SLOWLAB_ERR_SCHEMA;
        }
    } catch (const std::exception& e) {
        run->error = e.what();
        return SLOWLAB_ERR_SCHEMA;
    }
}

const char* slowlab_run_error(const slowlab_run* run) { return run ? run->error.c_str() : ""; }

const char* slowlab_version(void) { return slowlab::kVersion; }

double slowlab_ball_count_bound(uint64_t n, uint32_t alphabet, double eps) {
    try {
        return slowlab::ball_count_bound(n, alphabet, eps);
    } catch (const std::exception&) {
        return -1.0;
    }
}

} // extern "C"
