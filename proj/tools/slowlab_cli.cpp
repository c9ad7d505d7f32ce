// Command-line front end; talks to the core only through the C API.
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "slowlab.h"

namespace {

struct RunDeleter {
    void operator()(slowlab_run* r) const { slowlab_run_destroy(r); }
};

int run_command(const std::string& command, const std::string& config_path, bool have_seed,
                std::uint64_t seed, const std::string& out_dir, int threads) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "error: cannot read config file '%s'\n", config_path.c_str());
        return SLOWLAB_ERR_SCHEMA;
    }
    std::ostringstream text;
    text << in.rdbuf();
    const std::string config = text.str();

    std::unique_ptr<slowlab_run, RunDeleter> run(slowlab_run_create(config.c_str()));
    if (!run) {
        std::fprintf(stderr, "error: out of memory\n");
        return SLOWLAB_ERR_SCHEMA;
    }
    if (have_seed) slowlab_run_set_seed(run.get(), seed);
    if (!out_dir.empty()) slowlab_run_set_out_dir(run.get(), out_dir.c_str());
    if (threads > 0) slowlab_run_set_threads(run.get(), threads);

    const int status = slowlab_run_execute(run.get(), command.c_str());
    if (status != SLOWLAB_OK)
        std::fprintf(stderr, "error: %s\n", slowlab_run_error(run.get()));
    return status;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"slowlab: covering numbers, slow-entropy profiles, and cocycle rigidity scans"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(slowlab_version()));

    const char* commands[] = {"cov", "relcov", "profile", "ks", "rigidity", "mixing", "validate"};
    const char* descriptions[] = {
        "absolute covering-number profile over the (n, epsilon) grid",
        "relative covering-number profile over a factor",
        "slow-entropy growth profile (relative when a factor is configured)",
        "profile plus Kolmogorov-Sinai rate estimate",
        "rigidity-sequence scan of an interval-automorphism cocycle",
        "strong-mixing statistic of a cocycle on a dyadic event",
        "parse and validate the config, writing nothing",
    };

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool have_seed = false;
    int threads = 0;

    for (std::size_t i = 0; i < 7; ++i) {
        CLI::App* sub = app.add_subcommand(commands[i], descriptions[i]);
        sub->add_option("config", config_path, "path to the JSON config")->required();
        sub->add_option("--seed", seed, "override the config seed")
            ->each([&have_seed](const std::string&) { have_seed = true; });
        sub->add_option("--out-dir", out_dir, "override the output directory");
        sub->add_option("--threads", threads, "override the worker count");
    }

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    return run_command(command, config_path, have_seed, seed, out_dir, threads);
}
