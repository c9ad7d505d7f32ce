#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "slowlab.h"

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

int run_command(const std::string& config, const char* command, const std::string& out_dir,
                std::string* error = nullptr) {
    slowlab_run* run = slowlab_run_create(config.c_str());
    REQUIRE(run != nullptr);
    slowlab_run_set_out_dir(run, out_dir.c_str());
    const int rc = slowlab_run_execute(run, command);
    if (error) *error = slowlab_run_error(run);
    slowlab_run_destroy(run);
    return rc;
}

const char* kBernoulliConfig = R"({
  "system": {"kind": "bernoulli", "probs": [0.5, 0.5]},
  "partition": {"kind": "symbol"},
  "epsilon_grid": [0.1, 0.2],
  "n_grid": [4, 6, 8],
  "sample": {"exact": true},
  "seed": 7
})";

} // namespace

TEST_CASE("version string") {
    CHECK(std::strcmp(slowlab_version(), "0.1.0") == 0);
}

TEST_CASE("ball count bound through the C API") {
    CHECK(slowlab_ball_count_bound(4, 2, 0.25) >= 5.0);
    CHECK(slowlab_ball_count_bound(4, 2, -1.0) == -1.0);
}

TEST_CASE("validate accepts a good config and flags a bad one") {
    std::string err;
    CHECK(run_command(kBernoulliConfig, "validate", "/tmp/slowlab_t0", &err) == SLOWLAB_OK);
    CHECK(err.empty());

    const char* bad = R"({"system": {"kind": "bernoulli", "probs": [0.5, 0.5]},
                          "partition": {"kind": "symbol"},
                          "epsilon_grid": [1.5]})";
    CHECK(run_command(bad, "validate", "/tmp/slowlab_t0", &err) == SLOWLAB_ERR_SCHEMA);
    CHECK(err.find("epsilon_grid") != std::string::npos);

    CHECK(run_command("not json", "validate", "/tmp/slowlab_t0", &err) == SLOWLAB_ERR_SCHEMA);
    CHECK(run_command(kBernoulliConfig, "bogus", "/tmp/slowlab_t0", &err) == SLOWLAB_ERR_SCHEMA);
}

TEST_CASE("profile run writes csv and metadata, deterministically") {
    namespace fs = std::filesystem;
    const fs::path a = "/tmp/slowlab_t1a";
    const fs::path b = "/tmp/slowlab_t1b";
    fs::remove_all(a);
    fs::remove_all(b);
    REQUIRE(run_command(kBernoulliConfig, "profile", a.string()) == SLOWLAB_OK);
    REQUIRE(run_command(kBernoulliConfig, "profile", b.string()) == SLOWLAB_OK);
    const std::string csv = slurp(a / "profile.csv");
    CHECK(csv == slurp(b / "profile.csv")); // same config + seed: byte identical
    CHECK(csv.rfind("n,F_size,epsilon,cov_lower,cov_upper,rate,ratio_lower,ratio_upper\n", 0) == 0);
    // header plus one row per (n, epsilon) pair
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 3 * 2);
    CHECK(csv.find('\r') == std::string::npos);
    const std::string meta = slurp(a / "metadata.json");
    CHECK(meta.find("\"seed\": 7") != std::string::npos);
    CHECK(meta.find("\"command\": \"profile\"") != std::string::npos);
}

TEST_CASE("seed override changes the monte carlo output") {
    const char* mc = R"({
      "system": {"kind": "rotation", "angle": "golden"},
      "partition": {"kind": "dyadic", "depth": 3},
      "epsilon_grid": [0.2],
      "n_grid": [8, 16],
      "sample": {"n_points": 200}
    })";
    namespace fs = std::filesystem;
    slowlab_run* run = slowlab_run_create(mc);
    REQUIRE(run != nullptr);
    slowlab_run_set_out_dir(run, "/tmp/slowlab_t2a");
    slowlab_run_set_seed(run, 101);
    REQUIRE(slowlab_run_execute(run, "profile") == SLOWLAB_OK);
    slowlab_run_set_out_dir(run, "/tmp/slowlab_t2b");
    REQUIRE(slowlab_run_execute(run, "profile") == SLOWLAB_OK);
    slowlab_run_destroy(run);
    // same seed twice: identical
    CHECK(slurp("/tmp/slowlab_t2a/profile.csv") == slurp("/tmp/slowlab_t2b/profile.csv"));
    CHECK(slurp("/tmp/slowlab_t2a/metadata.json").find("\"seed\": 101") != std::string::npos);
}

TEST_CASE("ks command reports slope estimates") {
    REQUIRE(run_command(kBernoulliConfig, "ks", "/tmp/slowlab_t3") == SLOWLAB_OK);
    const std::string meta = slurp("/tmp/slowlab_t3/metadata.json");
    CHECK(meta.find("ks_from_lower") != std::string::npos);
    CHECK(meta.find("ks_from_upper") != std::string::npos);
}

TEST_CASE("insufficient fiber data maps to exit 3") {
    const char* cfg = R"({
      "system": {"kind": "product",
                 "first": {"kind": "bernoulli", "probs": [0.5, 0.5]},
                 "second": {"kind": "bernoulli", "probs": [0.5, 0.5]}},
      "factor": {"kind": "product_first",
                 "target_partition": {"kind": "symbol"},
                 "window": 12, "floor": 50},
      "partition": {"kind": "second", "inner": {"kind": "symbol"}},
      "epsilon_grid": [0.2],
      "n_grid": [4],
      "base": {"n_fibers": 2},
      "sample": {"n_points": 200}
    })";
    std::string err;
    CHECK(run_command(cfg, "relcov", "/tmp/slowlab_t4", &err) == SLOWLAB_ERR_FIBER_DATA);
    CHECK(!err.empty());
}

TEST_CASE("exact sampling on an unsupported system maps to exit 4") {
    const char* cfg = R"({
      "system": {"kind": "odometer", "base": 3},
      "partition": {"kind": "constant"},
      "epsilon_grid": [0.2],
      "n_grid": [4],
      "sample": {"exact": true}
    })";
    // constant partitions are always exact; symbol enumeration past |F| = 20 is not
    const char* cfg2 = R"({
      "system": {"kind": "bernoulli", "probs": [0.5, 0.5]},
      "partition": {"kind": "symbol"},
      "epsilon_grid": [0.2],
      "n_grid": [25],
      "sample": {"exact": true}
    })";
    CHECK(run_command(cfg, "profile", "/tmp/slowlab_t5") == SLOWLAB_OK);
    std::string err;
    CHECK(run_command(cfg2, "profile", "/tmp/slowlab_t5", &err) == SLOWLAB_ERR_UNSUPPORTED);
}

TEST_CASE("rigidity and mixing commands write their tables") {
    const char* rig = R"({
      "cocycle": {"base": {"kind": "rotation", "angle": "golden"},
                  "values": [{"kind": "dyadic", "rank": 1, "perm": [1, 0]}]},
      "rigidity": {"horizon": 8, "delta": 1e-9, "depth": 2, "points": 2}
    })";
    REQUIRE(run_command(rig, "rigidity", "/tmp/slowlab_t6") == SLOWLAB_OK);
    const std::string rcsv = slurp("/tmp/slowlab_t6/rigidity.csv");
    CHECK(rcsv.rfind("point,time,distance\n", 0) == 0);
    CHECK(rcsv.find("0,2,") != std::string::npos); // the swap has order 2

    const char* mix = R"({
      "cocycle": {"base": {"kind": "rotation", "angle": "golden"},
                  "values": [{"kind": "baker", "iterates": 1}]},
      "event": {"depth": 1, "cells": [0]},
      "n_grid": [0, 1, 4]
    })";
    REQUIRE(run_command(mix, "mixing", "/tmp/slowlab_t7") == SLOWLAB_OK);
    const std::string mcsv = slurp("/tmp/slowlab_t7/mixing.csv");
    CHECK(mcsv.rfind("point,n,statistic\n", 0) == 0);
    CHECK(mcsv.find("0,0,0.25") != std::string::npos);
    CHECK(mcsv.find("0,1,0\n") != std::string::npos);
}
