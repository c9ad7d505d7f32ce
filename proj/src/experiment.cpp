#include "slowlab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "slowlab/entropy.hpp"
#include "slowlab/rigidity.hpp"

namespace slowlab {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& field, const std::string& what) {
    fail(Errc::schema, "config field '" + field + "': " + what);
}

const json& need(const json& j, const std::string& field) {
    if (!j.contains(field)) schema_fail(field, "missing");
    return j.at(field);
}

double need_number(const json& j, const std::string& field) {
    const json& v = need(j, field);
    if (!v.is_number()) schema_fail(field, "expected a number");
    return v.get<double>();
}

std::string need_string(const json& j, const std::string& field) {
    const json& v = need(j, field);
    if (!v.is_string()) schema_fail(field, "expected a string");
    return v.get<std::string>();
}

// Exact floor(p * 2^128 / q) by bitwise long division.
u128 rational_frac(std::uint64_t p, std::uint64_t q) {
    if (q == 0) schema_fail("den", "zero denominator");
    u128 out = 0;
    std::uint64_t rem = p % q;
    for (int i = 0; i < 128; ++i) {
        const auto wide = (static_cast<u128>(rem) << 1);
        const auto bit = static_cast<std::uint64_t>(wide / q);
        rem = static_cast<std::uint64_t>(wide % q);
        out = (out << 1) | bit;
    }
    return out;
}

SystemPtr parse_system(const json& j, const std::string& path);
Partition parse_partition_impl(const json& j, const std::string& path, const SystemPtr& sys);

GroupCocycle parse_group_cocycle(const json& j, const std::string& path, const SystemPtr& base) {
    GroupCocycle c;
    const json& inc = need(j, "increments");
    if (!inc.is_array() || inc.empty()) schema_fail(path + ".increments", "expected a nonempty array");
    for (const auto& v : inc) {
        if (!v.is_number_unsigned()) schema_fail(path + ".increments", "expected nonnegative integers");
        c.increments.push_back(v.get<std::uint32_t>());
    }
    if (j.contains("partition")) {
        Partition p = parse_partition_impl(j.at("partition"), path + ".partition", base);
        if (p.size != c.increments.size())
            schema_fail(path, "increments count must match the partition size");
        c.base_partition = std::move(p);
    } else if (c.increments.size() != 1) {
        schema_fail(path + ".increments", "constant cocycle takes exactly one increment");
    }
    return c;
}

Partition parse_partition_impl(const json& j, const std::string& path, const SystemPtr& sys);

SystemPtr parse_system(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    if (kind == "trivial") return System::trivial();
    if (kind == "bernoulli") {
        const json& probs = need(j, "probs");
        if (!probs.is_array() || probs.size() < 2) schema_fail(path + ".probs", "expected >= 2 probabilities");
        std::vector<double> p;
        for (const auto& v : probs) {
            if (!v.is_number()) schema_fail(path + ".probs", "expected numbers");
            p.push_back(v.get<double>());
        }
        return System::bernoulli(std::move(p));
    }
    if (kind == "rotation") {
        if (j.contains("angle") && j.at("angle").is_string()) {
            if (j.at("angle").get<std::string>() != "golden")
                schema_fail(path + ".angle", "only 'golden' is recognized");
            return System::golden_rotation();
        }
        if (j.contains("num") && j.contains("den")) {
            const auto p = static_cast<std::uint64_t>(need_number(j, "num"));
            const auto q = static_cast<std::uint64_t>(need_number(j, "den"));
            return System::rotation(CircleCoord{rational_frac(p, q)});
        }
        schema_fail(path, "rotation needs angle: 'golden' or num/den");
    }
    if (kind == "odometer") return System::odometer(static_cast<std::uint32_t>(need_number(j, "base")));
    if (kind == "skew") {
        SystemPtr base = parse_system(need(j, "base"), path + ".base");
        const auto order = static_cast<std::uint32_t>(need_number(j, "group_order"));
        GroupCocycle c = parse_group_cocycle(need(j, "cocycle"), path + ".cocycle", base);
        return System::skew(std::move(base), order, std::move(c));
    }
    if (kind == "product") {
        return System::product(parse_system(need(j, "first"), path + ".first"),
                               parse_system(need(j, "second"), path + ".second"));
    }
    schema_fail(path + ".kind", "unknown system kind '" + kind + "'");
}

// `sys` is the system the partition will label points of, used to resolve
// symbol partitions against the underlying bernoulli alphabet.
Partition parse_partition_impl(const json& j, const std::string& path, const SystemPtr& sys) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    if (kind == "constant") return constant_partition();
    if (kind == "symbol") {
        SystemPtr b = sys;
        while (b && b->kind() == SystemKind::skew) b = b->base();
        if (!b || b->kind() != SystemKind::bernoulli)
            schema_fail(path, "symbol partition needs a bernoulli system underneath");
        return symbol_partition(b);
    }
    if (kind == "intervals") {
        const json& breaks = need(j, "breaks");
        if (!breaks.is_array() || breaks.empty()) schema_fail(path + ".breaks", "expected a nonempty array");
        std::vector<u128> b;
        for (const auto& v : breaks) {
            if (!v.is_number()) schema_fail(path + ".breaks", "expected numbers in [0,1)");
            const double t = v.get<double>();
            if (t < 0.0 || t >= 1.0) schema_fail(path + ".breaks", "breaks must lie in [0,1)");
            b.push_back(ld_to_frac(static_cast<long double>(t)));
        }
        return interval_partition(std::move(b));
    }
    if (kind == "dyadic") return dyadic_partition(static_cast<int>(need_number(j, "depth")));
    if (kind == "fiber") {
        const auto order = static_cast<std::uint32_t>(need_number(j, "order"));
        const int layer = j.contains("layer") ? static_cast<int>(need_number(j, "layer")) : 0;
        return fiber_partition(order, layer);
    }
    if (kind == "refine") {
        return refine_partition(parse_partition_impl(need(j, "first"), path + ".first", sys),
                                parse_partition_impl(need(j, "second"), path + ".second", sys));
    }
    if (kind == "first" || kind == "second") {
        SystemPtr inner_sys;
        if (sys && sys->kind() == SystemKind::product)
            inner_sys = (kind == "first") ? sys->base() : sys->second();
        else if (sys && sys->kind() == SystemKind::skew && kind == "first")
            inner_sys = sys->base();
        Partition inner = parse_partition_impl(need(j, "inner"), path + ".inner", inner_sys);
        return kind == "first" ? first_component_partition(inner) : second_component_partition(inner);
    }
    schema_fail(path + ".kind", "unknown partition kind '" + kind + "'");
}

FolnerSequence parse_folner(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    if (kind == "interval") return FolnerSequence::interval();
    if (kind == "anchored") {
        const json& a = need(j, "anchors");
        if (!a.is_array()) schema_fail(path + ".anchors", "expected an array");
        std::vector<std::int64_t> anchors;
        for (const auto& v : a) anchors.push_back(v.get<std::int64_t>());
        return FolnerSequence::anchored_union(std::move(anchors),
                                              static_cast<std::int64_t>(need_number(j, "width")));
    }
    if (kind == "rigidity") {
        const json& t = need(j, "times");
        if (!t.is_array()) schema_fail(path + ".times", "expected an array");
        std::vector<std::int64_t> times;
        for (const auto& v : t) times.push_back(v.get<std::int64_t>());
        const std::string rule = need_string(j, "width_rule");
        FolnerSequence::WidthRule r;
        if (rule == "log")
            r = FolnerSequence::WidthRule::log_rule;
        else if (rule == "linear")
            r = FolnerSequence::WidthRule::linear;
        else if (rule == "const")
            r = FolnerSequence::WidthRule::constant;
        else
            schema_fail(path + ".width_rule", "expected log, linear, or const");
        const std::int64_t coeff =
            j.contains("coeff") ? static_cast<std::int64_t>(need_number(j, "coeff")) : 1;
        return FolnerSequence::rigidity(std::move(times), r, coeff);
    }
    schema_fail(path + ".kind", "unknown folner kind '" + kind + "'");
}

RateFunction parse_rate(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    if (kind == "log") return RateFunction::log_rate();
    if (kind == "poly") return RateFunction::poly(need_number(j, "t"));
    if (kind == "exp") return RateFunction::exp_rate(need_number(j, "t"));
    if (kind == "table") {
        const json& v = need(j, "values");
        if (!v.is_array()) schema_fail(path + ".values", "expected an array");
        std::vector<double> values;
        for (const auto& x : v) values.push_back(x.get<double>());
        return RateFunction::table(std::move(values));
    }
    schema_fail(path + ".kind", "unknown rate kind '" + kind + "'");
}

IntervalAutomorphism parse_automorphism(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    if (kind == "identity") return IntervalAutomorphism::identity();
    if (kind == "baker")
        return IntervalAutomorphism::baker(static_cast<std::int64_t>(need_number(j, "iterates")));
    if (kind == "dyadic") {
        DyadicPermutation p;
        p.rank = static_cast<int>(need_number(j, "rank"));
        const json& perm = need(j, "perm");
        if (!perm.is_array()) schema_fail(path + ".perm", "expected an array");
        for (const auto& v : perm) p.perm.push_back(v.get<std::uint32_t>());
        try {
            p.validate();
        } catch (const Error& e) {
            schema_fail(path + ".perm", e.what());
        }
        return IntervalAutomorphism::dyadic(std::move(p));
    }
    if (kind == "compose") {
        const json& list = need(j, "list");
        if (!list.is_array()) schema_fail(path + ".list", "expected an array");
        IntervalAutomorphism out = IntervalAutomorphism::identity();
        // listed outermost first: list[0] applied last
        for (std::size_t i = list.size(); i-- > 0;)
            out = parse_automorphism(list[i], path + ".list").after(out);
        return out;
    }
    schema_fail(path + ".kind", "unknown automorphism kind '" + kind + "'");
}

AutoCocycle parse_auto_cocycle(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    AutoCocycle c;
    c.base = parse_system(need(j, "base"), path + ".base");
    if (j.contains("partition"))
        c.base_partition = parse_partition_impl(j.at("partition"), path + ".partition", c.base);
    const json& values = need(j, "values");
    if (!values.is_array() || values.empty()) schema_fail(path + ".values", "expected a nonempty array");
    for (std::size_t i = 0; i < values.size(); ++i)
        c.values.push_back(parse_automorphism(values[i], path + ".values"));
    if (c.base_partition && c.base_partition->size != c.values.size())
        schema_fail(path + ".values", "value count must match the partition size");
    if (!c.base_partition && c.values.size() != 1)
        schema_fail(path + ".values", "constant cocycle takes exactly one value");
    return c;
}

DyadicSet parse_event(const json& j, const std::string& path) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const int depth = static_cast<int>(need_number(j, "depth"));
    const json& cells = need(j, "cells");
    if (!cells.is_array() || cells.empty()) schema_fail(path + ".cells", "expected a nonempty array");
    std::vector<std::uint64_t> idx;
    for (const auto& v : cells) idx.push_back(v.get<std::uint64_t>());
    try {
        return DyadicSet::of_cells(depth, idx);
    } catch (const Error& e) {
        schema_fail(path, e.what());
    }
}

std::vector<double> parse_eps_grid(const json& j) {
    std::vector<double> grid = {0.4, 0.2, 0.1, 0.05};
    if (j.contains("epsilon_grid")) {
        const json& g = j.at("epsilon_grid");
        if (!g.is_array() || g.empty()) schema_fail("epsilon_grid", "expected a nonempty array");
        grid.clear();
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (!g[i].is_number()) schema_fail("epsilon_grid", "expected numbers");
            const double e = g[i].get<double>();
            if (!(e > 0.0 && e < 1.0))
                schema_fail("epsilon_grid[" + std::to_string(i) + "]", "must lie in (0,1)");
            grid.push_back(e);
        }
    }
    return grid;
}

std::vector<std::int64_t> parse_n_grid(const json& j, std::int64_t min_n) {
    std::vector<std::int64_t> grid;
    if (j.contains("n_grid")) {
        const json& g = j.at("n_grid");
        if (!g.is_array() || g.empty()) schema_fail("n_grid", "expected a nonempty array");
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::int64_t n = g[i].get<std::int64_t>();
            if (n < min_n)
                schema_fail("n_grid[" + std::to_string(i) + "]",
                            "must be >= " + std::to_string(min_n));
            grid.push_back(n);
        }
    } else {
        for (int k = 3; k <= 12; ++k) grid.push_back(std::int64_t{1} << k);
    }
    return grid;
}

CoverMode parse_mode(const json& j) {
    if (!j.contains("mode")) return CoverMode::auto_mode;
    const std::string m = need_string(j, "mode");
    if (m == "auto") return CoverMode::auto_mode;
    if (m == "bracket") return CoverMode::bracket;
    if (m == "exact") return CoverMode::exact_small;
    schema_fail("mode", "expected auto, bracket, or exact");
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_file(const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(Errc::invalid_argument, "cannot write " + p.string());
    out << body;
}

FactorMap parse_factor(const json& j, const std::string& path, const SystemPtr& sys) {
    if (!j.is_object()) schema_fail(path, "expected an object");
    const std::string kind = need_string(j, "kind");
    FactorMap f;
    if (kind == "identity")
        f = identity_factor(sys);
    else if (kind == "trivial")
        f = trivial_factor(sys);
    else if (kind == "skew_projection") {
        const int layers = j.contains("layers") ? static_cast<int>(need_number(j, "layers")) : 1;
        f = skew_projection(sys, layers);
    } else if (kind == "product_first")
        f = product_first_factor(sys);
    else
        schema_fail(path + ".kind", "unknown factor kind '" + kind + "'");
    if (j.contains("window")) f.window = static_cast<int>(need_number(j, "window"));
    if (j.contains("floor")) f.floor = static_cast<int>(need_number(j, "floor"));
    if (j.contains("target_partition"))
        f.target_partition =
            parse_partition_impl(j.at("target_partition"), path + ".target_partition", f.target);
    return f;
}

} // namespace

void run_experiment(const std::string& config_text, const std::string& command,
                    const RunOverrides& overrides) {
    const auto t0 = std::chrono::steady_clock::now();
    json cfg;
    try {
        cfg = json::parse(config_text);
    } catch (const std::exception& e) {
        fail(Errc::schema, std::string("config is not valid JSON: ") + e.what());
    }
    if (!cfg.is_object()) fail(Errc::schema, "config root must be a JSON object");

    std::uint64_t seed = 1;
    if (cfg.contains("seed")) {
        if (!cfg.at("seed").is_number_unsigned()) schema_fail("seed", "expected a nonnegative integer");
        seed = cfg.at("seed").get<std::uint64_t>();
    }
    if (overrides.seed) seed = *overrides.seed;
    std::string out_dir = cfg.value("out_dir", std::string("out"));
    if (overrides.out_dir) out_dir = *overrides.out_dir;
    int threads = cfg.value("threads", 0);
    if (overrides.threads) threads = *overrides.threads;
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;

    const std::vector<double> eps_grid = parse_eps_grid(cfg);
    const std::vector<std::int64_t> n_grid = parse_n_grid(cfg, command == "mixing" ? 0 : 1);
    const CoverMode mode = parse_mode(cfg);

    SampleBudget sample;
    sample.seed = seed;
    if (cfg.contains("sample")) {
        const json& s = cfg.at("sample");
        if (!s.is_object()) schema_fail("sample", "expected an object");
        sample.exact = s.value("exact", false);
        if (s.contains("n_points")) sample.n_points = s.at("n_points").get<std::uint64_t>();
        if (sample.n_points == 0) schema_fail("sample.n_points", "must be positive");
    }

    json meta;
    meta["version"] = kVersion;
    meta["command"] = command;
    meta["config_hash"] = fnv1a(config_text);
    meta["seed"] = seed;
    meta["threads"] = threads;
    meta["epsilon_grid"] = eps_grid;
    meta["n_grid"] = n_grid;
    meta["note"] = "sup over epsilon and limsup over n are reported as maxima over these finite grids";

    const std::filesystem::path out_path(out_dir);
    std::filesystem::create_directories(out_path);

    const bool wants_profile =
        command == "cov" || command == "relcov" || command == "profile" || command == "ks";
    const bool wants_rigidity = command == "rigidity";
    const bool wants_mixing = command == "mixing";
    if (!wants_profile && !wants_rigidity && !wants_mixing && command != "validate")
        fail(Errc::schema, "unknown command '" + command + "'");

    if (wants_profile || command == "validate") {
        SystemPtr sys;
        if (cfg.contains("system")) sys = parse_system(cfg.at("system"), "system");
        if (wants_profile && !sys) schema_fail("system", "missing");
        std::optional<FactorMap> factor;
        if (cfg.contains("factor") && sys) factor = parse_factor(cfg.at("factor"), "factor", sys);
        if (command == "relcov" && !factor) schema_fail("factor", "missing (relcov needs a factor)");
        std::optional<Partition> part;
        if (cfg.contains("partition") && sys)
            part = parse_partition_impl(cfg.at("partition"), "partition", sys);
        if (wants_profile && !part) schema_fail("partition", "missing");
        FolnerSequence folner =
            cfg.contains("folner") ? parse_folner(cfg.at("folner"), "folner") : FolnerSequence::interval();
        RateFunction rate =
            cfg.contains("rate") ? parse_rate(cfg.at("rate"), "rate") : RateFunction::log_rate();

        if (wants_profile) {
            Profile prof;
            if (factor && command != "cov") {
                BaseBudget base;
                base.seed = seed;
                base.fiber_budget = sample;
                if (cfg.contains("base")) {
                    const json& b = cfg.at("base");
                    if (!b.is_object()) schema_fail("base", "expected an object");
                    if (b.contains("n_fibers")) base.n_fibers = b.at("n_fibers").get<std::uint64_t>();
                    if (base.n_fibers == 0) schema_fail("base.n_fibers", "must be positive");
                }
                prof = slow_entropy_profile(*factor, *part, folner, eps_grid, n_grid, rate, base,
                                            mode, threads);
            } else {
                prof = slow_entropy_profile(sys, *part, folner, eps_grid, n_grid, rate, sample, mode,
                                            threads);
            }
            write_file(out_path / "profile.csv", profile_csv(prof));
            if (command == "ks") {
                const KsEstimate ks = ks_estimate(prof);
                meta["ks_from_lower"] = ks.from_lower;
                meta["ks_from_upper"] = ks.from_upper;
            }
            if (cfg.contains("verdict_window")) {
                const auto w = cfg.at("verdict_window").get<std::size_t>();
                meta["verdict"] = verdict_name(boundedness_verdict(prof, w));
            }
        }
    }

    if (wants_rigidity || wants_mixing || command == "validate") {
        if (cfg.contains("cocycle")) {
            const AutoCocycle alpha = parse_auto_cocycle(cfg.at("cocycle"), "cocycle");
            if (wants_rigidity) {
                const json& r = need(cfg, "rigidity");
                const auto horizon = static_cast<std::int64_t>(need_number(r, "horizon"));
                const double delta = need_number(r, "delta");
                const int depth = static_cast<int>(need_number(r, "depth"));
                const auto points =
                    r.contains("points") ? r.at("points").get<std::size_t>() : std::size_t{1};
                std::string csv = "point,time,distance\n";
                for (std::size_t i = 0; i < points; ++i) {
                    const Point y = alpha.base->sample(seed, i);
                    std::vector<double> dist;
                    const auto times = rigidity_scan(alpha, y, horizon, delta, depth, &dist);
                    const std::string rows = rigidity_csv(times, dist, i);
                    csv += rows.substr(rows.find('\n') + 1);
                }
                write_file(out_path / "rigidity.csv", csv);
            }
            if (wants_mixing) {
                const DyadicSet e = parse_event(need(cfg, "event"), "event");
                std::string csv = "point,n,statistic\n";
                const auto points = cfg.contains("points")
                                        ? cfg.at("points").get<std::size_t>()
                                        : std::size_t{1};
                char buf[96];
                for (std::size_t i = 0; i < points; ++i) {
                    const Point y = alpha.base->sample(seed, i);
                    for (std::int64_t n : n_grid) {
                        const double v = mixing_statistic(alpha, y, e, n);
                        std::snprintf(buf, sizeof(buf), "%zu,%lld,%.9g\n", i,
                                      static_cast<long long>(n), v);
                        csv += buf;
                    }
                }
                write_file(out_path / "mixing.csv", csv);
            }
        } else if (wants_rigidity || wants_mixing) {
            schema_fail("cocycle", "missing");
        }
    }

    const auto t1 = std::chrono::steady_clock::now();
    meta["wall_time_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    if (command != "validate") write_file(out_path / "metadata.json", meta.dump(2) + "\n");
}

} // namespace slowlab
