#include "slowlab/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

namespace slowlab {

RateFunction RateFunction::log_rate() { return RateFunction{Kind::log, 1.0, {}}; }
RateFunction RateFunction::poly(double t) {
    if (t <= 0) fail(Errc::invalid_argument, "poly rate needs t > 0");
    return RateFunction{Kind::poly, t, {}};
}
RateFunction RateFunction::exp_rate(double t) {
    if (t <= 0) fail(Errc::invalid_argument, "exp rate needs t > 0");
    return RateFunction{Kind::exp, t, {}};
}
RateFunction RateFunction::table(std::vector<double> values) {
    if (values.empty()) fail(Errc::invalid_argument, "rate table must be nonempty");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] <= 0) fail(Errc::invalid_argument, "rate table values must be positive");
        if (i > 0 && values[i] < values[i - 1])
            fail(Errc::invalid_argument, "rate table must be nondecreasing");
    }
    return RateFunction{Kind::table, 1.0, std::move(values)};
}

double eval_rate(const RateFunction& u, std::int64_t n) {
    if (n < 1) fail(Errc::invalid_argument, "rate functions are defined for n >= 1");
    switch (u.kind) {
    case RateFunction::Kind::log:
        return std::log(static_cast<double>(n) + 1.0);
    case RateFunction::Kind::poly:
        return std::pow(static_cast<double>(n), u.t);
    case RateFunction::Kind::exp:
        return std::exp(u.t * static_cast<double>(n));
    case RateFunction::Kind::table:
        if (static_cast<std::size_t>(n) > u.values.size())
            fail(Errc::invalid_argument, "rate table too short for requested n");
        return u.values[static_cast<std::size_t>(n - 1)];
    }
    fail(Errc::invalid_argument, "unknown rate kind");
}

namespace {

void check_grids(const std::vector<double>& eps_grid, const std::vector<std::int64_t>& n_grid) {
    if (eps_grid.empty() || n_grid.empty()) fail(Errc::invalid_argument, "grids must be nonempty");
    for (double e : eps_grid)
        if (!(e > 0.0 && e < 1.0)) fail(Errc::invalid_argument, "epsilon grid must lie in (0,1)");
    for (std::int64_t n : n_grid)
        if (n < 1) fail(Errc::invalid_argument, "n grid entries must be >= 1");
}

// Runs one task per n index on `threads` workers; each task fills the
// epsilon-inner block of rows it owns, so output order is deterministic.
template <typename Task>
void run_grid(std::size_t n_tasks, int threads, Task&& task) {
    const int workers =
        std::max(1, std::min<int>(threads, static_cast<int>(n_tasks)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) task(i);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void fill_row(ProfileRow& row, std::int64_t n, std::uint64_t f_size, double eps,
              std::uint64_t lower, std::uint64_t upper, const RateFunction& u) {
    row.n = n;
    row.f_size = f_size;
    row.epsilon = eps;
    row.cov_lower = lower;
    row.cov_upper = upper;
    row.rate = eval_rate(u, static_cast<std::int64_t>(f_size));
    row.ratio_lower = static_cast<double>(lower) / row.rate;
    row.ratio_upper = static_cast<double>(upper) / row.rate;
}

} // namespace

Profile slow_entropy_profile(const SystemPtr& sys, const Partition& p, const FolnerSequence& folner,
                             const std::vector<double>& eps_grid,
                             const std::vector<std::int64_t>& n_grid, const RateFunction& u,
                             const SampleBudget& budget, CoverMode mode, int threads) {
    check_grids(eps_grid, n_grid);
    Profile prof;
    prof.rows.resize(n_grid.size() * eps_grid.size());
    run_grid(n_grid.size(), threads, [&](std::size_t i) {
        const std::int64_t n = n_grid[i];
        const FolnerSet F = folner.set_for(n);
        const NameSample sample = collect_name_sample(sys, p, F, budget);
        for (std::size_t j = 0; j < eps_grid.size(); ++j) {
            const CoverBracket b = covering_number(sample, eps_grid[j], mode);
            fill_row(prof.rows[i * eps_grid.size() + j], n, F.size(), eps_grid[j], b.lower, b.upper,
                     u);
        }
    });
    return prof;
}

Profile slow_entropy_profile(const FactorMap& f, const Partition& p, const FolnerSequence& folner,
                             const std::vector<double>& eps_grid,
                             const std::vector<std::int64_t>& n_grid, const RateFunction& u,
                             const BaseBudget& budget, CoverMode mode, int threads) {
    check_grids(eps_grid, n_grid);
    Profile prof;
    prof.rows.resize(n_grid.size() * eps_grid.size());
    run_grid(n_grid.size(), threads, [&](std::size_t i) {
        const std::int64_t n = n_grid[i];
        const FolnerSet F = folner.set_for(n);
        for (std::size_t j = 0; j < eps_grid.size(); ++j) {
            const RelativeCoverEstimate est = relative_cover(f, p, F, eps_grid[j], budget, mode);
            fill_row(prof.rows[i * eps_grid.size() + j], n, F.size(), eps_grid[j], est.value_lower,
                     est.value_upper, u);
        }
    });
    return prof;
}

std::string profile_csv(const Profile& p) {
    std::string out = "n,F_size,epsilon,cov_lower,cov_upper,rate,ratio_lower,ratio_upper\n";
    char buf[256];
    for (const ProfileRow& r : p.rows) {
        std::snprintf(buf, sizeof(buf), "%lld,%llu,%.9g,%llu,%llu,%.9g,%.9g,%.9g\n",
                      static_cast<long long>(r.n), static_cast<unsigned long long>(r.f_size),
                      r.epsilon, static_cast<unsigned long long>(r.cov_lower),
                      static_cast<unsigned long long>(r.cov_upper), r.rate, r.ratio_lower,
                      r.ratio_upper);
        out += buf;
    }
    return out;
}

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-12 * std::max(1.0, n * sxx))
        fail(Errc::numerical_degeneracy, "degenerate least-squares fit: window sizes do not vary");
    return (n * sxy - sx * sy) / denom;
}

} // namespace

KsEstimate ks_estimate(const Profile& profile) {
    std::map<double, std::vector<const ProfileRow*>> by_eps;
    for (const ProfileRow& r : profile.rows) by_eps[r.epsilon].push_back(&r);
    if (by_eps.empty()) fail(Errc::invalid_argument, "ks estimate needs a nonempty profile");
    KsEstimate est{-1e300, -1e300};
    for (const auto& [eps, rows] : by_eps) {
        if (rows.size() < 3) fail(Errc::invalid_argument, "ks estimate needs >= 3 window sizes");
        std::vector<double> x, ylo, yhi;
        for (const ProfileRow* r : rows) {
            x.push_back(static_cast<double>(r->f_size));
            ylo.push_back(std::log(static_cast<double>(r->cov_lower)));
            yhi.push_back(std::log(static_cast<double>(r->cov_upper)));
        }
        est.from_lower = std::max(est.from_lower, ls_slope(x, ylo));
        est.from_upper = std::max(est.from_upper, ls_slope(x, yhi));
    }
    return est;
}

std::string verdict_name(Verdict v) {
    switch (v) {
    case Verdict::bounded: return "bounded";
    case Verdict::growing: return "growing";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict boundedness_verdict(const Profile& profile, std::size_t window) {
    if (window < 2) fail(Errc::invalid_argument, "verdict window must be >= 2");
    std::map<double, std::map<std::int64_t, const ProfileRow*>> by_eps;
    for (const ProfileRow& r : profile.rows) by_eps[r.epsilon][r.n] = &r;
    bool all_flat = true;
    for (const auto& [eps, rows] : by_eps) {
        if (rows.size() < window)
            fail(Errc::invalid_argument, "profile shorter than the verdict window");
        std::vector<const ProfileRow*> ordered;
        for (const auto& [n, r] : rows) ordered.push_back(r);
        const std::size_t start = ordered.size() - window;
        const ProfileRow* first = ordered[start];
        const ProfileRow* last = ordered.back();
        for (std::size_t i = start; i < ordered.size(); ++i)
            if (ordered[i]->cov_upper != first->cov_upper) all_flat = false;
        if (last->cov_lower >= first->cov_lower + 2) return Verdict::growing;
    }
    return all_flat ? Verdict::bounded : Verdict::inconclusive;
}

} // namespace slowlab
