#pragma once

#include <string>
#include <vector>

#include "slowlab/relative.hpp"

namespace slowlab {

// Growth scale U(n) against which covering numbers are normalized.
// Positive and increasing; the log kind evaluates log(n+1) so U(1) > 0.
struct RateFunction {
    enum class Kind { log, poly, exp, table };
    Kind kind = Kind::log;
    double t = 1.0;             // exponent (poly) or rate (exp)
    std::vector<double> values; // table kind, indexed by n starting at 1

    static RateFunction log_rate();
    static RateFunction poly(double t);
    static RateFunction exp_rate(double t);
    static RateFunction table(std::vector<double> values);
};

double eval_rate(const RateFunction& u, std::int64_t n);

struct ProfileRow {
    std::int64_t n = 0;
    std::uint64_t f_size = 0;
    double epsilon = 0;
    std::uint64_t cov_lower = 0;
    std::uint64_t cov_upper = 0;
    double rate = 0;
    double ratio_lower = 0;
    double ratio_upper = 0;
};

struct Profile {
    std::vector<ProfileRow> rows; // grouped by n, epsilon inner
};

// Header "n,F_size,epsilon,cov_lower,cov_upper,rate,ratio_lower,ratio_upper".
std::string profile_csv(const Profile& p);

// Absolute profile: covering numbers of the system itself.
Profile slow_entropy_profile(const SystemPtr& sys, const Partition& p, const FolnerSequence& folner,
                             const std::vector<double>& eps_grid,
                             const std::vector<std::int64_t>& n_grid, const RateFunction& u,
                             const SampleBudget& budget, CoverMode mode = CoverMode::auto_mode,
                             int threads = 1);

// Relative profile: (1-eps)-quantile of fiberwise covering numbers.
Profile slow_entropy_profile(const FactorMap& f, const Partition& p, const FolnerSequence& folner,
                             const std::vector<double>& eps_grid,
                             const std::vector<std::int64_t>& n_grid, const RateFunction& u,
                             const BaseBudget& budget, CoverMode mode = CoverMode::auto_mode,
                             int threads = 1);

// Least-squares slope of log cov against |F_n|, maximized over epsilon;
// reported separately for the lower and upper brackets.
struct KsEstimate {
    double from_lower = 0;
    double from_upper = 0;
};

KsEstimate ks_estimate(const Profile& profile);

enum class Verdict { bounded, growing, inconclusive };
std::string verdict_name(Verdict v);

// bounded: trailing cov_upper constant over the window for every epsilon;
// growing: cov_lower rose by >= 2 across the window for some epsilon.
Verdict boundedness_verdict(const Profile& profile, std::size_t window);

} // namespace slowlab
