#pragma once

#include <string>
#include <vector>

#include "slowlab/covering.hpp"
#include "slowlab/names.hpp"

namespace slowlab {

struct BaseBudget {
    std::uint64_t n_fibers = 256; // monte carlo base points when the base is not finite
    std::uint64_t seed = 1;
    SampleBudget fiber_budget; // per-fiber sampling (exact or monte carlo)
};

// Base points with weights plus the conditional name sample over each.
struct FiberBatch {
    std::vector<Point> base_points;
    std::vector<double> base_weights;
    std::vector<NameSample> fiber_samples;
};

struct RelativeCoverEstimate {
    std::uint64_t value_lower = 0;
    std::uint64_t value_upper = 0;
    std::vector<CoverBracket> per_fiber;
    double epsilon = 0;
};

// Name sample of the conditional measure over the fiber of y.
NameSample fiber_sample(const FactorMap& f, const Point& y, const Partition& p, const FolnerSet& F,
                        const SampleBudget& budget);

FiberBatch collect_fiber_batch(const FactorMap& f, const Partition& p, const FolnerSet& F,
                               const BaseBudget& budget);

// Smallest M with weight{v : v <= M} >= mass. Weights need not be
// normalized; mass is compared against the running sum directly.
std::uint64_t weighted_lower_quantile(std::vector<std::uint64_t> values, std::vector<double> weights,
                                      double mass);

// (1-eps)-quantile over base points of the fiberwise covering numbers,
// bracketed by applying the quantile to the per-fiber lower and upper
// values separately.
RelativeCoverEstimate relative_cover(const FactorMap& f, const Partition& p, const FolnerSet& F,
                                     double epsilon, const BaseBudget& budget,
                                     CoverMode mode = CoverMode::auto_mode);

// Rows "fiber,cov_lower,cov_upper" for diagnostics.
std::string fiber_csv(const RelativeCoverEstimate& est);

} // namespace slowlab
