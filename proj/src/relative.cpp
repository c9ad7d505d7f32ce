#include "slowlab/relative.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace slowlab {

namespace {

NameSample exact_skew_fiber(const FactorMap& f, const Point& y, const Partition& p,
                            const FolnerSet& F) {
    if (f.drop_layers < 1) fail(Errc::invalid_argument, "exact_skew factor must drop a skew layer");
    std::vector<std::uint32_t> orders; // top layer first
    SystemPtr cur = f.source;
    for (int i = 0; i < f.drop_layers; ++i) {
        if (!cur || cur->kind() != SystemKind::skew)
            fail(Errc::invalid_argument, "exact_skew factor needs a skew tower source");
        orders.push_back(cur->group_order());
        cur = cur->base();
    }
    std::uint64_t total = 1;
    for (std::uint32_t m : orders) total *= m;
    NameSample s;
    s.alphabet = p.size;
    s.window = F;
    s.provenance = Provenance::exact;
    s.words.reserve(total);
    s.weights.reserve(total);
    std::vector<std::uint32_t> digits(orders.size(), 0);
    for (std::uint64_t it = 0; it < total; ++it) {
        Point x = y;
        for (std::size_t i = orders.size(); i-- > 0;)
            x = make_pair_point(std::move(x), Point{GroupElem{digits[i], orders[i]}});
        s.words.push_back(extract_name(*f.source, p, x, F));
        s.weights.push_back(1.0 / static_cast<double>(total));
        for (std::size_t i = 0; i < digits.size(); ++i) {
            if (++digits[i] < orders[i]) break;
            digits[i] = 0;
        }
    }
    return s;
}

NameSample empirical_fiber(const FactorMap& f, const Point& y, const Partition& p,
                           const FolnerSet& F, const SampleBudget& budget) {
    if (!f.target_partition)
        fail(Errc::invalid_argument, "empirical fibers need a conditioning partition on the target");
    if (f.window < 1) fail(Errc::invalid_argument, "conditioning window must be positive");
    const FolnerSet win = make_interval(f.window);
    const Word key = extract_name(*f.target, *f.target_partition, y, win);
    NameSample s;
    s.alphabet = p.size;
    s.window = F;
    s.provenance = Provenance::monte_carlo;
    s.seed = budget.seed;
    for (std::uint64_t i = 0; i < budget.n_points; ++i) {
        const Point x = f.source->sample(budget.seed, i);
        if (extract_name(*f.target, *f.target_partition, f.apply(x), win) == key)
            s.words.push_back(extract_name(*f.source, p, x, F));
    }
    if (s.words.size() < static_cast<std::size_t>(f.floor))
        fail(Errc::insufficient_fiber_data,
             "conditioned fiber sample has " + std::to_string(s.words.size()) +
                 " points, floor is " + std::to_string(f.floor));
    s.n_points = s.words.size();
    s.weights.assign(s.words.size(), 1.0 / static_cast<double>(s.words.size()));
    return s;
}

} // namespace

NameSample fiber_sample(const FactorMap& f, const Point& y, const Partition& p, const FolnerSet& F,
                        const SampleBudget& budget) {
    switch (f.fiber_kind) {
    case FiberKind::exact_skew:
        return exact_skew_fiber(f, y, p, F);
    case FiberKind::point: {
        NameSample s;
        s.alphabet = p.size;
        s.window = F;
        s.provenance = Provenance::exact;
        s.words.push_back(extract_name(*f.source, p, y, F));
        s.weights.push_back(1.0);
        return s;
    }
    case FiberKind::full_space:
        return collect_name_sample(f.source, p, F, budget);
    case FiberKind::empirical:
        return empirical_fiber(f, y, p, F, budget);
    }
    fail(Errc::invalid_argument, "unknown fiber kind");
}

FiberBatch collect_fiber_batch(const FactorMap& f, const Partition& p, const FolnerSet& F,
                               const BaseBudget& budget) {
    FiberBatch batch;
    if (f.fiber_kind == FiberKind::full_space) {
        batch.base_points.push_back(f.target->sample(budget.seed, 0));
        batch.base_weights.push_back(1.0);
    } else {
        if (budget.n_fibers == 0) fail(Errc::invalid_argument, "base budget must be positive");
        const double w = 1.0 / static_cast<double>(budget.n_fibers);
        for (std::uint64_t i = 0; i < budget.n_fibers; ++i) {
            batch.base_points.push_back(f.target->sample(budget.seed, i));
            batch.base_weights.push_back(w);
        }
    }
    batch.fiber_samples.reserve(batch.base_points.size());
    for (std::size_t i = 0; i < batch.base_points.size(); ++i) {
        SampleBudget fb = budget.fiber_budget;
        fb.seed = mix_seed(budget.fiber_budget.seed, i + 1);
        batch.fiber_samples.push_back(fiber_sample(f, batch.base_points[i], p, F, fb));
    }
    return batch;
}

std::uint64_t weighted_lower_quantile(std::vector<std::uint64_t> values, std::vector<double> weights,
                                      double mass) {
    if (values.empty() || values.size() != weights.size())
        fail(Errc::invalid_argument, "quantile needs matching nonempty value/weight lists");
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double acc = 0;
    for (std::size_t i : order) {
        acc += weights[i];
        if (acc >= mass - 1e-12) return values[i];
    }
    return values[order.back()];
}

RelativeCoverEstimate relative_cover(const FactorMap& f, const Partition& p, const FolnerSet& F,
                                     double epsilon, const BaseBudget& budget, CoverMode mode) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        fail(Errc::invalid_argument, "relative cover epsilon must lie in (0,1)");
    const FiberBatch batch = collect_fiber_batch(f, p, F, budget);
    if (batch.base_points.empty()) fail(Errc::invalid_argument, "empty base sample");

    RelativeCoverEstimate est;
    est.epsilon = epsilon;
    std::vector<std::uint64_t> lowers, uppers;
    for (const NameSample& s : batch.fiber_samples) {
        const CoverBracket b = covering_number(s, epsilon, mode);
        est.per_fiber.push_back(b);
        lowers.push_back(b.lower);
        uppers.push_back(b.upper);
    }
    est.value_lower = weighted_lower_quantile(lowers, batch.base_weights, 1.0 - epsilon);
    est.value_upper = weighted_lower_quantile(uppers, batch.base_weights, 1.0 - epsilon);
    return est;
}

std::string fiber_csv(const RelativeCoverEstimate& est) {
    std::string out = "fiber,cov_lower,cov_upper\n";
    char buf[96];
    for (std::size_t i = 0; i < est.per_fiber.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%llu,%llu\n", i,
                      static_cast<unsigned long long>(est.per_fiber[i].lower),
                      static_cast<unsigned long long>(est.per_fiber[i].upper));
        out += buf;
    }
    return out;
}

} // namespace slowlab
