#include "slowlab/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

namespace slowlab {

namespace {

constexpr double kMassTol = 1e-12;

struct Dedup {
    std::vector<Word> words;   // distinct, weight-descending
    std::vector<double> weights;
    std::uint32_t len = 0;
};

Dedup dedupe(const NameSample& s) {
    std::vector<std::size_t> order(s.words.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s.words[a] < s.words[b]; });
    Dedup d;
    d.len = s.words.empty() ? 0 : s.words.front().length();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        if (!d.words.empty() && d.words.back() == s.words[i]) {
            d.weights.back() += s.weights[i];
        } else {
            d.words.push_back(s.words[i]);
            d.weights.push_back(s.weights[i]);
        }
    }
    std::vector<std::size_t> by_weight(d.words.size());
    std::iota(by_weight.begin(), by_weight.end(), std::size_t{0});
    std::stable_sort(by_weight.begin(), by_weight.end(),
                     [&](std::size_t a, std::size_t b) { return d.weights[a] > d.weights[b]; });
    Dedup out;
    out.len = d.len;
    out.words.reserve(d.words.size());
    out.weights.reserve(d.words.size());
    for (std::size_t i : by_weight) {
        out.words.push_back(std::move(d.words[i]));
        out.weights.push_back(d.weights[i]);
    }
    return out;
}

// d(a,b) <= eps iff mismatches <= floor(eps * len) (up to fp slack).
std::uint64_t mismatch_threshold(std::uint32_t len, double eps) {
    return static_cast<std::uint64_t>(std::floor(eps * len + 1e-9));
}

std::uint64_t greedy_upper(const Dedup& d, double eps) {
    const std::uint64_t ball = mismatch_threshold(d.len, eps / 2.0);
    const double target = 1.0 - eps - kMassTol;
    const std::size_t n = d.words.size();
    if (ball == 0) {
        // radius-eps/2 balls are singletons; weight-descending prefix
        double mass = 0;
        std::uint64_t count = 0;
        for (std::size_t i = 0; i < n && mass < target; ++i) {
            mass += d.weights[i];
            ++count;
        }
        return count;
    }
    std::vector<char> covered(n, 0);
    double mass = 0;
    std::uint64_t count = 0;
    for (std::size_t c = 0; c < n && mass < target; ++c) {
        if (covered[c]) continue; // words are weight-descending, so c is the heaviest uncovered
        ++count;
        for (std::size_t j = c; j < n; ++j) {
            if (!covered[j] && mismatch_count(d.words[c], d.words[j]) <= ball) {
                covered[j] = 1;
                mass += d.weights[j];
            }
        }
    }
    return count;
}

std::uint64_t separated_lower(const Dedup& d, double eps) {
    const std::uint64_t sep = mismatch_threshold(d.len, eps);
    const std::size_t n = d.words.size();
    std::vector<double> family_weights;
    if (sep == 0) {
        // distance > eps already at one mismatch: every distinct word qualifies
        family_weights = d.weights;
    } else {
        std::vector<std::size_t> family;
        for (std::size_t i = 0; i < n; ++i) {
            bool apart = true;
            for (std::size_t j : family) {
                if (mismatch_count(d.words[i], d.words[j]) <= sep) {
                    apart = false;
                    break;
                }
            }
            if (apart) {
                family.push_back(i);
                family_weights.push_back(d.weights[i]);
            }
        }
    }
    // a diameter <= eps set holds at most one family member; the cover may
    // only miss members of total weight <= eps
    std::sort(family_weights.begin(), family_weights.end());
    double dropped = 0;
    std::size_t removed = 0;
    for (double w : family_weights) {
        if (dropped + w > eps + kMassTol) break;
        dropped += w;
        ++removed;
    }
    const std::uint64_t kept = family_weights.size() - removed;
    return std::max<std::uint64_t>(kept, 1);
}

// a diameter <= eps set lies inside the radius-eps ball around any of its
// members, so no cover set weighs more than the heaviest such ball and at
// least (1-eps)/max_ball_mass sets are needed
std::uint64_t volume_lower(const Dedup& d, double eps) {
    const std::uint64_t sep = mismatch_threshold(d.len, eps);
    const std::size_t n = d.words.size();
    // quadratic in the word count; bow out on huge samples (the bound is
    // an optional strengthening, the separated family still stands)
    const std::size_t limbs = d.words.empty() ? 1 : d.words.front().limbs().size();
    if (n * n > (std::size_t{1} << 28) / std::max<std::size_t>(limbs, 1)) return 1;
    double max_ball = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double mass = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (mismatch_count(d.words[i], d.words[j]) <= sep) mass += d.weights[j];
        max_ball = std::max(max_ball, mass);
        if (max_ball >= 1.0 - eps) break;
    }
    if (max_ball <= 0) return 1;
    return static_cast<std::uint64_t>(std::ceil((1.0 - eps) / max_ball - 1e-9));
}

// Exact minimum over covers by diameter <= eps sets (cliques of the
// <=eps graph) of total mass >= 1 - eps. Branch on the heaviest vertex
// that is neither covered nor skipped: skip it (if the skipped mass
// stays <= eps) or cover it with a maximal clique through it.
struct ExactSolver {
    std::uint32_t n = 0;
    std::vector<std::uint32_t> adj; // bitmask incl. self, weight-descending order
    std::vector<double> w;
    double eps = 0;
    std::uint64_t best = 0;

    void maximal_cliques_through(std::uint32_t v, std::uint32_t allowed,
                                 std::vector<std::uint32_t>& out) const {
        // grow greedily over all orderings via recursion on candidates
        struct Frame {
            std::uint32_t clique, cand;
        };
        std::vector<Frame> stack{{std::uint32_t{1} << v, static_cast<std::uint32_t>(adj[v] & allowed & ~(std::uint32_t{1} << v))}};
        while (!stack.empty()) {
            Frame f = stack.back();
            stack.pop_back();
            if (f.cand == 0) {
                out.push_back(f.clique);
                continue;
            }
            const std::uint32_t u = static_cast<std::uint32_t>(std::countr_zero(f.cand));
            // branch: exclude u only if some candidate is not adjacent to u
            // (otherwise every maximal extension contains u)
            const std::uint32_t with_u = f.cand & adj[u] & ~(std::uint32_t{1} << u);
            stack.push_back({f.clique | (std::uint32_t{1} << u), with_u});
            const std::uint32_t without_u = f.cand & ~(std::uint32_t{1} << u);
            if (without_u & ~adj[u]) stack.push_back({f.clique, without_u});
        }
    }

    void search(std::uint32_t covered, std::uint32_t skipped, double skipped_mass,
                std::uint64_t count) {
        if (count >= best) return;
        const std::uint32_t todo = ~(covered | skipped) & ((n == 32) ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1));
        if (todo == 0) {
            best = count;
            return;
        }
        const auto v = static_cast<std::uint32_t>(std::countr_zero(todo)); // heaviest remaining
        if (skipped_mass + w[v] <= eps + kMassTol)
            search(covered, skipped | (std::uint32_t{1} << v), skipped_mass + w[v], count);
        std::vector<std::uint32_t> cliques;
        maximal_cliques_through(v, ~covered, cliques);
        std::sort(cliques.begin(), cliques.end(), [](std::uint32_t a, std::uint32_t b) {
            return std::popcount(a) > std::popcount(b);
        });
        cliques.erase(std::unique(cliques.begin(), cliques.end()), cliques.end());
        for (std::uint32_t c : cliques) search(covered | c, skipped & ~c, remaining_skip(skipped & ~c), count + 1);
    }

    double remaining_skip(std::uint32_t skipped) const {
        double m = 0;
        while (skipped) {
            const auto v = static_cast<std::uint32_t>(std::countr_zero(skipped));
            skipped &= skipped - 1;
            m += w[v];
        }
        return m;
    }

    std::uint64_t solve(const Dedup& d, double epsilon, std::uint64_t upper) {
        n = static_cast<std::uint32_t>(d.words.size());
        eps = epsilon;
        w = d.weights;
        const std::uint64_t sep = mismatch_threshold(d.len, epsilon);
        adj.assign(n, 0);
        for (std::uint32_t i = 0; i < n; ++i)
            for (std::uint32_t j = 0; j < n; ++j)
                if (mismatch_count(d.words[i], d.words[j]) <= sep) adj[i] |= std::uint32_t{1} << j;
        best = upper;
        search(0, 0, 0.0, 0);
        return best;
    }
};

} // namespace

CoverBracket covering_number(const NameSample& sample, double epsilon, CoverMode mode) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        fail(Errc::invalid_argument, "covering epsilon must lie in (0,1)");
    if (sample.words.empty()) fail(Errc::invalid_argument, "covering needs a nonempty name sample");
    sample.validate();
    const Dedup d = dedupe(sample);

    CoverBracket out;
    out.upper = greedy_upper(d, epsilon);
    out.lower = std::min(std::max(separated_lower(d, epsilon), volume_lower(d, epsilon)), out.upper);

    const bool want_exact = mode == CoverMode::exact_small ||
                            (mode == CoverMode::auto_mode && d.words.size() <= kExactCoverCap);
    if (mode == CoverMode::exact_small && d.words.size() > kExactCoverCap)
        fail(Errc::unsupported_operation, "exact cover mode capped at 24 distinct words");
    if (want_exact && out.lower != out.upper) {
        ExactSolver solver;
        out.upper = solver.solve(d, epsilon, out.upper);
        out.lower = out.upper;
        out.exact = true;
    } else if (want_exact) {
        out.exact = true;
    }
    return out;
}

double ball_count_bound(std::uint64_t n, std::uint32_t alphabet, double eps) {
    if (alphabet < 1) fail(Errc::invalid_argument, "alphabet must be positive");
    if (!(eps >= 0.0 && eps <= 1.0)) fail(Errc::invalid_argument, "ball bound epsilon in [0,1]");
    auto h = [](double t) { return (t <= 0.0 || t >= 1.0) ? 0.0 : -t * std::log(t) - (1 - t) * std::log(1 - t); };
    const double radius_term = (alphabet >= 2) ? eps * std::log(static_cast<double>(alphabet - 1)) : 0.0;
    return std::exp(static_cast<double>(n) * (radius_term + h(eps)));
}

} // namespace slowlab
