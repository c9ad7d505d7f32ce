#pragma once

#include <cstdint>

#include "slowlab/names.hpp"

namespace slowlab {

// Bracket around cov(lambda, P, F, eps): the smallest number of sets of
// Hamming diameter <= eps whose union has mass >= 1 - eps. lower comes
// from a separated family, upper from a greedy ball cover; exact is set
// when branch and bound pinned the true value (then lower == upper).
struct CoverBracket {
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    bool exact = false;
};

enum class CoverMode {
    bracket,     // greedy bounds only
    exact_small, // branch and bound, errors above the distinct-word cap
    auto_mode,   // exact when small enough, bracket otherwise
};

inline constexpr std::size_t kExactCoverCap = 24;

CoverBracket covering_number(const NameSample& sample, double epsilon,
                             CoverMode mode = CoverMode::auto_mode);

// exp(n * (eps * log(r-1) + H(eps, 1-eps))); an upper bound on the number
// of words in a Hamming ball of radius eps. H(0) = H(1) = 0.
double ball_count_bound(std::uint64_t n, std::uint32_t alphabet, double eps);

} // namespace slowlab
