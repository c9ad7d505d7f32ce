#pragma once

// Independent exhaustive minimum clique-cover oracle used to check the
// production covering solver. Different algorithm on purpose: global
// Bron-Kerbosch maximal clique enumeration plus iterative deepening over
// the cover size, branching on the lowest-index unresolved vertex.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "slowlab/names.hpp"

namespace oracle {

struct Instance {
    std::vector<std::uint32_t> adj; // bitmask incl. self
    std::vector<double> w;
    double eps = 0;
};

inline void all_maximal_cliques(const Instance& ins, std::uint32_t r, std::uint32_t p,
                                std::uint32_t x, std::vector<std::uint32_t>& out) {
    if (p == 0 && x == 0) {
        out.push_back(r);
        return;
    }
    std::uint32_t cand = p;
    while (cand) {
        const auto v = static_cast<std::uint32_t>(std::countr_zero(cand));
        cand &= cand - 1;
        all_maximal_cliques(ins, r | (1u << v), p & ins.adj[v] & ~(1u << v),
                            x & ins.adj[v] & ~(1u << v), out);
        p &= ~(1u << v);
        x |= 1u << v;
    }
}

inline bool coverable(const Instance& ins, const std::vector<std::uint32_t>& cliques,
                      std::uint32_t unresolved, double skip_left, int sets_left) {
    if (unresolved == 0) return true;
    const auto v = static_cast<std::uint32_t>(std::countr_zero(unresolved));
    if (ins.w[v] <= skip_left + 1e-12 &&
        coverable(ins, cliques, unresolved & ~(1u << v), skip_left - ins.w[v], sets_left))
        return true;
    if (sets_left == 0) return false;
    for (std::uint32_t c : cliques)
        if ((c >> v) & 1)
            if (coverable(ins, cliques, unresolved & ~c, skip_left, sets_left - 1)) return true;
    return false;
}

// Smallest number of cliques covering vertices of total weight >= 1-eps.
inline std::uint64_t min_clique_cover(const slowlab::NameSample& s, double eps) {
    // dedupe
    std::vector<slowlab::Word> words;
    std::vector<double> weights;
    for (std::size_t i = 0; i < s.words.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < words.size() && !found; ++j) {
            if (words[j] == s.words[i]) {
                weights[j] += s.weights[i];
                found = true;
            }
        }
        if (!found) {
            words.push_back(s.words[i]);
            weights.push_back(s.weights[i]);
        }
    }
    const auto n = static_cast<std::uint32_t>(words.size());
    Instance ins;
    ins.eps = eps;
    ins.w = weights;
    ins.adj.assign(n, 0);
    const auto sep = static_cast<std::uint64_t>(eps * words.front().length() + 1e-9);
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < n; ++j)
            if (slowlab::mismatch_count(words[i], words[j]) <= sep) ins.adj[i] |= 1u << j;
    std::vector<std::uint32_t> cliques;
    const std::uint32_t all = (n == 32) ? ~0u : ((1u << n) - 1);
    all_maximal_cliques(ins, 0, all, 0, cliques);
    for (int m = 0;; ++m)
        if (coverable(ins, cliques, all, eps, m)) return static_cast<std::uint64_t>(m);
}

} // namespace oracle
