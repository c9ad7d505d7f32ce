#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "slowlab/relative.hpp"
#include "slowlab/systems.hpp"

namespace slowlab {

// Permutation of the 2^rank dyadic cells of [0,1), each cell mapped by a
// translation. Composition and inversion stay inside the class.
struct DyadicPermutation {
    int rank = 0;
    std::vector<std::uint32_t> perm; // cell -> cell, size 1<<rank

    static DyadicPermutation identity(int rank);
    DyadicPermutation lifted(int new_rank) const;
    DyadicPermutation inverse() const;
    bool is_identity() const;
    void validate() const;
};

// outer applied after inner.
DyadicPermutation compose(const DyadicPermutation& outer, const DyadicPermutation& inner);

// Measure-preserving automorphism of ([0,1), Lebesgue): a composition of
// dyadic permutations and baker-map iterates. The baker map acts on
// [0,1)^2 identified with [0,1) by bit interleaving, where it is a
// two-sided shift of the bit positions. Compositions normalize: adjacent
// dyadic atoms merge at the larger rank, adjacent baker atoms add.
class IntervalAutomorphism {
public:
    struct Atom {
        bool is_baker = false;
        std::int64_t baker_n = 0;
        DyadicPermutation perm;
    };

    static IntervalAutomorphism identity();
    static IntervalAutomorphism dyadic(DyadicPermutation p);
    static IntervalAutomorphism baker(std::int64_t iterates);

    // this after inner: (this*inner)(t) = this(inner(t)).
    IntervalAutomorphism after(const IntervalAutomorphism& inner) const;
    IntervalAutomorphism inverse() const;
    bool is_identity() const;

    // Evaluation on a 128-bit point; baker iterates shift unknown deep
    // bits in as zeros, so accuracy degrades below bit 128 - 2|n|.
    u128 apply(u128 t) const;

    const std::vector<Atom>& atoms() const { return atoms_; }

private:
    std::vector<Atom> atoms_; // applied first to last
};

// Finite union of rank-`depth` dyadic cells.
struct DyadicSet {
    int depth = 1;
    std::vector<char> cells; // size 1<<depth

    static DyadicSet of_cells(int depth, const std::vector<std::uint64_t>& idx);
    static DyadicSet full();
    double measure() const;
    DyadicSet refined(int new_depth) const;
};

// m(phi^{-1}A n psi^{-1}B), exact via dyadic-cell or bit-position
// constraint bookkeeping where possible, quadrature otherwise.
double measure_intersection(const IntervalAutomorphism& phi, const DyadicSet& A,
                            const IntervalAutomorphism& psi, const DyadicSet& B);

// dist_m(phi^{-1}D_k, psi^{-1}D_k): mass of points whose depth-k cell
// labels disagree under the two pullbacks.
double partition_pullback_distance(const IntervalAutomorphism& phi, const IntervalAutomorphism& psi,
                                   int k);

struct AutoDistance {
    double value = 0;
    double truncation_error = 0; // 2^{-K}
};

// Truncation of sum_k 2^{-k} dist_m(phi^{-1}D_k, psi^{-1}D_k) at k = K.
AutoDistance auto_distance(const IntervalAutomorphism& phi, const IntervalAutomorphism& psi, int K);

// Cocycle over a base system into interval automorphisms, constant or
// piecewise constant on a declared base partition.
struct AutoCocycle {
    SystemPtr base;
    std::vector<IntervalAutomorphism> values; // one per base partition label
    std::optional<Partition> base_partition;  // absent => constant (values[0])

    const IntervalAutomorphism& at(const Point& y) const;
};

// alpha_n(y) = alpha(S^{n-1}y) o ... o alpha(Sy) o alpha(y); n = 0 is the
// identity.
IntervalAutomorphism compose_cocycle(const AutoCocycle& alpha, const Point& y, std::int64_t n);

// All 1 <= n <= horizon with dist_m(D_depth, alpha_n(y)^{-1}D_depth) <
// delta; optionally reports the distances for every n.
std::vector<std::int64_t> rigidity_scan(const AutoCocycle& alpha, const Point& y,
                                        std::int64_t horizon, double delta, int depth,
                                        std::vector<double>* distances = nullptr);

// |m(E n alpha_n(y)^{-1}E) - m(E)^2|.
double mixing_statistic(const AutoCocycle& alpha, const Point& y, const DyadicSet& E,
                        std::int64_t n);

// D_y(A,B) = |mu_y(A n B) - mu_y(A) mu_y(B)| where A, B are unions of
// partition cells read off the word symbol at the given window position.
double dependence_score(const NameSample& fiber, const std::vector<std::uint32_t>& a_cells,
                        const std::vector<std::uint32_t>& b_cells, std::uint32_t position = 0);

// Base-weighted average of the per-fiber scores.
double dependence_score_averaged(const FiberBatch& batch, const std::vector<std::uint32_t>& a_cells,
                                 const std::vector<std::uint32_t>& b_cells,
                                 std::uint32_t position = 0);

// Rows "point,time,distance" from a scan with recorded distances.
std::string rigidity_csv(const std::vector<std::int64_t>& times, const std::vector<double>& distances,
                         std::size_t point_index);

} // namespace slowlab
