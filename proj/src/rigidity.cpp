#include "slowlab/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace slowlab {

namespace {

constexpr int kMaxExactDepth = 20;          // dyadic-cell enumeration cap
constexpr std::size_t kMaxPairWork = 1 << 26;
constexpr int kQuadratureBits = 18;

// Bit positions are 1-based from the binary point: bit 1 is the most
// significant fractional bit.
int cell_bit(std::uint64_t idx, int depth, int j) { return static_cast<int>((idx >> (depth - j)) & 1); }

// One forward baker step permutes interleaved bit positions: output bit j
// reads input bit s(j).
std::uint64_t baker_src_step(std::uint64_t j) {
    if (j & 1) return j + 2;
    if (j == 2) return 1;
    return j - 2;
}
std::uint64_t baker_src_step_inv(std::uint64_t j) {
    if (j == 1) return 2;
    if (j & 1) return j - 2;
    return j + 2;
}

std::uint64_t baker_source(std::uint64_t j, std::int64_t n) {
    if (n >= 0)
        for (std::int64_t i = 0; i < n; ++i) j = baker_src_step(j);
    else
        for (std::int64_t i = 0; i < -n; ++i) j = baker_src_step_inv(j);
    return j;
}

} // namespace

// ---------------------------------------------------------------------------
// DyadicPermutation
// ---------------------------------------------------------------------------

void DyadicPermutation::validate() const {
    if (rank < 1 || rank > kMaxExactDepth) fail(Errc::invalid_argument, "dyadic rank out of range");
    const std::size_t n = std::size_t{1} << rank;
    if (perm.size() != n) fail(Errc::invalid_argument, "dyadic permutation has wrong size");
    std::vector<char> seen(n, 0);
    for (std::uint32_t v : perm) {
        if (v >= n || seen[v]) fail(Errc::invalid_argument, "dyadic permutation is not a bijection");
        seen[v] = 1;
    }
}

DyadicPermutation DyadicPermutation::identity(int rank) {
    DyadicPermutation p;
    p.rank = rank;
    p.perm.resize(std::size_t{1} << rank);
    std::iota(p.perm.begin(), p.perm.end(), 0u);
    return p;
}

DyadicPermutation DyadicPermutation::lifted(int new_rank) const {
    if (new_rank < rank) fail(Errc::invalid_argument, "cannot lift to a smaller rank");
    if (new_rank == rank) return *this;
    DyadicPermutation out;
    out.rank = new_rank;
    const int shift = new_rank - rank;
    out.perm.resize(std::size_t{1} << new_rank);
    for (std::size_t c = 0; c < out.perm.size(); ++c) {
        const std::size_t v = c >> shift;
        const std::size_t low = c & ((std::size_t{1} << shift) - 1);
        out.perm[c] = static_cast<std::uint32_t>((static_cast<std::size_t>(perm[v]) << shift) | low);
    }
    return out;
}

DyadicPermutation DyadicPermutation::inverse() const {
    DyadicPermutation out;
    out.rank = rank;
    out.perm.resize(perm.size());
    for (std::size_t c = 0; c < perm.size(); ++c) out.perm[perm[c]] = static_cast<std::uint32_t>(c);
    return out;
}

bool DyadicPermutation::is_identity() const {
    for (std::size_t c = 0; c < perm.size(); ++c)
        if (perm[c] != c) return false;
    return true;
}

DyadicPermutation compose(const DyadicPermutation& outer, const DyadicPermutation& inner) {
    const int r = std::max(outer.rank, inner.rank);
    const DyadicPermutation a = inner.lifted(r);
    const DyadicPermutation b = outer.lifted(r);
    DyadicPermutation out;
    out.rank = r;
    out.perm.resize(a.perm.size());
    for (std::size_t c = 0; c < a.perm.size(); ++c) out.perm[c] = b.perm[a.perm[c]];
    return out;
}

// ---------------------------------------------------------------------------
// IntervalAutomorphism
// ---------------------------------------------------------------------------

IntervalAutomorphism IntervalAutomorphism::identity() { return IntervalAutomorphism{}; }

IntervalAutomorphism IntervalAutomorphism::dyadic(DyadicPermutation p) {
    p.validate();
    IntervalAutomorphism a;
    if (!p.is_identity()) a.atoms_.push_back(Atom{false, 0, std::move(p)});
    return a;
}

IntervalAutomorphism IntervalAutomorphism::baker(std::int64_t iterates) {
    IntervalAutomorphism a;
    if (iterates != 0) a.atoms_.push_back(Atom{true, iterates, {}});
    return a;
}

IntervalAutomorphism IntervalAutomorphism::after(const IntervalAutomorphism& inner) const {
    IntervalAutomorphism out;
    auto push = [&out](const Atom& atom) {
        auto& v = out.atoms_;
        if (!v.empty() && v.back().is_baker && atom.is_baker) {
            v.back().baker_n += atom.baker_n;
            if (v.back().baker_n == 0) v.pop_back();
            return;
        }
        if (!v.empty() && !v.back().is_baker && !atom.is_baker) {
            DyadicPermutation merged = compose(atom.perm, v.back().perm);
            v.pop_back();
            if (!merged.is_identity()) v.push_back(Atom{false, 0, std::move(merged)});
            return;
        }
        v.push_back(atom);
    };
    for (const Atom& a : inner.atoms_) push(a);
    for (const Atom& a : atoms_) push(a);
    return out;
}

IntervalAutomorphism IntervalAutomorphism::inverse() const {
    IntervalAutomorphism out;
    for (auto it = atoms_.rbegin(); it != atoms_.rend(); ++it) {
        if (it->is_baker)
            out.atoms_.push_back(Atom{true, -it->baker_n, {}});
        else
            out.atoms_.push_back(Atom{false, 0, it->perm.inverse()});
    }
    return out;
}

bool IntervalAutomorphism::is_identity() const { return atoms_.empty(); }

u128 IntervalAutomorphism::apply(u128 t) const {
    for (const Atom& a : atoms_) {
        if (a.is_baker) {
            u128 out = 0;
            for (int j = 1; j <= 128; ++j) {
                const std::uint64_t src = baker_source(static_cast<std::uint64_t>(j), a.baker_n);
                if (src <= 128 && ((t >> (128 - src)) & 1)) out |= static_cast<u128>(1) << (128 - j);
            }
            t = out;
        } else {
            const int m = a.perm.rank;
            const u128 low_mask = (m == 128) ? 0 : ((static_cast<u128>(1) << (128 - m)) - 1);
            const auto v = static_cast<std::size_t>(t >> (128 - m));
            t = (static_cast<u128>(a.perm.perm[v]) << (128 - m)) | (t & low_mask);
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// DyadicSet
// ---------------------------------------------------------------------------

DyadicSet DyadicSet::of_cells(int depth, const std::vector<std::uint64_t>& idx) {
    if (depth < 1 || depth > kMaxExactDepth) fail(Errc::invalid_argument, "dyadic set depth out of range");
    DyadicSet s;
    s.depth = depth;
    s.cells.assign(std::size_t{1} << depth, 0);
    for (std::uint64_t i : idx) {
        if (i >= s.cells.size()) fail(Errc::invalid_argument, "dyadic cell index out of range");
        s.cells[i] = 1;
    }
    return s;
}

DyadicSet DyadicSet::full() {
    DyadicSet s;
    s.depth = 1;
    s.cells = {1, 1};
    return s;
}

double DyadicSet::measure() const {
    std::size_t count = 0;
    for (char c : cells) count += static_cast<std::size_t>(c);
    return static_cast<double>(count) / static_cast<double>(cells.size());
}

DyadicSet DyadicSet::refined(int new_depth) const {
    if (new_depth < depth) fail(Errc::invalid_argument, "cannot coarsen a dyadic set");
    if (new_depth == depth) return *this;
    DyadicSet s;
    s.depth = new_depth;
    s.cells.resize(std::size_t{1} << new_depth);
    const int shift = new_depth - depth;
    for (std::size_t c = 0; c < s.cells.size(); ++c) s.cells[c] = cells[c >> shift];
    return s;
}

// ---------------------------------------------------------------------------
// Exact measure bookkeeping
// ---------------------------------------------------------------------------

namespace {

// Depth of input prefix needed so the first `target` output bits are
// determined (baker steps consume two positions each, dyadic atoms need
// their full rank).
int needed_depth(const std::vector<IntervalAutomorphism::Atom>& atoms, int target) {
    std::int64_t need = target;
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
        if (it->is_baker)
            need += 2 * std::abs(it->baker_n);
        else
            need = std::max<std::int64_t>(need, it->perm.rank);
    }
    return static_cast<int>(std::min<std::int64_t>(need, 1 << 20));
}

// Applies the composition to a known bit prefix; shrinks at baker steps.
void apply_prefix(const std::vector<IntervalAutomorphism::Atom>& atoms, std::vector<int>& bits) {
    for (const auto& a : atoms) {
        if (a.is_baker) {
            const std::int64_t steps = std::abs(a.baker_n);
            const bool fwd = a.baker_n > 0;
            for (std::int64_t s = 0; s < steps; ++s) {
                const std::size_t len = bits.size();
                std::vector<int> nb(len - 2);
                for (std::size_t j = 1; j + 2 <= len; ++j) {
                    const std::uint64_t src = fwd ? baker_src_step(j) : baker_src_step_inv(j);
                    nb[j - 1] = bits[src - 1];
                }
                bits = std::move(nb);
            }
        } else {
            const int m = a.perm.rank;
            std::size_t v = 0;
            for (int j = 0; j < m; ++j) v = (v << 1) | static_cast<std::size_t>(bits[j]);
            const std::size_t pv = a.perm.perm[v];
            for (int j = 0; j < m; ++j) bits[j] = static_cast<int>((pv >> (m - 1 - j)) & 1);
        }
    }
}

std::optional<DyadicSet> pullback_set(const IntervalAutomorphism& phi, const DyadicSet& a) {
    const int d = needed_depth(phi.atoms(), a.depth);
    if (d > kMaxExactDepth) return std::nullopt;
    DyadicSet out;
    out.depth = d;
    out.cells.assign(std::size_t{1} << d, 0);
    std::vector<int> bits(static_cast<std::size_t>(d));
    for (std::size_t c = 0; c < out.cells.size(); ++c) {
        for (int j = 1; j <= d; ++j) bits[j - 1] = cell_bit(c, d, j);
        apply_prefix(phi.atoms(), bits);
        std::size_t img = 0;
        for (int j = 0; j < a.depth; ++j) img = (img << 1) | static_cast<std::size_t>(bits[j]);
        out.cells[c] = a.cells[img];
        bits.resize(static_cast<std::size_t>(d));
    }
    return out;
}

std::optional<std::int64_t> pure_baker(const IntervalAutomorphism& phi) {
    if (phi.atoms().empty()) return 0;
    if (phi.atoms().size() == 1 && phi.atoms().front().is_baker) return phi.atoms().front().baker_n;
    return std::nullopt;
}

using Constraint = std::vector<std::pair<std::uint64_t, int>>; // sorted (position, bit)

// t lies in phi^{-1}A iff its bits match one of the returned constraints.
std::optional<std::vector<Constraint>> side_constraints(const IntervalAutomorphism& phi,
                                                        const DyadicSet& a) {
    std::vector<Constraint> out;
    if (auto n = pure_baker(phi)) {
        std::vector<std::uint64_t> src(static_cast<std::size_t>(a.depth));
        for (int j = 1; j <= a.depth; ++j) src[j - 1] = baker_source(static_cast<std::uint64_t>(j), *n);
        for (std::size_t c = 0; c < a.cells.size(); ++c) {
            if (!a.cells[c]) continue;
            Constraint con;
            for (int j = 1; j <= a.depth; ++j) con.emplace_back(src[j - 1], cell_bit(c, a.depth, j));
            std::sort(con.begin(), con.end());
            out.push_back(std::move(con));
        }
        return out;
    }
    const auto set = pullback_set(phi, a);
    if (!set) return std::nullopt;
    for (std::size_t c = 0; c < set->cells.size(); ++c) {
        if (!set->cells[c]) continue;
        Constraint con;
        for (int j = 1; j <= set->depth; ++j)
            con.emplace_back(static_cast<std::uint64_t>(j), cell_bit(c, set->depth, j));
        out.push_back(std::move(con));
    }
    return out;
}

// Merged constraints pin `distinct` bit positions consistently, so the
// pair contributes 2^{-distinct}; conflicts contribute nothing.
double pair_mass(const Constraint& a, const Constraint& b) {
    std::size_t i = 0, j = 0, distinct = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
            ++distinct;
        } else if (b[j].first < a[i].first) {
            ++j;
            ++distinct;
        } else {
            if (a[i].second != b[j].second) return 0.0;
            ++i;
            ++j;
            ++distinct;
        }
    }
    distinct += (a.size() - i) + (b.size() - j);
    return std::ldexp(1.0, -static_cast<int>(distinct));
}

bool point_in_pullback(const IntervalAutomorphism& phi, const DyadicSet& a, u128 t) {
    const u128 img = phi.apply(t);
    const auto idx = static_cast<std::size_t>(img >> (128 - a.depth));
    return a.cells[idx] != 0;
}

double quadrature_intersection(const IntervalAutomorphism& phi, const DyadicSet& a,
                               const IntervalAutomorphism& psi, const DyadicSet& b) {
    const std::size_t grid = std::size_t{1} << kQuadratureBits;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < grid; ++i) {
        const u128 t = (static_cast<u128>(i) << (128 - kQuadratureBits)) |
                       (static_cast<u128>(1) << (128 - kQuadratureBits - 1));
        if (point_in_pullback(phi, a, t) && point_in_pullback(psi, b, t)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(grid);
}

} // namespace

double measure_intersection(const IntervalAutomorphism& phi, const DyadicSet& a,
                            const IntervalAutomorphism& psi, const DyadicSet& b) {
    const auto ca = side_constraints(phi, a);
    const auto cb = side_constraints(psi, b);
    if (ca && cb && ca->size() * cb->size() <= kMaxPairWork) {
        double mass = 0;
        for (const Constraint& x : *ca)
            for (const Constraint& y : *cb) mass += pair_mass(x, y);
        return mass;
    }
    return quadrature_intersection(phi, a, psi, b);
}

double partition_pullback_distance(const IntervalAutomorphism& phi, const IntervalAutomorphism& psi,
                                   int k) {
    if (k < 1 || k > kMaxExactDepth) fail(Errc::invalid_argument, "partition depth out of range");
    const int dp = needed_depth(phi.atoms(), k);
    const int dq = needed_depth(psi.atoms(), k);
    const int d = std::max(dp, dq);
    if (d <= kMaxExactDepth) {
        // one pass over rank-d input cells comparing the two k-bit labels
        std::size_t mismatches = 0;
        const std::size_t cells = std::size_t{1} << d;
        std::vector<int> bits(static_cast<std::size_t>(d));
        for (std::size_t c = 0; c < cells; ++c) {
            for (int j = 1; j <= d; ++j) bits[j - 1] = cell_bit(c, d, j);
            std::vector<int> pb = bits, qb = bits;
            apply_prefix(phi.atoms(), pb);
            apply_prefix(psi.atoms(), qb);
            bool same = true;
            for (int j = 0; j < k && same; ++j) same = pb[j] == qb[j];
            if (!same) ++mismatches;
        }
        return static_cast<double>(mismatches) / static_cast<double>(cells);
    }
    // agreement mass cell by cell; constraint pairing handles deep baker
    // iterates that cell enumeration cannot reach
    double agree = 0;
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << k); ++i) {
        const DyadicSet cell = DyadicSet::of_cells(k, {i});
        agree += measure_intersection(phi, cell, psi, cell);
    }
    return 1.0 - agree;
}

AutoDistance auto_distance(const IntervalAutomorphism& phi, const IntervalAutomorphism& psi, int K) {
    if (K < 1 || K > kMaxExactDepth) fail(Errc::invalid_argument, "truncation depth out of range");
    AutoDistance d;
    for (int k = 1; k <= K; ++k)
        d.value += std::ldexp(partition_pullback_distance(phi, psi, k), -k);
    d.truncation_error = std::ldexp(1.0, -K);
    return d;
}

// ---------------------------------------------------------------------------
// Cocycles
// ---------------------------------------------------------------------------

const IntervalAutomorphism& AutoCocycle::at(const Point& y) const {
    if (values.empty()) fail(Errc::invalid_argument, "cocycle has no values");
    if (!base_partition) return values[0];
    const std::uint32_t l = (*base_partition)(y);
    if (l >= values.size()) fail(Errc::invalid_argument, "cocycle partition label out of range");
    return values[l];
}

IntervalAutomorphism compose_cocycle(const AutoCocycle& alpha, const Point& y, std::int64_t n) {
    if (n < 0) fail(Errc::invalid_argument, "cocycle composition needs n >= 0");
    if (!alpha.base) fail(Errc::invalid_argument, "cocycle has no base system");
    IntervalAutomorphism c = IntervalAutomorphism::identity();
    Point cur = y;
    for (std::int64_t i = 0; i < n; ++i) {
        c = alpha.at(cur).after(c);
        cur = alpha.base->step(cur, 1);
    }
    return c;
}

std::vector<std::int64_t> rigidity_scan(const AutoCocycle& alpha, const Point& y,
                                        std::int64_t horizon, double delta, int depth,
                                        std::vector<double>* distances) {
    if (horizon < 1) fail(Errc::invalid_argument, "rigidity horizon must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) fail(Errc::invalid_argument, "rigidity tolerance in (0,1)");
    // exact-equality fast path: an all-dyadic cocycle of rank <= depth has
    // distance 0 exactly when the running permutation is the identity, and
    // any other value is at least 2^{-depth}; composing raw tables avoids
    // per-step normalization
    bool all_dyadic = !alpha.values.empty();
    int max_rank = 1;
    for (const auto& v : alpha.values) {
        if (v.is_identity()) continue;
        if (v.atoms().size() != 1 || v.atoms().front().is_baker) {
            all_dyadic = false;
            break;
        }
        max_rank = std::max(max_rank, v.atoms().front().perm.rank);
    }
    if (all_dyadic && max_rank <= depth && delta <= std::ldexp(1.0, -depth) && !distances) {
        std::vector<DyadicPermutation> lifted;
        for (const auto& v : alpha.values)
            lifted.push_back(v.is_identity() ? DyadicPermutation::identity(max_rank)
                                             : v.atoms().front().perm.lifted(max_rank));
        std::vector<std::int64_t> times;
        std::vector<std::uint32_t> c(std::size_t{1} << max_rank), tmp(c.size());
        std::iota(c.begin(), c.end(), 0u);
        Point cur = y;
        for (std::int64_t n = 1; n <= horizon; ++n) {
            const DyadicPermutation* v = &lifted[0];
            if (alpha.base_partition) {
                const std::uint32_t l = (*alpha.base_partition)(cur);
                if (l >= lifted.size()) fail(Errc::invalid_argument, "cocycle label out of range");
                v = &lifted[l];
            }
            for (std::size_t i = 0; i < c.size(); ++i) tmp[i] = v->perm[c[i]];
            c.swap(tmp);
            cur = alpha.base->step(cur, 1);
            bool ident = true;
            for (std::size_t i = 0; i < c.size() && ident; ++i) ident = c[i] == i;
            if (ident) times.push_back(n);
        }
        return times;
    }

    const IntervalAutomorphism id = IntervalAutomorphism::identity();
    std::vector<std::int64_t> times;
    IntervalAutomorphism c = IntervalAutomorphism::identity();
    Point cur = y;
    for (std::int64_t n = 1; n <= horizon; ++n) {
        c = alpha.at(cur).after(c);
        cur = alpha.base->step(cur, 1);
        const double dist = c.is_identity() ? 0.0 : partition_pullback_distance(id, c, depth);
        if (distances) distances->push_back(dist);
        if (dist < delta) times.push_back(n);
    }
    return times;
}

double mixing_statistic(const AutoCocycle& alpha, const Point& y, const DyadicSet& e,
                        std::int64_t n) {
    const double me = e.measure();
    if (me <= 0.0) fail(Errc::invalid_argument, "mixing statistic needs a positive-measure set");
    const IntervalAutomorphism c = compose_cocycle(alpha, y, n);
    const double joint = measure_intersection(IntervalAutomorphism::identity(), e, c, e);
    return std::abs(joint - me * me);
}

// ---------------------------------------------------------------------------
// Dependence score
// ---------------------------------------------------------------------------

double dependence_score(const NameSample& fiber, const std::vector<std::uint32_t>& a_cells,
                        const std::vector<std::uint32_t>& b_cells, std::uint32_t position) {
    std::vector<char> in_a(fiber.alphabet, 0), in_b(fiber.alphabet, 0);
    for (std::uint32_t c : a_cells) {
        if (c >= fiber.alphabet) fail(Errc::invalid_argument, "event cell outside the partition");
        in_a[c] = 1;
    }
    for (std::uint32_t c : b_cells) {
        if (c >= fiber.alphabet) fail(Errc::invalid_argument, "event cell outside the partition");
        in_b[c] = 1;
    }
    double ma = 0, mb = 0, mab = 0;
    for (std::size_t i = 0; i < fiber.words.size(); ++i) {
        if (position >= fiber.words[i].length())
            fail(Errc::invalid_argument, "event position outside the window");
        const std::uint32_t s = fiber.words[i].get(position);
        if (in_a[s]) ma += fiber.weights[i];
        if (in_b[s]) mb += fiber.weights[i];
        if (in_a[s] && in_b[s]) mab += fiber.weights[i];
    }
    return std::abs(mab - ma * mb);
}

double dependence_score_averaged(const FiberBatch& batch, const std::vector<std::uint32_t>& a_cells,
                                 const std::vector<std::uint32_t>& b_cells,
                                 std::uint32_t position) {
    if (batch.fiber_samples.empty()) fail(Errc::invalid_argument, "empty fiber batch");
    double total = 0;
    for (std::size_t i = 0; i < batch.fiber_samples.size(); ++i)
        total += batch.base_weights[i] *
                 dependence_score(batch.fiber_samples[i], a_cells, b_cells, position);
    return total;
}

std::string rigidity_csv(const std::vector<std::int64_t>& times, const std::vector<double>& distances,
                         std::size_t point_index) {
    std::string out = "point,time,distance\n";
    char buf[96];
    for (std::int64_t t : times) {
        const double d =
            (t >= 1 && static_cast<std::size_t>(t) <= distances.size()) ? distances[t - 1] : 0.0;
        std::snprintf(buf, sizeof(buf), "%zu,%lld,%.9g\n", point_index, static_cast<long long>(t), d);
        out += buf;
    }
    return out;
}

} // namespace slowlab
