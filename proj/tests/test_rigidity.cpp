#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "slowlab/rigidity.hpp"

using namespace slowlab;

static DyadicPermutation swap_halves() {
    DyadicPermutation p;
    p.rank = 1;
    p.perm = {1, 0};
    return p;
}

static DyadicPermutation rotate_quarters(std::uint32_t by) {
    DyadicPermutation p;
    p.rank = 2;
    p.perm = {(0 + by) % 4, (1 + by) % 4, (2 + by) % 4, (3 + by) % 4};
    return p;
}

TEST_CASE("dyadic permutation algebra") {
    auto id = DyadicPermutation::identity(2);
    CHECK(id.is_identity());
    auto r = rotate_quarters(1);
    CHECK(!r.is_identity());
    CHECK(compose(r, r.inverse()).is_identity());
    CHECK(compose(r.inverse(), r).is_identity());
    // lifting preserves the map
    auto lifted = r.lifted(4);
    CHECK(lifted.rank == 4);
    CHECK(compose(lifted, r.lifted(4).inverse()).is_identity());
    // composition at mixed ranks goes through the common refinement
    DyadicPermutation s; // swap the first two quarter cells only
    s.rank = 2;
    s.perm = {1, 0, 2, 3};
    auto rs = compose(r, s);
    auto sr = compose(s, r);
    CHECK(!compose(rs, sr.inverse()).is_identity()); // r and s do not commute
    CHECK(compose(compose(r, swap_halves()), compose(swap_halves(), r).inverse())
              .is_identity()); // dyadic rotations commute

    DyadicPermutation bad;
    bad.rank = 1;
    bad.perm = {0, 0};
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("automorphism evaluation matches the atom semantics") {
    auto phi = IntervalAutomorphism::dyadic(swap_halves());
    // swap halves: t -> t + 1/2 mod 1
    u128 q = u128{1} << 126; // 0.25
    CHECK(phi.apply(q) == (u128{3} << 126));
    auto psi = phi.after(phi);
    CHECK(psi.is_identity());

    auto b = IntervalAutomorphism::baker(1);
    auto binv = b.inverse();
    CHECK(b.after(binv).is_identity());
    CHECK(IntervalAutomorphism::baker(2).after(IntervalAutomorphism::baker(-2)).is_identity());
}

TEST_CASE("baker map preserves measure on dyadic sets") {
    auto b = IntervalAutomorphism::baker(1);
    for (int depth : {1, 2, 3}) {
        for (std::uint64_t c = 0; c < (std::uint64_t{1} << depth); ++c) {
            auto cell = DyadicSet::of_cells(depth, {c});
            double m = measure_intersection(b, cell, IntervalAutomorphism::identity(),
                                            DyadicSet::full());
            CHECK(m == doctest::Approx(cell.measure()));
        }
    }
}

TEST_CASE("auto distance basics") {
    auto id = IntervalAutomorphism::identity();
    auto phi = IntervalAutomorphism::dyadic(swap_halves());
    auto d0 = auto_distance(id, id, 8);
    CHECK(d0.value == doctest::Approx(0.0));
    CHECK(d0.truncation_error == doctest::Approx(std::pow(2.0, -8)));
    // swapping halves relabels every depth-k cell, all k: sum 2^-k * 1
    auto d1 = auto_distance(id, phi, 8);
    CHECK(d1.value == doctest::Approx(1.0 - std::pow(2.0, -8)));
    // symmetry and triangle inequality on dyadic triples
    auto a = IntervalAutomorphism::dyadic(rotate_quarters(1));
    auto c = IntervalAutomorphism::dyadic(rotate_quarters(3));
    auto dab = auto_distance(a, phi, 6).value;
    auto dba = auto_distance(phi, a, 6).value;
    CHECK(dab == doctest::Approx(dba));
    auto dac = auto_distance(a, c, 6).value;
    auto dcb = auto_distance(c, phi, 6).value;
    CHECK(dac <= dab + auto_distance(phi, c, 6).value + 1e-12);
    CHECK(dab <= dac + dcb + 1e-12);
}

TEST_CASE("cocycle composition and the cocycle identity") {
    auto base = System::golden_rotation();
    AutoCocycle alpha;
    alpha.base = base;
    alpha.values = {IntervalAutomorphism::dyadic(rotate_quarters(1)),
                    IntervalAutomorphism::dyadic(swap_halves())};
    alpha.base_partition = interval_partition({u128{0}, ld_to_frac(0.5L)});
    Point y = base->sample(4, 0);

    CHECK(compose_cocycle(alpha, y, 0).is_identity());
    // n = 1 is just alpha(y)
    auto a1 = compose_cocycle(alpha, y, 1);
    CHECK(auto_distance(a1, alpha.at(y), 8).value == doctest::Approx(0.0));
    // alpha_{a+b}(y) = alpha_b(S^a y) o alpha_a(y)
    for (std::int64_t a = 1; a <= 3; ++a)
        for (std::int64_t b = 1; b <= 3; ++b) {
            auto lhs = compose_cocycle(alpha, y, a + b);
            auto rhs = compose_cocycle(alpha, base->step(y, a), b).after(compose_cocycle(alpha, y, a));
            CHECK(partition_pullback_distance(lhs, rhs, 6) == doctest::Approx(0.0));
        }
}

TEST_CASE("rigidity scan of a constant finite-order permutation") {
    auto base = System::golden_rotation();
    AutoCocycle alpha;
    alpha.base = base;
    alpha.values = {IntervalAutomorphism::dyadic(rotate_quarters(1))}; // order 4
    Point y = base->sample(1, 0);
    auto times = rigidity_scan(alpha, y, 20, 1e-9, 3);
    CHECK(times == std::vector<std::int64_t>{4, 8, 12, 16, 20});
    // identity cocycle: every time is rigid
    AutoCocycle triv;
    triv.base = base;
    triv.values = {IntervalAutomorphism::identity()};
    std::vector<double> dists;
    auto all = rigidity_scan(triv, y, 5, 1e-9, 3, &dists);
    CHECK(all.size() == 5);
    REQUIRE(dists.size() == 5);
    for (double d : dists) CHECK(d == doctest::Approx(0.0));
}

TEST_CASE("baker cocycle is far from the identity") {
    auto base = System::golden_rotation();
    AutoCocycle alpha;
    alpha.base = base;
    alpha.values = {IntervalAutomorphism::baker(1)};
    Point y = base->sample(2, 0);
    std::vector<double> dists;
    auto times = rigidity_scan(alpha, y, 24, 0.1, 3, &dists);
    CHECK(times.empty());
    for (double d : dists) CHECK(d > 0.1);
}

TEST_CASE("mixing statistic") {
    auto base = System::golden_rotation();
    Point y = base->sample(6, 0);
    auto E = DyadicSet::of_cells(1, {0}); // [0, 1/2)
    // n = 0: identity, statistic is m(E) - m(E)^2
    AutoCocycle triv;
    triv.base = base;
    triv.values = {IntervalAutomorphism::identity()};
    CHECK(mixing_statistic(triv, y, E, 0) == doctest::Approx(0.25));
    // full space: always zero
    CHECK(mixing_statistic(triv, y, DyadicSet::full(), 7) == doctest::Approx(0.0));
    // baker iterates decorrelate [0,1/2) immediately
    AutoCocycle bak;
    bak.base = base;
    bak.values = {IntervalAutomorphism::baker(1)};
    for (std::int64_t n : {1, 5, 20})
        CHECK(mixing_statistic(bak, y, E, n) < 0.05);
    // the identity cocycle never decorrelates
    CHECK(mixing_statistic(triv, y, E, 20) == doctest::Approx(0.25));
}

TEST_CASE("rigid and mixing verdicts are mutually exclusive here") {
    auto base = System::golden_rotation();
    Point y = base->sample(12, 0);
    auto E = DyadicSet::of_cells(1, {0});
    AutoCocycle perm;
    perm.base = base;
    perm.values = {IntervalAutomorphism::dyadic(rotate_quarters(1))};
    auto rigid_times = rigidity_scan(perm, y, 16, 1e-9, 3);
    CHECK(!rigid_times.empty());
    for (std::int64_t n : rigid_times)
        CHECK(mixing_statistic(perm, y, E, n) == doctest::Approx(0.25));
}

TEST_CASE("dependence score") {
    NameSample s;
    s.alphabet = 4;
    s.window = make_interval(1);
    // two symbols, independent-looking weights
    for (std::uint32_t v = 0; v < 4; ++v) {
        Word w(1, 4);
        w.set(0, v);
        s.words.push_back(w);
        s.weights.push_back(0.25);
    }
    // A = {0,1} reads the high bit, B = {0,2} the low bit: product measure
    CHECK(dependence_score(s, {0, 1}, {0, 2}) == doctest::Approx(0.0));
    // A = B = {0}: |1/4 - 1/16| = 3/16
    CHECK(dependence_score(s, {0}, {0}) == doctest::Approx(3.0 / 16.0));
    // disjoint events: |0 - 1/4 * 1/4|
    CHECK(dependence_score(s, {0, 1}, {2, 3}) == doctest::Approx(0.25));
}

TEST_CASE("rigidity csv shape") {
    // distances are indexed by time over the full horizon
    auto csv = rigidity_csv({3, 6}, {0.9, 0.9, 0.0, 0.9, 0.9, 0.5}, 2);
    CHECK(csv.rfind("point,time,distance\n", 0) == 0);
    CHECK(csv.find("2,3,0") != std::string::npos);
    CHECK(csv.find("2,6,0.5") != std::string::npos);
}
