#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "slowlab/names.hpp"

using namespace slowlab;

TEST_CASE("word packing roundtrips") {
    for (std::uint32_t alphabet : {2u, 5u, 16u, 17u, 200u}) {
        Word w(33, alphabet);
        for (std::uint32_t i = 0; i < 33; ++i) w.set(i, (i * 7 + 3) % alphabet);
        for (std::uint32_t i = 0; i < 33; ++i) CHECK(w.get(i) == (i * 7 + 3) % alphabet);
        CHECK(w.nibble_packed() == (alphabet <= 16));
    }
}

static std::uint64_t naive_mismatch(const Word& a, const Word& b) {
    std::uint64_t c = 0;
    for (std::uint32_t i = 0; i < a.length(); ++i)
        if (a.get(i) != b.get(i)) ++c;
    return c;
}

TEST_CASE("mismatch kernel matches a naive count") {
    for (std::uint32_t alphabet : {2u, 3u, 16u, 40u}) {
        for (std::uint32_t len : {1u, 15u, 16u, 17u, 64u, 100u}) {
            Word a(len, alphabet), b(len, alphabet);
            for (std::uint32_t i = 0; i < len; ++i) {
                a.set(i, splitmix64(i) % alphabet);
                b.set(i, splitmix64(i + 1000) % alphabet);
            }
            CHECK(mismatch_count(a, b) == naive_mismatch(a, b));
            CHECK(mismatch_count(a, a) == 0);
            CHECK(hamming_distance(a, b) ==
                  doctest::Approx(static_cast<double>(naive_mismatch(a, b)) / len));
        }
    }
}

TEST_CASE("extract_name reads symbols along the orbit") {
    auto sys = System::bernoulli({0.3, 0.3, 0.4});
    auto p = symbol_partition(sys);
    FolnerSet f({0, 2, 3, 7});
    Point x = sys->sample(5, 0);
    Word w = extract_name(*sys, p, x, f);
    REQUIRE(w.length() == 4);
    std::size_t i = 0;
    for (std::int64_t g : f.elements()) CHECK(w.get(i++) == p(sys->step(x, g)));
}

TEST_CASE("exact bernoulli sample enumerates cylinder weights") {
    auto sys = System::bernoulli({0.7, 0.3});
    auto p = symbol_partition(sys);
    SampleBudget b;
    b.exact = true;
    auto s = collect_name_sample(sys, p, make_interval(3), b);
    s.validate();
    CHECK(s.provenance == Provenance::exact);
    REQUIRE(s.words.size() == 8);
    double total = 0;
    for (std::size_t i = 0; i < 8; ++i) {
        double expect = 1;
        for (std::uint32_t j = 0; j < 3; ++j) expect *= s.words[i].get(j) == 0 ? 0.7 : 0.3;
        CHECK(s.weights[i] == doctest::Approx(expect));
        total += s.weights[i];
    }
    CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("exact rotation arcs cover the circle and agree with monte carlo") {
    auto sys = System::golden_rotation();
    auto p = interval_partition({u128{0}, ld_to_frac(0.5L)});
    FolnerSet f = make_interval(6);
    SampleBudget exact;
    exact.exact = true;
    auto es = collect_name_sample(sys, p, f, exact);
    es.validate();
    CHECK(es.provenance == Provenance::exact);
    double total = 0;
    std::map<std::vector<std::uint32_t>, double> exact_mass;
    for (std::size_t i = 0; i < es.words.size(); ++i) {
        total += es.weights[i];
        std::vector<std::uint32_t> key(6);
        for (std::uint32_t j = 0; j < 6; ++j) key[j] = es.words[i].get(j);
        exact_mass[key] += es.weights[i];
    }
    CHECK(total == doctest::Approx(1.0));

    SampleBudget mc;
    mc.n_points = 20000;
    mc.seed = 77;
    auto ms = collect_name_sample(sys, p, f, mc);
    std::map<std::vector<std::uint32_t>, double> mc_mass;
    for (std::size_t i = 0; i < ms.words.size(); ++i) {
        std::vector<std::uint32_t> key(6);
        for (std::uint32_t j = 0; j < 6; ++j) key[j] = ms.words[i].get(j);
        mc_mass[key] += ms.weights[i];
    }
    for (const auto& [key, mass] : mc_mass) {
        REQUIRE(exact_mass.count(key) == 1); // every sampled word is an exact arc word
        double sigma = std::sqrt(exact_mass[key] * (1 - exact_mass[key]) / 20000.0);
        CHECK(std::abs(mass - exact_mass[key]) < 4 * sigma + 1e-6);
    }
}

TEST_CASE("exact skew fiber sample is uniform over the group") {
    auto base = System::golden_rotation();
    GroupCocycle c;
    c.increments = {1};
    auto sys = System::skew(base, 5, c);
    auto p = fiber_partition(5, 0);
    SampleBudget b;
    b.exact = true;
    auto s = collect_name_sample(sys, p, make_interval(4), b);
    REQUIRE(s.words.size() == 5);
    for (double w : s.weights) CHECK(w == doctest::Approx(0.2));
    // names are deterministic marches through Z/5
    for (const auto& w : s.words)
        for (std::uint32_t j = 1; j < 4; ++j) CHECK(w.get(j) == (w.get(j - 1) + 1) % 5);
}

TEST_CASE("constant partition collapses to one word") {
    auto sys = System::bernoulli({0.5, 0.5});
    SampleBudget b;
    b.exact = true;
    auto s = collect_name_sample(sys, constant_partition(), make_interval(10), b);
    REQUIRE(s.words.size() == 1);
    CHECK(s.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("exact mode rejects what it cannot enumerate") {
    auto sys = System::bernoulli({0.5, 0.5});
    auto p = symbol_partition(sys);
    SampleBudget b;
    b.exact = true;
    CHECK_THROWS_AS(collect_name_sample(sys, p, make_interval(25), b), Error); // r^|F| cap
    auto odo = System::odometer(2);
    CHECK_THROWS_AS(collect_name_sample(odo, dyadic_partition(1), make_interval(4), b), Error);
}

TEST_CASE("partition distance") {
    auto sys = System::bernoulli({0.5, 0.5});
    auto p = symbol_partition(sys);
    std::vector<Point> pts;
    std::vector<double> w;
    for (int i = 0; i < 100; ++i) {
        pts.push_back(sys->sample(3, static_cast<std::uint64_t>(i)));
        w.push_back(0.01);
    }
    CHECK(partition_distance(pts, w, p, p) == doctest::Approx(0.0));
    // against the flipped partition every point disagrees
    Partition q = p;
    auto inner = p.label;
    q.label = [inner](const Point& x) { return 1u - inner(x); };
    CHECK(partition_distance(pts, w, p, q) == doctest::Approx(1.0));
}

TEST_CASE("csv shape") {
    NameSample s;
    s.alphabet = 2;
    Word w(2, 2);
    w.set(0, 1);
    s.words = {w};
    s.weights = {1.0};
    auto csv = name_sample_csv(s);
    CHECK(csv.substr(0, 12) == "word,weight\n");
    CHECK(csv.find("10,") != std::string::npos);
}
