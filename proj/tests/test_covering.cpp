#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracle_cover.hpp"
#include "slowlab/covering.hpp"

using namespace slowlab;

static NameSample uniform_sample(const std::vector<std::vector<std::uint32_t>>& words,
                                 std::uint32_t alphabet) {
    NameSample s;
    s.alphabet = alphabet;
    s.window = make_interval(static_cast<std::int64_t>(words.front().size()));
    const double w = 1.0 / static_cast<double>(words.size());
    for (const auto& v : words) {
        Word word(static_cast<std::uint32_t>(v.size()), alphabet);
        for (std::uint32_t i = 0; i < v.size(); ++i) word.set(i, v[i]);
        s.words.push_back(word);
        s.weights.push_back(w);
    }
    return s;
}

TEST_CASE("four spread words need four sets at small epsilon, one at half") {
    auto s = uniform_sample({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, 2);
    auto tight = covering_number(s, 0.01);
    CHECK(tight.exact);
    CHECK(tight.lower == 4);
    CHECK(tight.upper == 4);
    // eps = 0.5: diameter threshold 1, and 75% mass suffices
    auto loose = covering_number(s, 0.5);
    CHECK(loose.upper <= 2);
    CHECK(loose.lower >= 1);
}

TEST_CASE("bracket is always ordered") {
    for (std::uint64_t inst = 0; inst < 50; ++inst) {
        const std::uint32_t len = 6 + splitmix64(inst) % 10;
        const std::uint32_t count = 10 + splitmix64(inst + 100) % 40;
        std::vector<std::vector<std::uint32_t>> words;
        for (std::uint32_t i = 0; i < count; ++i) {
            std::vector<std::uint32_t> v(len);
            for (std::uint32_t j = 0; j < len; ++j)
                v[j] = splitmix64(inst * 10007 + i * 131 + j) % 2;
            words.push_back(v);
        }
        auto s = uniform_sample(words, 2);
        for (double eps : {0.05, 0.2, 0.4}) {
            auto b = covering_number(s, eps, CoverMode::bracket);
            CHECK(b.lower >= 1);
            CHECK(b.lower <= b.upper);
        }
    }
}

TEST_CASE("exact solver agrees with the exhaustive oracle") {
    std::uint64_t solved = 0;
    for (std::uint64_t inst = 0; inst < 120; ++inst) {
        const std::uint32_t len = 5 + splitmix64(inst * 3 + 1) % 8;
        const std::uint32_t count = 4 + splitmix64(inst * 3 + 2) % 12;
        const std::uint32_t alphabet = 2 + splitmix64(inst * 3 + 3) % 2;
        NameSample s;
        s.alphabet = alphabet;
        s.window = make_interval(len);
        double total = 0;
        for (std::uint32_t i = 0; i < count; ++i) {
            Word w(len, alphabet);
            for (std::uint32_t j = 0; j < len; ++j)
                w.set(j, splitmix64(inst * 100003 + i * 257 + j) % alphabet);
            s.words.push_back(w);
            double wt = 1.0 + static_cast<double>(splitmix64(inst + i) % 5);
            s.weights.push_back(wt);
            total += wt;
        }
        for (auto& wt : s.weights) wt /= total;
        for (double eps : {0.1, 0.3}) {
            auto b = covering_number(s, eps, CoverMode::exact_small);
            REQUIRE(b.exact);
            CHECK(b.lower == b.upper);
            CHECK(b.upper == oracle::min_clique_cover(s, eps));
            // the bracket alone must contain the exact value
            auto br = covering_number(s, eps, CoverMode::bracket);
            CHECK(br.lower <= b.upper);
            CHECK(br.upper >= b.upper);
            ++solved;
        }
    }
    CHECK(solved == 240);
}

TEST_CASE("exact mode errors above the cap, auto falls back") {
    NameSample s;
    s.alphabet = 2;
    s.window = make_interval(10);
    for (std::uint32_t i = 0; i < 30; ++i) {
        Word w(10, 2);
        for (std::uint32_t j = 0; j < 10; ++j) w.set(j, (splitmix64(i * 31 + j) >> 5) % 2);
        s.words.push_back(w);
        s.weights.push_back(1.0 / 30.0);
    }
    CHECK_THROWS_AS(covering_number(s, 0.1, CoverMode::exact_small), Error);
    auto b = covering_number(s, 0.1, CoverMode::auto_mode);
    CHECK(!b.exact);
    CHECK(b.lower <= b.upper);
}

TEST_CASE("covering number is monotone decreasing in epsilon") {
    auto s = uniform_sample({{0, 0, 0, 0},
                             {1, 1, 1, 1},
                             {0, 1, 0, 1},
                             {1, 0, 1, 0},
                             {1, 1, 0, 0},
                             {0, 0, 1, 1}},
                            2);
    std::uint64_t prev = ~0ULL;
    for (double eps : {0.05, 0.25, 0.5, 0.75}) {
        auto b = covering_number(s, eps, CoverMode::exact_small);
        CHECK(b.upper <= prev);
        prev = b.upper;
    }
}

TEST_CASE("ball count bound dominates the exhaustive ball size") {
    // n = 4, r = 2, eps = 0.25: ball of radius 1 has 1 + 4 = 5 words
    CHECK(ball_count_bound(4, 2, 0.25) >= 5.0);
    // eps = 0: only the center
    CHECK(ball_count_bound(4, 2, 0.0) == doctest::Approx(1.0));
    // eps = 1 with r = 2: bound is 2^(n H(1)) = 1? no: H(1) = 0 but log(r-1) term
    // vanishes too, convention gives exp(0) = 1 times nothing; just check finite
    CHECK(std::isfinite(ball_count_bound(8, 3, 1.0)));
    // exhaustive check across radii for n = 6, r = 3
    for (int k = 0; k <= 6; ++k) {
        double eps = static_cast<double>(k) / 6.0;
        double count = 0;
        for (int i = 0; i <= k; ++i) {
            double binom = 1;
            for (int j = 0; j < i; ++j) binom = binom * (6 - j) / (j + 1);
            count += binom * std::pow(2.0, i);
        }
        if (k <= 3) // the entropy bound is valid up to eps <= 1 - 1/r
            CHECK(ball_count_bound(6, 3, eps) * (1 + 1e-12) >= count);
    }
}
