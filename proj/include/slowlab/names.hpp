#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "slowlab/folner.hpp"
#include "slowlab/systems.hpp"

namespace slowlab {

// A (P,F)-name, stored packed: 4 bits per symbol for alphabets up to 16,
// one byte per symbol otherwise. The covering module is quadratic in the
// number of words and spends its time in mismatch counting, so the kernel
// is XOR + popcount over the packed limbs.
class Word {
public:
    Word() = default;
    Word(std::uint32_t length, std::uint32_t alphabet);

    void set(std::uint32_t i, std::uint32_t symbol);
    std::uint32_t get(std::uint32_t i) const;
    std::uint32_t length() const { return length_; }
    std::uint32_t alphabet() const { return alphabet_; }
    bool nibble_packed() const { return alphabet_ <= 16; }
    const std::vector<std::uint64_t>& limbs() const { return limbs_; }

    std::string to_string() const;

    friend bool operator==(const Word& a, const Word& b) {
        return a.length_ == b.length_ && a.limbs_ == b.limbs_;
    }
    friend bool operator<(const Word& a, const Word& b) { return a.limbs_ < b.limbs_; }

private:
    std::uint32_t length_ = 0;
    std::uint32_t alphabet_ = 2;
    std::vector<std::uint64_t> limbs_;
};

// Number of positions where the words differ.
std::uint64_t mismatch_count(const Word& a, const Word& b);
// Normalized Hamming distance in [0,1]; lengths must agree.
double hamming_distance(const Word& a, const Word& b);

enum class Provenance { exact, monte_carlo };

// A weighted multiset of names standing in for a measure on words.
struct NameSample {
    std::vector<Word> words;
    std::vector<double> weights;
    std::uint32_t alphabet = 2;
    FolnerSet window;
    Provenance provenance = Provenance::monte_carlo;
    std::uint64_t seed = 0;
    std::uint64_t n_points = 0;

    void validate() const;
};

// Reads the P-label along the orbit of x over F (sorted order).
Word extract_name(const System& sys, const Partition& p, const Point& x, const FolnerSet& f);

struct SampleBudget {
    bool exact = false;
    std::uint64_t n_points = 1024; // monte carlo draws
    std::uint64_t seed = 1;
};

// Exact mode enumerates cylinder masses (bernoulli products; rotation
// names via orbit-arc enumeration; fiber-measurable skew names over a
// constant cocycle). Monte Carlo assigns weight 1/N to sampled names.
NameSample collect_name_sample(const SystemPtr& sys, const Partition& p, const FolnerSet& f,
                               const SampleBudget& budget);

// Weighted mass of {x : P(x) != Q(x)} over an explicit point sample.
double partition_distance(const std::vector<Point>& points, const std::vector<double>& weights,
                          const Partition& p, const Partition& q);

// CSV rows "word,weight" for external inspection.
std::string name_sample_csv(const NameSample& s);

} // namespace slowlab
