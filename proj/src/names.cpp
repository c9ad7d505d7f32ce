#include "slowlab/names.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace slowlab {

Word::Word(std::uint32_t length, std::uint32_t alphabet) : length_(length), alphabet_(alphabet) {
    if (alphabet < 1 || alphabet > 256) fail(Errc::invalid_argument, "word alphabet out of range");
    const std::size_t per_limb = nibble_packed() ? 16 : 8;
    limbs_.assign((length + per_limb - 1) / per_limb, 0);
}

void Word::set(std::uint32_t i, std::uint32_t symbol) {
    if (nibble_packed()) {
        const std::size_t limb = i / 16, slot = (i % 16) * 4;
        limbs_[limb] &= ~(std::uint64_t{0xf} << slot);
        limbs_[limb] |= static_cast<std::uint64_t>(symbol & 0xf) << slot;
    } else {
        const std::size_t limb = i / 8, slot = (i % 8) * 8;
        limbs_[limb] &= ~(std::uint64_t{0xff} << slot);
        limbs_[limb] |= static_cast<std::uint64_t>(symbol & 0xff) << slot;
    }
}

std::uint32_t Word::get(std::uint32_t i) const {
    if (nibble_packed()) return (limbs_[i / 16] >> ((i % 16) * 4)) & 0xf;
    return (limbs_[i / 8] >> ((i % 8) * 8)) & 0xff;
}

std::string Word::to_string() const {
    std::string out;
    for (std::uint32_t i = 0; i < length_; ++i) {
        const std::uint32_t s = get(i);
        if (alphabet_ <= 10) {
            out.push_back(static_cast<char>('0' + s));
        } else {
            if (i) out.push_back('-');
            out += std::to_string(s);
        }
    }
    return out;
}

std::uint64_t mismatch_count(const Word& a, const Word& b) {
    if (a.length() != b.length() || a.nibble_packed() != b.nibble_packed())
        fail(Errc::invalid_argument, "hamming distance needs equal-length words");
    const auto& la = a.limbs();
    const auto& lb = b.limbs();
    std::uint64_t count = 0;
    if (a.nibble_packed()) {
        constexpr std::uint64_t ones = 0x1111111111111111ULL;
        for (std::size_t i = 0; i < la.size(); ++i) {
            const std::uint64_t x = la[i] ^ lb[i];
            const std::uint64_t hit = (x | (x >> 1) | (x >> 2) | (x >> 3)) & ones;
            count += static_cast<std::uint64_t>(std::popcount(hit));
        }
    } else {
        constexpr std::uint64_t ones = 0x0101010101010101ULL;
        for (std::size_t i = 0; i < la.size(); ++i) {
            const std::uint64_t x = la[i] ^ lb[i];
            const std::uint64_t hit =
                (x | (x >> 1) | (x >> 2) | (x >> 3) | (x >> 4) | (x >> 5) | (x >> 6) | (x >> 7)) & ones;
            count += static_cast<std::uint64_t>(std::popcount(hit));
        }
    }
    return count;
}

double hamming_distance(const Word& a, const Word& b) {
    if (a.length() == 0) return 0.0;
    return static_cast<double>(mismatch_count(a, b)) / static_cast<double>(a.length());
}

void NameSample::validate() const {
    if (words.size() != weights.size()) fail(Errc::invalid_argument, "name sample weight mismatch");
    double total = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (weights[i] < 0) fail(Errc::invalid_argument, "name sample weight negative");
        if (words[i].length() != words.front().length())
            fail(Errc::invalid_argument, "name sample words have mixed lengths");
        total += weights[i];
    }
    if (!words.empty() && std::abs(total - 1.0) > 1e-9)
        fail(Errc::invalid_argument, "name sample weights must sum to 1 within 1e-9");
}

Word extract_name(const System& sys, const Partition& p, const Point& x, const FolnerSet& f) {
    const auto& elems = f.elements();
    Word w(static_cast<std::uint32_t>(elems.size()), p.size);
    Point cur = sys.step(x, elems.front());
    w.set(0, p.label(cur));
    for (std::size_t i = 1; i < elems.size(); ++i) {
        cur = sys.step(cur, elems[i] - elems[i - 1]);
        w.set(static_cast<std::uint32_t>(i), p.label(cur));
    }
    return w;
}

namespace {

NameSample exact_bernoulli(const SystemPtr& sys, const Partition& p, const FolnerSet& f) {
    const auto r = static_cast<std::uint32_t>(sys->probs().size());
    if (p.size != r)
        fail(Errc::unsupported_operation, "exact bernoulli enumeration needs the full symbol partition");
    const std::size_t n = f.size();
    if (n > 20) fail(Errc::unsupported_operation, "exact bernoulli enumeration capped at |F| <= 20");
    double total_words = std::pow(static_cast<double>(r), static_cast<double>(n));
    if (total_words > static_cast<double>(1 << 21))
        fail(Errc::unsupported_operation, "exact bernoulli enumeration too large");
    const auto count = static_cast<std::uint64_t>(total_words + 0.5);

    NameSample s;
    s.alphabet = r;
    s.window = f;
    s.provenance = Provenance::exact;
    s.words.reserve(count);
    s.weights.reserve(count);
    const auto& probs = sys->probs();
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        Word w(static_cast<std::uint32_t>(n), r);
        double weight = 1.0;
        std::uint64_t rem = idx;
        for (std::size_t i = 0; i < n; ++i) {
            const auto sym = static_cast<std::uint32_t>(rem % r);
            rem /= r;
            w.set(static_cast<std::uint32_t>(i), sym);
            weight *= probs[sym];
        }
        s.words.push_back(std::move(w));
        s.weights.push_back(weight);
    }
    return s;
}

// Rotation names are piecewise constant in x: the circle splits into arcs
// cut by {b - f*theta : b break, f in F}, one word per arc, weight = arc
// length. Fixed-point arithmetic keeps the cuts exact.
NameSample exact_rotation_arcs(const SystemPtr& sys, const Partition& p, const FolnerSet& f) {
    if (p.circle_breaks.empty())
        fail(Errc::unsupported_operation, "exact rotation enumeration needs an interval partition");
    const auto& elems = f.elements();
    std::vector<u128> cuts;
    cuts.reserve(p.circle_breaks.size() * elems.size());
    if (p.circle_breaks.size() * elems.size() > (std::size_t{1} << 22))
        fail(Errc::unsupported_operation, "exact rotation enumeration too large");
    for (std::int64_t g : elems) {
        const u128 shift = mul_frac_int(sys->theta().frac, g);
        for (u128 b : p.circle_breaks) cuts.push_back(b - shift);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    NameSample s;
    s.alphabet = p.size;
    s.window = f;
    s.provenance = Provenance::exact;
    s.words.reserve(cuts.size());
    s.weights.reserve(cuts.size());
    const long double scale = 1.0L;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const u128 a = cuts[i];
        const u128 len = (i + 1 < cuts.size()) ? cuts[i + 1] - a : cuts[0] - a; // wraps mod 2^128
        const Point left{CircleCoord{a}};
        s.words.push_back(extract_name(*sys, p, left, f));
        s.weights.push_back(static_cast<double>(frac_to_ld(len) * scale));
    }
    // the full circle: a zero "length" means the single-cut degenerate case
    if (cuts.size() == 1) s.weights[0] = 1.0;
    return s;
}

NameSample exact_skew_fiber_names(const SystemPtr& sys, const Partition& p, const FolnerSet& f,
                                  std::uint64_t seed) {
    if (!sys->cocycle().constant())
        fail(Errc::unsupported_operation,
             "exact skew enumeration needs a constant cocycle for fiber-measurable partitions");
    const std::uint32_t m = sys->group_order();
    NameSample s;
    s.alphabet = p.size;
    s.window = f;
    s.provenance = Provenance::exact;
    Point base = sys->base()->sample(seed, 0);
    for (std::uint32_t h = 0; h < m; ++h) {
        Point x = make_pair_point(base, Point{GroupElem{h, m}});
        s.words.push_back(extract_name(*sys, p, x, f));
        s.weights.push_back(1.0 / m);
    }
    return s;
}

} // namespace

NameSample collect_name_sample(const SystemPtr& sys, const Partition& p, const FolnerSet& f,
                               const SampleBudget& budget) {
    if (!sys) fail(Errc::invalid_argument, "collect_name_sample needs a system");
    if (budget.exact) {
        if (p.scope == PartitionScope::constant) {
            NameSample s;
            s.alphabet = 1;
            s.window = f;
            s.provenance = Provenance::exact;
            Word w(static_cast<std::uint32_t>(f.size()), 1);
            s.words.push_back(std::move(w));
            s.weights.push_back(1.0);
            return s;
        }
        if (sys->kind() == SystemKind::bernoulli && p.scope == PartitionScope::base_symbol)
            return exact_bernoulli(sys, p, f);
        if (sys->kind() == SystemKind::rotation && p.scope == PartitionScope::circle)
            return exact_rotation_arcs(sys, p, f);
        if (sys->kind() == SystemKind::skew && p.scope == PartitionScope::fiber)
            return exact_skew_fiber_names(sys, p, f, budget.seed);
        fail(Errc::unsupported_operation, "exact name enumeration unsupported for this system/partition");
    }
    if (budget.n_points == 0) fail(Errc::invalid_argument, "monte carlo budget must be positive");
    NameSample s;
    s.alphabet = p.size;
    s.window = f;
    s.provenance = Provenance::monte_carlo;
    s.seed = budget.seed;
    s.n_points = budget.n_points;
    const double w = 1.0 / static_cast<double>(budget.n_points);
    s.words.reserve(budget.n_points);
    for (std::uint64_t i = 0; i < budget.n_points; ++i) {
        const Point x = sys->sample(budget.seed, i);
        s.words.push_back(extract_name(*sys, p, x, f));
        s.weights.push_back(w);
    }
    return s;
}

double partition_distance(const std::vector<Point>& points, const std::vector<double>& weights,
                          const Partition& p, const Partition& q) {
    if (p.size != q.size) fail(Errc::invalid_argument, "partition_distance needs equal sizes");
    if (points.size() != weights.size())
        fail(Errc::invalid_argument, "partition_distance weight mismatch");
    double mass = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (p.label(points[i]) != q.label(points[i])) mass += weights[i];
    return mass;
}

std::string name_sample_csv(const NameSample& s) {
    std::string out = "word,weight\n";
    char buf[64];
    for (std::size_t i = 0; i < s.words.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.9g", s.weights[i]);
        out += s.words[i].to_string();
        out += ',';
        out += buf;
        out += '\n';
    }
    return out;
}

} // namespace slowlab
