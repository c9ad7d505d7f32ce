#include "slowlab/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slowlab {

namespace {

// 128x128 -> 256 bit product, returned as (hi, lo).
struct U256 {
    u128 hi = 0, lo = 0;
};

U256 mul_full(u128 a, u128 b) {
    const u128 mask = (static_cast<u128>(1) << 64) - 1;
    const u128 a0 = a & mask, a1 = a >> 64;
    const u128 b0 = b & mask, b1 = b >> 64;
    const u128 p00 = a0 * b0;
    const u128 p01 = a0 * b1;
    const u128 p10 = a1 * b0;
    const u128 p11 = a1 * b1;
    u128 mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    U256 r;
    r.lo = (p00 & mask) | (mid << 64);
    r.hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    return r;
}

} // namespace

u128 golden_conjugate_frac() {
    // largest t with t^2 + t*2^128 <= 2^256, i.e. t = floor(theta * 2^128)
    // for theta^2 + theta = 1.
    static const u128 value = [] {
        u128 lo = 0, hi = ~static_cast<u128>(0);
        while (lo < hi) {
            const u128 mid = lo + ((hi - lo) >> 1) + 1;
            U256 sq = mul_full(mid, mid);
            // add mid * 2^128: contributes mid to the high limb
            U256 lhs{sq.hi + mid, sq.lo};
            const bool overflow = lhs.hi < sq.hi;
            // rhs = 2^256 exactly; lhs <= rhs unless the 256-bit sum overflowed
            // or equals are impossible (theta irrational), so test strict.
            if (!overflow)
                lo = mid;
            else
                hi = mid - 1;
        }
        return lo;
    }();
    return value;
}

const PairPoint& Point::as_pair() const {
    if (const auto* p = std::get_if<PairPoint>(&payload)) return *p;
    fail(Errc::invalid_argument, "point/system mismatch: expected pair point");
}
const CircleCoord& Point::as_circle() const {
    if (const auto* p = std::get_if<CircleCoord>(&payload)) return *p;
    fail(Errc::invalid_argument, "point/system mismatch: expected circle coordinate");
}
const SymbolStream& Point::as_stream() const {
    if (const auto* p = std::get_if<SymbolStream>(&payload)) return *p;
    fail(Errc::invalid_argument, "point/system mismatch: expected symbol stream");
}
const GroupElem& Point::as_group() const {
    if (const auto* p = std::get_if<GroupElem>(&payload)) return *p;
    fail(Errc::invalid_argument, "point/system mismatch: expected group element");
}
const OdoPoint& Point::as_odo() const {
    if (const auto* p = std::get_if<OdoPoint>(&payload)) return *p;
    fail(Errc::invalid_argument, "point/system mismatch: expected odometer point");
}

Point make_pair_point(Point first, Point second) {
    PairPoint p{std::make_shared<Point>(std::move(first)), std::make_shared<Point>(std::move(second))};
    return Point{p};
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

Partition constant_partition() {
    Partition p;
    p.size = 1;
    p.label = [](const Point&) { return 0u; };
    p.scope = PartitionScope::constant;
    p.desc = "constant";
    return p;
}

Partition symbol_partition(const SystemPtr& bernoulli_sys) {
    if (!bernoulli_sys || bernoulli_sys->kind() != SystemKind::bernoulli)
        fail(Errc::invalid_argument, "symbol partition needs a bernoulli system");
    Partition p;
    p.size = static_cast<std::uint32_t>(bernoulli_sys->probs().size());
    p.label = [sys = bernoulli_sys](const Point& x) { return sys->symbol_at(x.as_stream(), 0); };
    p.scope = PartitionScope::base_symbol;
    p.desc = "symbol[" + std::to_string(p.size) + "]";
    return p;
}

Partition interval_partition(std::vector<u128> breaks) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    if (breaks.empty()) fail(Errc::invalid_argument, "interval partition needs at least one break");
    if (breaks.front() != 0) breaks.insert(breaks.begin(), 0);
    const auto size = static_cast<std::uint32_t>(breaks.size());
    Partition p;
    p.size = size;
    p.label = [breaks](const Point& x) {
        const u128 t = x.as_circle().frac;
        // half-open cells [b_i, b_{i+1})
        auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
        return static_cast<std::uint32_t>(std::distance(breaks.begin(), it) - 1);
    };
    p.scope = PartitionScope::circle;
    p.desc = "intervals[" + std::to_string(size) + "]";
    p.circle_breaks = breaks;
    return p;
}

Partition dyadic_partition(int depth) {
    if (depth < 1 || depth > 126) fail(Errc::invalid_argument, "dyadic partition depth out of range");
    std::vector<u128> breaks;
    const auto cells = static_cast<std::uint64_t>(1) << depth;
    for (std::uint64_t i = 0; i < cells; ++i) breaks.push_back(static_cast<u128>(i) << (128 - depth));
    Partition p = interval_partition(std::move(breaks));
    p.desc = "dyadic[" + std::to_string(depth) + "]";
    return p;
}

Partition fiber_partition(std::uint32_t group_order, int layer) {
    if (group_order < 1) fail(Errc::invalid_argument, "fiber partition needs group order >= 1");
    Partition p;
    p.size = group_order;
    p.label = [layer](const Point& x) {
        const Point* cur = &x;
        for (int i = 0; i < layer; ++i) cur = cur->as_pair().first.get();
        return cur->as_pair().second->as_group().value;
    };
    p.scope = PartitionScope::fiber;
    p.desc = "fiber[" + std::to_string(group_order) + "]";
    return p;
}

Partition refine_partition(const Partition& p, const Partition& q) {
    Partition r;
    r.size = p.size * q.size;
    r.label = [p, q, qs = q.size](const Point& x) { return p.label(x) * qs + q.label(x); };
    r.scope = (p.scope == q.scope) ? p.scope : PartitionScope::whole;
    r.desc = p.desc + "*" + q.desc;
    if (r.scope == PartitionScope::circle) {
        r.circle_breaks = p.circle_breaks;
        r.circle_breaks.insert(r.circle_breaks.end(), q.circle_breaks.begin(), q.circle_breaks.end());
        std::sort(r.circle_breaks.begin(), r.circle_breaks.end());
        r.circle_breaks.erase(std::unique(r.circle_breaks.begin(), r.circle_breaks.end()),
                              r.circle_breaks.end());
    }
    return r;
}

Partition first_component_partition(const Partition& q) {
    Partition r;
    r.size = q.size;
    r.label = [q](const Point& x) { return q.label(*x.as_pair().first); };
    r.scope = PartitionScope::whole;
    r.desc = "first(" + q.desc + ")";
    return r;
}

Partition second_component_partition(const Partition& q) {
    Partition r;
    r.size = q.size;
    r.label = [q](const Point& x) { return q.label(*x.as_pair().second); };
    r.scope = PartitionScope::second;
    r.desc = "second(" + q.desc + ")";
    return r;
}

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

SystemPtr System::trivial() {
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::trivial;
    return s;
}

SystemPtr System::bernoulli(std::vector<double> probs) {
    if (probs.size() < 1 || probs.size() > 255)
        fail(Errc::invalid_argument, "bernoulli needs between 1 and 255 probabilities");
    double total = 0;
    for (double p : probs) {
        if (p < 0) fail(Errc::invalid_argument, "bernoulli probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        fail(Errc::invalid_argument, "bernoulli probabilities must sum to 1 within 1e-12");
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::bernoulli;
    s->probs_ = std::move(probs);
    s->cum_.resize(s->probs_.size());
    std::partial_sum(s->probs_.begin(), s->probs_.end(), s->cum_.begin());
    s->cum_.back() = 1.0;
    return s;
}

SystemPtr System::rotation(CircleCoord theta) {
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::rotation;
    s->theta_ = theta;
    return s;
}

SystemPtr System::golden_rotation() { return rotation(CircleCoord{golden_conjugate_frac()}); }

SystemPtr System::odometer(std::uint32_t base) {
    if (base < 2) fail(Errc::invalid_argument, "odometer base must be >= 2");
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::odometer;
    s->odo_base_ = base;
    return s;
}

SystemPtr System::skew(SystemPtr base, std::uint32_t group_order, GroupCocycle cocycle,
                       bool base_ergodic) {
    if (!base) fail(Errc::invalid_argument, "skew needs a base system");
    if (group_order < 1) fail(Errc::invalid_argument, "skew group order must be >= 1");
    if (cocycle.increments.empty()) fail(Errc::invalid_argument, "skew cocycle has no increments");
    if (cocycle.base_partition &&
        cocycle.base_partition->size != cocycle.increments.size())
        fail(Errc::invalid_argument, "cocycle increments must match its base partition size");
    for (auto inc : cocycle.increments)
        if (inc >= group_order) fail(Errc::invalid_argument, "cocycle increment outside the group");
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::skew;
    s->base_ = std::move(base);
    s->group_order_ = group_order;
    s->cocycle_ = std::move(cocycle);
    if (!base_ergodic) s->warnings_.push_back("skew built over a base not flagged ergodic");
    return s;
}

SystemPtr System::product(SystemPtr first, SystemPtr second) {
    if (!first || !second) fail(Errc::invalid_argument, "product needs two systems");
    auto s = std::shared_ptr<System>(new System());
    s->kind_ = SystemKind::product;
    s->base_ = std::move(first);
    s->second_ = std::move(second);
    return s;
}

std::uint32_t System::symbol_at(const SymbolStream& s, std::int64_t i) const {
    if (kind_ != SystemKind::bernoulli) fail(Errc::invalid_argument, "symbol_at on non-bernoulli system");
    const double u = random_unit(s.seed, static_cast<std::uint64_t>(s.offset + i) * 2 + 1);
    auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
    if (it == cum_.end()) --it;
    return static_cast<std::uint32_t>(std::distance(cum_.begin(), it));
}

std::uint32_t System::odo_digit(const OdoPoint& p, int digit) const {
    if (kind_ != SystemKind::odometer) fail(Errc::invalid_argument, "odo_digit on non-odometer system");
    if (digit < 0 || digit > 39) fail(Errc::invalid_argument, "odometer digit index out of range");
    // resolve carries from the added offset bottom-up
    __int128 carry = p.offset;
    std::uint32_t d = 0;
    for (int i = 0; i <= digit; ++i) {
        const auto raw = static_cast<std::int64_t>(mix_seed(p.seed, static_cast<std::uint64_t>(i)) % odo_base_);
        const __int128 v = raw + carry;
        __int128 q = v / odo_base_;
        __int128 r = v % odo_base_;
        if (r < 0) {
            r += odo_base_;
            q -= 1;
        }
        d = static_cast<std::uint32_t>(r);
        carry = q;
    }
    return d;
}

Point System::sample(std::uint64_t seed, std::uint64_t index) const {
    switch (kind_) {
        case SystemKind::trivial:
            return Point{GroupElem{0, 1}};
        case SystemKind::bernoulli:
            return Point{SymbolStream{mix_seed(seed, index), 0}};
        case SystemKind::rotation:
            return Point{CircleCoord{random_frac(seed, index)}};
        case SystemKind::odometer:
            return Point{OdoPoint{mix_seed(seed, index), 0}};
        case SystemKind::skew: {
            Point b = base_->sample(mix_seed(seed, index * 2), index);
            const auto h = static_cast<std::uint32_t>(mix_seed(seed, index * 2 + 1) % group_order_);
            return make_pair_point(std::move(b), Point{GroupElem{h, group_order_}});
        }
        case SystemKind::product: {
            Point a = base_->sample(mix_seed(seed, index * 2), index);
            Point b = second_->sample(mix_seed(seed, index * 2 + 1), index);
            return make_pair_point(std::move(a), std::move(b));
        }
    }
    fail(Errc::invalid_argument, "corrupt system");
}

std::uint32_t System::cocycle_increment(const Point& base_point) const {
    if (cocycle_.constant()) return cocycle_.increments[0];
    const std::uint32_t lbl = cocycle_.base_partition->label(base_point);
    if (lbl >= cocycle_.increments.size()) fail(Errc::invalid_argument, "cocycle label out of range");
    return cocycle_.increments[lbl];
}

Point System::step(const Point& x, std::int64_t k) const {
    switch (kind_) {
        case SystemKind::trivial:
            return x;
        case SystemKind::bernoulli: {
            SymbolStream s = x.as_stream();
            s.offset += k;
            return Point{s};
        }
        case SystemKind::rotation: {
            CircleCoord c = x.as_circle();
            c.frac += mul_frac_int(theta_.frac, k);
            return Point{c};
        }
        case SystemKind::odometer: {
            OdoPoint p = x.as_odo();
            p.offset += k;
            return Point{p};
        }
        case SystemKind::skew: {
            const auto& pp = x.as_pair();
            const GroupElem h = pp.second->as_group();
            if (cocycle_.constant()) {
                // alpha_k = k * g, fused
                const std::int64_t g = cocycle_.increments[0];
                std::int64_t v = (static_cast<std::int64_t>(h.value) + g * (k % group_order_)) % group_order_;
                if (v < 0) v += group_order_;
                return make_pair_point(base_->step(*pp.first, k),
                                       Point{GroupElem{static_cast<std::uint32_t>(v), group_order_}});
            }
            // walk the base orbit composing increments
            std::int64_t v = h.value;
            Point cur = *pp.first;
            if (k >= 0) {
                for (std::int64_t i = 0; i < k; ++i) {
                    v = (v + cocycle_increment(cur)) % group_order_;
                    cur = base_->step(cur, 1);
                }
            } else {
                for (std::int64_t i = 0; i < -k; ++i) {
                    cur = base_->step(cur, -1);
                    v = (v - cocycle_increment(cur)) % group_order_;
                    if (v < 0) v += group_order_;
                }
            }
            return make_pair_point(std::move(cur), Point{GroupElem{static_cast<std::uint32_t>(v), group_order_}});
        }
        case SystemKind::product:
            return make_pair_point(base_->step(*x.as_pair().first, k), second_->step(*x.as_pair().second, k));
    }
    fail(Errc::invalid_argument, "corrupt system");
}

int System::skew_depth() const {
    int d = 0;
    const System* s = this;
    while (s->kind_ == SystemKind::skew) {
        ++d;
        s = s->base_.get();
    }
    return d;
}

SystemPtr System::drop_skew_layers(int layers) const {
    SystemPtr cur = shared_from_this();
    for (int i = 0; i < layers; ++i) {
        if (cur->kind() != SystemKind::skew)
            fail(Errc::invalid_argument, "drop_skew_layers: not enough skew layers");
        cur = cur->base();
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Factor maps
// ---------------------------------------------------------------------------

FactorMap skew_projection(SystemPtr skew_source, int layers) {
    if (!skew_source) fail(Errc::invalid_argument, "skew_projection needs a source");
    if (layers < 1 || layers > skew_source->skew_depth())
        fail(Errc::invalid_argument, "skew_projection: layer count out of range");
    FactorMap f;
    f.source = skew_source;
    f.target = skew_source->drop_skew_layers(layers);
    f.drop_layers = layers;
    f.fiber_kind = FiberKind::exact_skew;
    f.apply = [layers](const Point& x) {
        const Point* cur = &x;
        for (int i = 0; i < layers; ++i) cur = cur->as_pair().first.get();
        return *cur;
    };
    return f;
}

FactorMap identity_factor(SystemPtr sys) {
    FactorMap f;
    f.source = sys;
    f.target = std::move(sys);
    f.fiber_kind = FiberKind::point;
    f.apply = [](const Point& x) { return x; };
    return f;
}

FactorMap trivial_factor(SystemPtr sys) {
    FactorMap f;
    f.source = std::move(sys);
    f.target = System::trivial();
    f.fiber_kind = FiberKind::full_space;
    f.apply = [](const Point&) { return Point{GroupElem{0, 1}}; };
    return f;
}

FactorMap product_first_factor(SystemPtr product_source) {
    if (!product_source || product_source->kind() != SystemKind::product)
        fail(Errc::invalid_argument, "product_first_factor needs a product system");
    FactorMap f;
    f.source = product_source;
    f.target = product_source->base();
    f.fiber_kind = FiberKind::empirical;
    f.apply = [](const Point& x) { return *x.as_pair().first; };
    return f;
}

Partition pullback_partition(const FactorMap& f, const Partition& q) {
    Partition p;
    p.size = q.size;
    p.label = [apply = f.apply, q](const Point& x) { return q.label(apply(x)); };
    p.scope = PartitionScope::whole;
    p.desc = "pullback(" + q.desc + ")";
    return p;
}

} // namespace slowlab
