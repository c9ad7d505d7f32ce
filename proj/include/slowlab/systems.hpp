#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "slowlab/error.hpp"
#include "slowlab/fixed128.hpp"
#include "slowlab/folner.hpp"

namespace slowlab {

class System;
using SystemPtr = std::shared_ptr<const System>;

// ---------------------------------------------------------------------------
// Points
// ---------------------------------------------------------------------------

// A point of a symbolic (Bernoulli) system: symbol at time i is a pure
// function of (seed, offset + i), so shifting is an offset bump and random
// access is O(1) in both directions.
struct SymbolStream {
    std::uint64_t seed = 0;
    std::int64_t offset = 0;
};

struct GroupElem {
    std::uint32_t value = 0;
    std::uint32_t order = 1;
};

// Odometer point: b-adic digits generated from the seed plus a carried
// integer offset. Digit queries resolve carries from the bottom up.
struct OdoPoint {
    std::uint64_t seed = 0;
    std::int64_t offset = 0;
};

struct Point;
struct PairPoint {
    std::shared_ptr<const Point> first;
    std::shared_ptr<const Point> second;
};

struct Point {
    std::variant<std::monostate, SymbolStream, CircleCoord, GroupElem, OdoPoint, PairPoint> payload;

    const PairPoint& as_pair() const;
    const CircleCoord& as_circle() const;
    const SymbolStream& as_stream() const;
    const GroupElem& as_group() const;
    const OdoPoint& as_odo() const;
};

Point make_pair_point(Point first, Point second);

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

// Names a partition depends only on part of a product/skew point; exact
// samplers use this to decide what they can enumerate.
enum class PartitionScope {
    whole,       // may read anything
    base_symbol, // symbol stream at time 0
    circle,      // circle coordinate
    fiber,       // group coordinate(s) of a skew tower
    second,      // second component of a product
    constant,
};

struct Partition {
    std::uint32_t size = 1;
    std::function<std::uint32_t(const Point&)> label;
    PartitionScope scope = PartitionScope::whole;
    std::string desc;
    // Sorted cell endpoints when scope == circle; lets samplers enumerate
    // names arc by arc instead of sampling.
    std::vector<u128> circle_breaks;

    std::uint32_t operator()(const Point& x) const { return label(x); }
};

Partition constant_partition();
// Labels a symbol stream by its time-0 symbol.
Partition symbol_partition(const SystemPtr& bernoulli_sys);
// Half-open circle intervals [b_i, b_{i+1}); breaks must include 0 implicitly.
Partition interval_partition(std::vector<u128> breaks);
Partition dyadic_partition(int depth);
// Group coordinate after descending `layer` skew levels from the top
// (layer 0 reads the outermost group coordinate).
Partition fiber_partition(std::uint32_t group_order, int layer = 0);
// Joint label (p, q) -> p*Q.size + q.
Partition refine_partition(const Partition& p, const Partition& q);
// Applies q to the first/second component of a pair point.
Partition first_component_partition(const Partition& q);
Partition second_component_partition(const Partition& q);

// ---------------------------------------------------------------------------
// Systems
// ---------------------------------------------------------------------------

enum class SystemKind { trivial, bernoulli, rotation, odometer, skew, product };

// Cocycle into a finite cyclic group: a fixed increment, or an increment
// chosen by a declared base partition label.
struct GroupCocycle {
    std::vector<std::uint32_t> increments; // one per base partition label
    std::optional<Partition> base_partition; // absent => constant (increments[0])

    bool constant() const { return !base_partition.has_value(); }
};

class System : public std::enable_shared_from_this<System> {
public:
    static SystemPtr trivial();
    static SystemPtr bernoulli(std::vector<double> probs);
    static SystemPtr rotation(CircleCoord theta);
    static SystemPtr golden_rotation();
    static SystemPtr odometer(std::uint32_t base);
    static SystemPtr skew(SystemPtr base, std::uint32_t group_order, GroupCocycle cocycle,
                          bool base_ergodic = true);
    static SystemPtr product(SystemPtr first, SystemPtr second);

    SystemKind kind() const { return kind_; }
    const std::vector<double>& probs() const { return probs_; }
    CircleCoord theta() const { return theta_; }
    std::uint32_t odo_base() const { return odo_base_; }
    const SystemPtr& base() const { return base_; }
    const SystemPtr& second() const { return second_; }
    std::uint32_t group_order() const { return group_order_; }
    const GroupCocycle& cocycle() const { return cocycle_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    // i.i.d. point draw from the invariant measure; deterministic per
    // (seed, index), distinct indices give independent points.
    Point sample(std::uint64_t seed, std::uint64_t index) const;

    // T^k x, exact for rotation and odometer; O(|k|) for symbol-dependent
    // skew cocycles, O(1) otherwise.
    Point step(const Point& x, std::int64_t k) const;

    std::uint32_t symbol_at(const SymbolStream& s, std::int64_t i) const;
    std::uint32_t odo_digit(const OdoPoint& p, int digit) const;

    // Number of skew layers stacked on the innermost base.
    int skew_depth() const;
    SystemPtr drop_skew_layers(int layers) const;

private:
    System() = default;
    std::uint32_t cocycle_increment(const Point& base_point) const;

    SystemKind kind_ = SystemKind::trivial;
    std::vector<double> probs_;
    std::vector<double> cum_;
    CircleCoord theta_{};
    std::uint32_t odo_base_ = 2;
    SystemPtr base_;
    SystemPtr second_;
    std::uint32_t group_order_ = 1;
    GroupCocycle cocycle_;
    std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Factor maps
// ---------------------------------------------------------------------------

enum class FiberKind { exact_skew, empirical, point, full_space };

struct FactorMap {
    SystemPtr source;
    SystemPtr target;
    std::function<Point(const Point&)> apply;
    FiberKind fiber_kind = FiberKind::empirical;
    int drop_layers = 0;   // for exact_skew: how many top skew layers project away
    int window = 12;       // empirical fibers: conditioning window length
    int floor = 50;        // empirical fibers: minimum matched sample size
    // empirical fibers condition on equal target names under this partition
    std::optional<Partition> target_partition;
};

// Projection of an iterated skew onto the system `layers` levels down.
FactorMap skew_projection(SystemPtr skew_source, int layers = 1);
// pi = id; every fiber is a single point.
FactorMap identity_factor(SystemPtr sys);
// Target is the one-point system; the unique fiber is the whole space.
FactorMap trivial_factor(SystemPtr sys);
// Projection of a product onto its first component; fibers are copies of
// the second component (empirical unless the partition only reads it).
FactorMap product_first_factor(SystemPtr product_source);

// Q on the target pulled back through f: label(x) = Q(f(x)).
Partition pullback_partition(const FactorMap& f, const Partition& q);

} // namespace slowlab
