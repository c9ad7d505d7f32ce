#pragma once

#include <cstdint>
#include <vector>

#include "slowlab/error.hpp"

namespace slowlab {

// A finite observation window in Z: nonempty, sorted, duplicate-free.
// Windows are materialized because every distance kernel iterates them;
// requests above kMaxFolnerSize are rejected.
class FolnerSet {
public:
    static constexpr std::size_t kMaxFolnerSize = std::size_t{1} << 22;

    FolnerSet() = default;
    explicit FolnerSet(std::vector<std::int64_t> elements);

    const std::vector<std::int64_t>& elements() const { return elements_; }
    std::size_t size() const { return elements_.size(); }
    bool contains(std::int64_t g) const;

private:
    std::vector<std::int64_t> elements_;
};

// The window [0, n).
FolnerSet make_interval(std::int64_t n);

// [0,V) u [a_1, a_1+V) u ... with overlaps merged; anchors strictly increasing.
FolnerSet make_union(const std::vector<std::int64_t>& anchors, std::int64_t width);

// |(g+F) n F| / |F|.
double defect(const FolnerSet& f, std::int64_t g);

// Rule producing a window per index n >= 1.
class FolnerSequence {
public:
    // F_n = [0, n).
    static FolnerSequence interval();
    // F_n = union of the first min(n, #anchors)+... anchors with fixed width;
    // index n uses anchors a_1..a_{n-1}.
    static FolnerSequence anchored_union(std::vector<std::int64_t> anchors, std::int64_t width);
    // Widths grow with the index instead of staying fixed:
    //   width_for(n) = max(1, floor(log(n+1)))     ("log" rule)
    //   width_for(n) = max(1, c*n)                 ("linear" rule)
    //   width_for(n) = c                           ("const" rule)
    enum class WidthRule { log_rule, linear, constant };
    static FolnerSequence rigidity(std::vector<std::int64_t> rigidity_times, WidthRule rule,
                                   std::int64_t width_coeff = 1);
    static FolnerSequence explicit_sets(std::vector<FolnerSet> sets);

    FolnerSet set_for(std::int64_t n) const;

private:
    enum class Kind { interval, anchored, rigidity, explicit_list };
    Kind kind_ = Kind::interval;
    std::vector<std::int64_t> anchors_;
    std::int64_t width_ = 1;
    WidthRule rule_ = WidthRule::constant;
    std::int64_t width_coeff_ = 1;
    std::vector<FolnerSet> sets_;
};

} // namespace slowlab
