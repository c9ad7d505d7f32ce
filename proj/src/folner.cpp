#include "slowlab/folner.hpp"

#include <algorithm>
#include <cmath>

namespace slowlab {

FolnerSet::FolnerSet(std::vector<std::int64_t> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) fail(Errc::invalid_argument, "FolnerSet must be nonempty");
    std::sort(elements_.begin(), elements_.end());
    elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    if (elements_.size() > kMaxFolnerSize)
        fail(Errc::invalid_argument, "FolnerSet exceeds the materialization cap");
}

bool FolnerSet::contains(std::int64_t g) const {
    return std::binary_search(elements_.begin(), elements_.end(), g);
}

FolnerSet make_interval(std::int64_t n) {
    if (n < 1) fail(Errc::invalid_argument, "make_interval requires n >= 1");
    if (static_cast<std::size_t>(n) > FolnerSet::kMaxFolnerSize)
        fail(Errc::invalid_argument, "make_interval exceeds the materialization cap");
    std::vector<std::int64_t> v(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = i;
    return FolnerSet(std::move(v));
}

FolnerSet make_union(const std::vector<std::int64_t>& anchors, std::int64_t width) {
    if (width < 1) fail(Errc::invalid_argument, "make_union requires width >= 1");
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i] < 0) fail(Errc::invalid_argument, "make_union anchors must be nonnegative");
        if (i > 0 && anchors[i] <= anchors[i - 1])
            fail(Errc::invalid_argument, "make_union anchors must be strictly increasing");
    }
    std::vector<std::int64_t> v;
    v.reserve(static_cast<std::size_t>(width) * (anchors.size() + 1));
    auto push_block = [&](std::int64_t start) {
        for (std::int64_t i = 0; i < width; ++i) v.push_back(start + i);
        if (v.size() > 4 * FolnerSet::kMaxFolnerSize)
            fail(Errc::invalid_argument, "make_union exceeds the materialization cap");
    };
    push_block(0);
    for (std::int64_t a : anchors) push_block(a);
    return FolnerSet(std::move(v));
}

double defect(const FolnerSet& f, std::int64_t g) {
    const auto& e = f.elements();
    std::size_t hits = 0;
    for (std::int64_t x : e)
        if (f.contains(x + g)) ++hits; // x+g in F  <=>  x in (F - g), counts |(g+F) n F|
    return static_cast<double>(hits) / static_cast<double>(e.size());
}

FolnerSequence FolnerSequence::interval() {
    FolnerSequence s;
    s.kind_ = Kind::interval;
    return s;
}

FolnerSequence FolnerSequence::anchored_union(std::vector<std::int64_t> anchors, std::int64_t width) {
    if (width < 1) fail(Errc::invalid_argument, "FolnerSequence width must be >= 1");
    FolnerSequence s;
    s.kind_ = Kind::anchored;
    s.anchors_ = std::move(anchors);
    s.width_ = width;
    return s;
}

FolnerSequence FolnerSequence::rigidity(std::vector<std::int64_t> rigidity_times, WidthRule rule,
                                        std::int64_t width_coeff) {
    if (width_coeff < 1) fail(Errc::invalid_argument, "rigidity width coefficient must be >= 1");
    FolnerSequence s;
    s.kind_ = Kind::rigidity;
    s.anchors_ = std::move(rigidity_times);
    s.rule_ = rule;
    s.width_coeff_ = width_coeff;
    return s;
}

FolnerSequence FolnerSequence::explicit_sets(std::vector<FolnerSet> sets) {
    if (sets.empty()) fail(Errc::invalid_argument, "explicit Folner sequence must be nonempty");
    FolnerSequence s;
    s.kind_ = Kind::explicit_list;
    s.sets_ = std::move(sets);
    return s;
}

FolnerSet FolnerSequence::set_for(std::int64_t n) const {
    if (n < 1) fail(Errc::invalid_argument, "Folner sequence index must be >= 1");
    switch (kind_) {
        case Kind::interval:
            return make_interval(n);
        case Kind::anchored: {
            const std::size_t m = std::min<std::size_t>(anchors_.size(), static_cast<std::size_t>(n - 1));
            return make_union({anchors_.begin(), anchors_.begin() + static_cast<std::ptrdiff_t>(m)}, width_);
        }
        case Kind::rigidity: {
            std::int64_t width = 1;
            switch (rule_) {
                case WidthRule::log_rule:
                    width = std::max<std::int64_t>(
                        1, static_cast<std::int64_t>(std::floor(std::log(static_cast<double>(n) + 1.0))));
                    break;
                case WidthRule::linear:
                    width = std::max<std::int64_t>(1, width_coeff_ * n);
                    break;
                case WidthRule::constant:
                    width = width_coeff_;
                    break;
            }
            const std::size_t m = std::min<std::size_t>(anchors_.size(), static_cast<std::size_t>(n - 1));
            return make_union({anchors_.begin(), anchors_.begin() + static_cast<std::ptrdiff_t>(m)}, width);
        }
        case Kind::explicit_list: {
            const std::size_t i = std::min<std::size_t>(sets_.size(), static_cast<std::size_t>(n)) - 1;
            return sets_[i];
        }
    }
    fail(Errc::invalid_argument, "corrupt Folner sequence");
}

} // namespace slowlab
