#include "quizcram/interval_set.hpp"

#include <algorithm>

namespace quizcram {

namespace {

// First interval whose end is >= point (the one that could contain or touch it).
auto first_reaching(const std::vector<Interval>& v, int point) {
    return std::lower_bound(v.begin(), v.end(), point,
                            [](const Interval& iv, int p) { return iv.end < p; });
}

}  // namespace

void IntervalSet::insert(Interval iv) {
    if (iv.empty()) return;
    auto first = std::lower_bound(intervals_.begin(), intervals_.end(), iv.begin,
                                  [](const Interval& x, int p) { return x.end < p; });
    auto last = first;
    while (last != intervals_.end() && last->begin <= iv.end) {
        iv.begin = std::min(iv.begin, last->begin);
        iv.end = std::max(iv.end, last->end);
        ++last;
    }
    first = intervals_.erase(first, last);
    intervals_.insert(first, iv);
}

int IntervalSet::overlap(Interval iv) const {
    if (iv.empty()) return 0;
    int count = 0;
    for (auto it = first_reaching(intervals_, iv.begin + 1); it != intervals_.end() && it->begin < iv.end; ++it) {
        count += std::min(it->end, iv.end) - std::max(it->begin, iv.begin);
    }
    return count;
}

int IntervalSet::total() const {
    int count = 0;
    for (const auto& iv : intervals_) count += iv.length();
    return count;
}

bool IntervalSet::contains(int point) const {
    auto it = first_reaching(intervals_, point + 1);
    return it != intervals_.end() && it->begin <= point;
}

std::optional<int> IntervalSet::first_gap(int from, int limit) const {
    if (from >= limit) return std::nullopt;
    auto it = first_reaching(intervals_, from + 1);
    if (it == intervals_.end() || it->begin > from) return from;
    // Intervals are non-adjacent, so the end of the containing one is unseen.
    if (it->end < limit) return it->end;
    return std::nullopt;
}

}  // namespace quizcram
