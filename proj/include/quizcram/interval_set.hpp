#pragma once

#include <optional>
#include <vector>

namespace quizcram {

// Half-open integer interval [begin, end).
struct Interval {
    int begin = 0;
    int end = 0;

    int length() const { return end > begin ? end - begin : 0; }
    bool empty() const { return end <= begin; }
    bool operator==(const Interval&) const = default;
};

// Union of integer intervals, kept as a sorted list of disjoint, non-adjacent
// intervals. Inserting merges with every interval it touches.
class IntervalSet {
public:
    IntervalSet() = default;

    void insert(Interval iv);

    // Number of integers in [iv.begin, iv.end) that are in the set.
    int overlap(Interval iv) const;

    // Number of integers in the set.
    int total() const;

    bool contains(int point) const;

    // Smallest point in [from, limit) not in the set.
    std::optional<int> first_gap(int from, int limit) const;

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }

    bool operator==(const IntervalSet&) const = default;

private:
    std::vector<Interval> intervals_;
};

}  // namespace quizcram
