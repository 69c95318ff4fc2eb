#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace quizcram::testing {

std::vector<OracleChain> oracle_chains(std::span<const analytics::SeekEvent> events, std::int64_t threshold_ms) {
    const std::size_t n = events.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (events[i + 1].at_ms - events[i].at_ms < threshold_ms) parent[find(i + 1)] = find(i);
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;  // keyed by root; members ascending
    for (std::size_t i = 0; i < n; ++i) groups[find(i)].push_back(i);

    std::vector<OracleChain> out;
    for (const auto& [_, members] : groups) {
        const auto first = *std::min_element(members.begin(), members.end());
        const auto last = *std::max_element(members.begin(), members.end());
        out.push_back({events[first].from_s, events[last].to_s, events[first].at_ms, members.size()});
    }
    std::sort(out.begin(), out.end(),
              [](const OracleChain& a, const OracleChain& b) { return a.started_at_ms < b.started_at_ms; });
    return out;
}

bool matches_oracle(const analytics::ChainSet& actual, const std::vector<OracleChain>& expected) {
    std::size_t zero = 0;
    std::size_t k = 0;
    for (const auto& e : expected) {
        if (e.source_s == e.dest_s) {
            ++zero;
            continue;
        }
        if (k >= actual.chains.size()) return false;
        const auto& c = actual.chains[k++];
        const auto dir = e.dest_s > e.source_s ? analytics::Direction::forward : analytics::Direction::backward;
        if (c.source_s != e.source_s || c.dest_s != e.dest_s || c.started_at_ms != e.started_at_ms ||
            c.seek_count != e.seek_count || c.direction != dir) {
            return false;
        }
    }
    return k == actual.chains.size() && zero == actual.zero_displacement;
}

OracleHistograms oracle_histograms(std::span<const analytics::SeekChain> chains) {
    int extent = 0;
    for (const auto& c : chains) extent = std::max({extent, c.source_s + 1, c.dest_s + 1});
    OracleHistograms h;
    h.destination_counts.assign(static_cast<std::size_t>(extent), 0);
    h.skip_counts.assign(static_cast<std::size_t>(extent), 0);
    for (int s = 0; s < extent; ++s) {
        for (const auto& c : chains) {
            if (c.dest_s == s) ++h.destination_counts[static_cast<std::size_t>(s)];
            if (c.dest_s > c.source_s && s >= c.source_s && s < c.dest_s) ++h.skip_counts[static_cast<std::size_t>(s)];
        }
    }
    return h;
}

}  // namespace quizcram::testing
