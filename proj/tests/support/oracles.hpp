#pragma once

// Brute-force reference implementations. They deliberately avoid the library's
// data structures so they can check them.

#include "quizcram/seek_analytics.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace quizcram::testing {

// Per-second seen flags updated one second at a time.
class CoverageOracle {
public:
    explicit CoverageOracle(int duration_s) : seen_(static_cast<std::size_t>(duration_s), false) {}

    void mark(int from_s, int to_s) {
        for (int s = from_s; s < to_s; ++s) seen_[static_cast<std::size_t>(s)] = true;
    }
    int count(int from_s, int to_s) const {
        int n = 0;
        for (int s = from_s; s < to_s; ++s) n += seen_[static_cast<std::size_t>(s)] ? 1 : 0;
        return n;
    }
    double fraction(int from_s, int to_s) const {
        return static_cast<double>(count(from_s, to_s)) / static_cast<double>(to_s - from_s);
    }
    std::optional<int> next_unseen(int from_s) const {
        for (int s = from_s; s < static_cast<int>(seen_.size()); ++s) {
            if (!seen_[static_cast<std::size_t>(s)]) return s;
        }
        return std::nullopt;
    }
    bool seen(int s) const { return seen_[static_cast<std::size_t>(s)]; }
    int duration() const { return static_cast<int>(seen_.size()); }

private:
    std::vector<bool> seen_;
};

struct OracleChain {
    int source_s = 0;
    int dest_s = 0;
    std::int64_t started_at_ms = 0;
    std::size_t seek_count = 0;
};

// Union-find over "adjacent and closer than the threshold" pairs, then one
// chain per component. Zero-displacement components are kept and flagged by
// source == dest.
std::vector<OracleChain> oracle_chains(std::span<const analytics::SeekEvent> events, std::int64_t threshold_ms);

// True when `actual` keeps exactly the oracle's non-zero chains, in order, and
// counts the zero-displacement ones.
bool matches_oracle(const analytics::ChainSet& actual, const std::vector<OracleChain>& expected);

struct OracleHistograms {
    std::vector<std::size_t> destination_counts;
    std::vector<std::size_t> skip_counts;
};

// Recounts every second against every chain.
OracleHistograms oracle_histograms(std::span<const analytics::SeekChain> chains);

}  // namespace quizcram::testing
