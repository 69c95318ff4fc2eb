#include "quizcram/watch_tracker.hpp"

#include "quizcram/errors.hpp"

#include <algorithm>

namespace quizcram {

WatchCoverage::WatchCoverage(std::string user_id, std::string video_id, int duration_s)
    : user_id_(std::move(user_id)), video_id_(std::move(video_id)), duration_s_(duration_s) {
    if (duration_s_ <= 0) throw ValidationError("video '" + video_id_ + "' needs a positive duration");
}

void WatchCoverage::mark(Interval iv) {
    if (iv.begin < 0 || iv.begin > iv.end || iv.end > duration_s_) {
        throw ValidationError("watch interval [" + std::to_string(iv.begin) + "," + std::to_string(iv.end) +
                              ") is outside video '" + video_id_ + "' [0," + std::to_string(duration_s_) + "]");
    }
    seen_.insert(iv);
    last_position_s_ = iv.end;
}

void WatchCoverage::set_position(int position_s) {
    if (position_s < 0 || position_s > duration_s_) {
        throw ValidationError("position " + std::to_string(position_s) + " is outside video '" + video_id_ + "'");
    }
    last_position_s_ = position_s;
}

WatchCoverage WatchCoverage::restore(std::string user_id, std::string video_id, int duration_s,
                                     const std::vector<Interval>& seen, int last_position_s) {
    WatchCoverage cov(std::move(user_id), std::move(video_id), duration_s);
    for (const auto& iv : seen) cov.mark(iv);
    cov.set_position(last_position_s);
    return cov;
}

WatchCoverage mark_watched(WatchCoverage cov, Interval interval) {
    cov.mark(interval);
    return cov;
}

double watched_fraction(const WatchCoverage& cov, const Segment& seg) {
    if (seg.video_id != cov.video_id()) {
        throw ValidationError("segment '" + seg.segment_id + "' does not belong to video '" + cov.video_id() + "'");
    }
    if (seg.length() <= 0) return 0.0;
    return static_cast<double>(cov.seen().overlap({seg.start_s, seg.end_s})) / seg.length();
}

std::optional<int> next_unseen(const WatchCoverage& cov, int from_s) {
    if (from_s < 0 || from_s > cov.duration_s()) {
        throw ValidationError("position " + std::to_string(from_s) + " is outside video '" + cov.video_id() + "'");
    }
    return cov.seen().first_gap(from_s, cov.duration_s());
}

std::vector<CoverageRegion> coverage_regions(const WatchCoverage& cov, std::optional<Interval> part) {
    const int duration = cov.duration_s();
    const Interval current = part.value_or(Interval{0, 0});

    // Cut points: every seen-interval boundary and the current part's bounds.
    std::vector<int> cuts{0, duration, current.begin, current.end};
    for (const auto& iv : cov.seen().intervals()) {
        cuts.push_back(iv.begin);
        cuts.push_back(iv.end);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<CoverageRegion> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const int a = std::max(cuts[i], 0);
        const int b = std::min(cuts[i + 1], duration);
        if (a >= b) continue;
        RegionTag tag = RegionTag::unseen;
        if (cov.seen().contains(a)) {
            const bool in_part = a >= current.begin && a < current.end;
            tag = in_part ? RegionTag::seen_current_part : RegionTag::seen_prior_parts;
        }
        if (!out.empty() && out.back().tag == tag && out.back().interval.end == a) {
            out.back().interval.end = b;
        } else {
            out.push_back({{a, b}, tag});
        }
    }
    if (part) out.push_back({current, RegionTag::relevant});
    return out;
}

std::vector<CoverageRegion> coverage_regions(const WatchCoverage& cov, const Segment& current_part) {
    if (current_part.video_id != cov.video_id()) {
        throw ValidationError("segment '" + current_part.segment_id + "' does not belong to video '" +
                              cov.video_id() + "'");
    }
    return coverage_regions(cov, Interval{current_part.start_s, current_part.end_s});
}

void playback_play(WatchCoverage& cov, std::optional<int>& open_from, int position_s) {
    cov.set_position(position_s);
    open_from = position_s;
}

void playback_heartbeat(WatchCoverage& cov, std::optional<int>& open_from, int from_s, int to_s) {
    cov.mark({from_s, to_s});
    open_from = to_s;
}

void playback_pause(WatchCoverage& cov, std::optional<int>& open_from, int position_s) {
    if (open_from && *open_from <= position_s) cov.mark({*open_from, position_s});
    cov.set_position(position_s);
    open_from.reset();
}

void playback_seek(WatchCoverage& cov, std::optional<int>& open_from, int from_s, int to_s) {
    if (open_from && *open_from <= from_s) cov.mark({*open_from, from_s});
    cov.set_position(to_s);
    if (open_from) open_from = to_s;
}

const char* to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::seen_prior_parts:
            return "seen_prior_parts";
        case RegionTag::seen_current_part:
            return "seen_current_part";
        case RegionTag::unseen:
            return "unseen";
        case RegionTag::relevant:
            return "relevant";
    }
    return "unseen";
}

}  // namespace quizcram
