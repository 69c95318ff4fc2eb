#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/interval_set.hpp"

#include <optional>
#include <string>
#include <vector>

namespace quizcram {

// Seconds of one video that one user has ever seen, regardless of speed or
// repetition, plus where playback last stopped.
class WatchCoverage {
public:
    WatchCoverage() = default;
    WatchCoverage(std::string user_id, std::string video_id, int duration_s);

    const std::string& user_id() const { return user_id_; }
    const std::string& video_id() const { return video_id_; }
    int duration_s() const { return duration_s_; }
    const IntervalSet& seen() const { return seen_; }
    int last_position_s() const { return last_position_s_; }

    // Adds [iv.begin, iv.end) to the seen set and moves the playhead to iv.end.
    // Throws ValidationError if the interval is reversed or leaves the video.
    void mark(Interval iv);

    // Moves the playhead without marking anything seen.
    void set_position(int position_s);

    // Rebuilds a persisted value; validates bounds.
    static WatchCoverage restore(std::string user_id, std::string video_id, int duration_s,
                                 const std::vector<Interval>& seen, int last_position_s);

    bool operator==(const WatchCoverage&) const = default;

private:
    std::string user_id_;
    std::string video_id_;
    int duration_s_ = 0;
    IntervalSet seen_;
    int last_position_s_ = 0;
};

WatchCoverage mark_watched(WatchCoverage cov, Interval interval);

// |seen ∩ [seg.start_s, seg.end_s)| / seg length.
double watched_fraction(const WatchCoverage& cov, const Segment& seg);

// Smallest unseen second >= from_s, or none when [from_s, duration) is fully seen.
std::optional<int> next_unseen(const WatchCoverage& cov, int from_s);

enum class RegionTag { seen_prior_parts, seen_current_part, unseen, relevant };

struct CoverageRegion {
    Interval interval;
    RegionTag tag = RegionTag::unseen;

    bool operator==(const CoverageRegion&) const = default;
};

// Maximal seen/unseen regions partitioning [0, duration), ordered by start,
// followed by one `relevant` overlay for the current part.
std::vector<CoverageRegion> coverage_regions(const WatchCoverage& cov, const Segment& current_part);

// Same partition without an overlay, used when the current question does not
// reference this video; every seen second counts as a prior part.
std::vector<CoverageRegion> coverage_regions(const WatchCoverage& cov, std::optional<Interval> current_part);

const char* to_string(RegionTag tag);

// Playhead bookkeeping shared by live reporting and log replay. `open_from`
// holds where the current playback span started, empty while stopped.
// play opens a span; heartbeat marks its own span and keeps playing; pause
// marks from the open start to the pause point; seek marks up to the seek
// origin and, if playing, reopens at the destination.
void playback_play(WatchCoverage& cov, std::optional<int>& open_from, int position_s);
void playback_heartbeat(WatchCoverage& cov, std::optional<int>& open_from, int from_s, int to_s);
void playback_pause(WatchCoverage& cov, std::optional<int>& open_from, int position_s);
void playback_seek(WatchCoverage& cov, std::optional<int>& open_from, int from_s, int to_s);

}  // namespace quizcram
