#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/event_log.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace quizcram::analytics {

struct AnalysisOptions {
    // Seeks closer together than this (strictly) join one chain.
    std::int64_t merge_threshold_ms = 5000;
    // Width of the window before a quiz (forward targets) and after it (backward sources).
    int quiz_window_s = 10;
    // Share of a video one open must cover to count the video as finished.
    double finished_fraction = 0.9;
};

struct SeekEvent {
    std::string user_id;
    std::string video_id;
    std::int64_t at_ms = 0;
    int from_s = 0;
    int to_s = 0;

    bool operator==(const SeekEvent&) const = default;
};

enum class Direction { forward, backward };

struct SeekChain {
    std::string user_id;
    std::string video_id;
    int source_s = 0;
    int dest_s = 0;
    std::int64_t started_at_ms = 0;
    Direction direction = Direction::forward;
    std::size_t seek_count = 0;
    // Quiz positions strictly between the endpoints; filled when quizzes are supplied.
    std::vector<int> crossed_quizzes;

    bool operator==(const SeekChain&) const = default;
};

struct ChainSet {
    std::vector<SeekChain> chains;
    // Chains whose last destination equals their first origin; dropped from `chains`.
    std::size_t zero_displacement = 0;

    bool operator==(const ChainSet&) const = default;
};

// Groups time-ordered seeks of one user on one video. Throws ValidationError
// if the events are not sorted by at_ms or mix users or videos.
ChainSet build_chains(std::span<const SeekEvent> events, std::span<const int> quizzes = {},
                      std::int64_t merge_threshold_ms = 5000);

struct ChainClass {
    bool starts_at_quiz = false;
    bool ends_in_quiz_window = false;
    bool crosses_quiz = false;
    bool plain = false;  // none of the above
    std::vector<int> crossed_quizzes;

    bool operator==(const ChainClass&) const = default;
};

// `quizzes` must be sorted ascending. The flags are independent.
ChainClass classify_chain(const SeekChain& chain, std::span<const int> quizzes, int quiz_window_s = 10);

struct UserOpens {
    std::string user_id;
    // Coverage fraction reached within each separate open of the video.
    std::vector<double> open_fractions;

    bool operator==(const UserOpens&) const = default;
};

// Integer tallies behind SeekStats; partial tallies from independent
// (user, video) streams combine with merge().
struct SeekTally {
    std::size_t total_chains = 0;
    std::size_t backward_chains = 0;
    std::size_t forward_chains = 0;
    std::size_t zero_displacement_chains = 0;
    std::size_t backward_from_quiz = 0;
    std::size_t forward_to_quiz_window = 0;
    std::size_t crossing_chains = 0;
    std::size_t forward_quiz_crossings = 0;  // (forward chain, crossed quiz) pairs
    std::size_t forward_skipped_seconds = 0;
    std::size_t quiz_count = 0;
    std::size_t duration_s = 0;
    std::size_t finished_viewers = 0;
    std::size_t rewatching_viewers = 0;

    void merge(const SeekTally& other);
    bool operator==(const SeekTally&) const = default;
};

// Fields are empty when their denominator is zero.
struct SeekStats {
    std::size_t total_chains = 0;
    std::size_t backward_chains = 0;
    std::size_t forward_chains = 0;
    std::size_t zero_displacement_chains = 0;
    std::optional<double> backward_from_quiz_fraction;
    std::optional<double> forward_to_quiz_window_fraction;
    std::optional<double> chains_not_crossing_quiz_fraction;
    std::optional<double> per_quiz_backward_rate_ratio;
    std::optional<double> forward_cross_rate_ratio;
    std::optional<double> rewatch_fraction;

    bool operator==(const SeekStats&) const = default;
};

SeekTally tally_video(std::span<const SeekChain> chains, std::span<const int> quizzes, int video_duration_s,
                      std::span<const UserOpens> opens, const AnalysisOptions& options = {});

SeekStats finalize(const SeekTally& tally);

// Statistics for one video. Throws ValidationError if the duration is not positive.
SeekStats compute_stats(std::span<const SeekChain> chains, std::span<const int> quizzes, int video_duration_s,
                        std::span<const UserOpens> opens, const AnalysisOptions& options = {});

struct SeekHistograms {
    std::vector<std::size_t> destination_counts;  // chains ending at each second
    std::vector<std::size_t> skip_counts;         // forward chains passing over each second
};

// Histograms over seconds [0, extent) where extent covers every chain endpoint.
SeekHistograms seek_histograms(std::span<const SeekChain> chains);

struct FigureData {
    std::string scatter_csv;    // user_id,video_id,source_s,dest_s,direction
    std::string histogram_csv;  // second,destination_count,skip_count,is_quiz
};

FigureData emit_figure_data(std::span<const SeekChain> chains, std::span<const int> quizzes);

struct VideoInfo {
    std::string video_id;
    int duration_s = 0;
    std::vector<int> quizzes;  // sorted
};

std::vector<VideoInfo> videos_from_course(const InVideoQuizCourse& course);
// Quiz positions are the ends of segments focused by original questions.
std::vector<VideoInfo> videos_from_manifest(const CourseManifest& manifest);

// One user's seeks on one video, in log order.
std::vector<SeekEvent> seeks_for(std::span<const InteractionEvent> user_events, const std::string& video_id);

// Coverage fraction of each open of the video. An open is a maximal run of the
// user's events on that video, ended by a session_start or an event on
// another video.
std::vector<double> open_fractions(std::span<const InteractionEvent> user_events, const VideoInfo& video);

struct VideoReport {
    VideoInfo video;
    std::vector<SeekChain> chains;
    SeekTally tally;
    SeekStats stats;
};

struct AnalysisReport {
    std::vector<VideoReport> videos;
    SeekStats overall;
    SeekTally overall_tally;
    // Events on videos missing from the course description.
    std::size_t skipped_events = 0;
};

AnalysisReport analyze_logs(const std::map<std::string, std::vector<InteractionEvent>>& events_by_user,
                            const std::vector<VideoInfo>& videos, const AnalysisOptions& options = {});

const char* to_string(Direction d);

}  // namespace quizcram::analytics
