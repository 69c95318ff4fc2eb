#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/watch_tracker.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace quizcram {

struct AttemptRecord {
    std::string user_id;
    std::string question_id;
    std::int64_t at_ms = 0;
    std::vector<bool> selected;
    double score = 0.0;
    // Event id of the submission; orders attempts that share a timestamp.
    std::uint64_t event_id = 0;

    bool operator==(const AttemptRecord&) const = default;
};

struct SchedulerConfig {
    double performance_weight = 0.5;
    double watched_weight = 0.3;
    double recency_weight = 0.2;
    // Weight ratio between consecutive attempts in the performance mean.
    double history_decay = 0.5;
    std::int64_t recency_halflife_ms = 6LL * 60 * 60 * 1000;
    std::size_t review_list_length = 5;

    // Throws ValidationError when weights don't sum to 1 or parameters are out of range.
    void validate() const;

    // Config with the given non-negative weights rescaled to sum to 1.
    SchedulerConfig with_weights(double performance, double watched, double recency) const;

    bool operator==(const SchedulerConfig&) const = default;
};

// Pluggable recency factor. Must return a value in [0,1]; 0 when never answered.
class RecencyModel {
public:
    virtual ~RecencyModel() = default;
    virtual double score(std::optional<std::int64_t> last_attempt_ms, std::int64_t now_ms) const = 0;
};

// tau / (tau + elapsed): 1 right after answering, 1/2 after one half-life.
class HyperbolicRecency final : public RecencyModel {
public:
    explicit HyperbolicRecency(std::int64_t halflife_ms);
    double score(std::optional<std::int64_t> last_attempt_ms, std::int64_t now_ms) const override;

private:
    std::int64_t halflife_ms_;
};

struct MasteryScore {
    std::string question_id;
    double performance = 0.0;
    double watched = 0.0;
    double recency = 0.0;
    double combined = 0.0;
    std::int64_t computed_at_ms = 0;

    bool operator==(const MasteryScore&) const = default;
};

// Everything known about one learner in one course. Rebuilt from the event log.
struct StudyState {
    std::string user_id;
    std::shared_ptr<const Course> course;
    std::map<std::string, std::vector<AttemptRecord>> attempts;  // oldest first
    std::map<std::string, WatchCoverage> coverage;                // by video id
    std::map<std::string, int> open_playback;                     // video id -> position playback started from
    std::map<std::string, bool> initial_pass_complete;            // by unit id
    std::optional<std::string> current_question_id;

    StudyState() = default;
    StudyState(std::string user, std::shared_ptr<const Course> c);

    std::size_t attempt_count(const std::string& question_id) const;
    const AttemptRecord* latest_attempt(const std::string& question_id) const;

    // Coverage for the video, created empty on first use.
    WatchCoverage& coverage_for(const std::string& video_id);
    const WatchCoverage* find_coverage(const std::string& video_id) const;

    void record_attempt(AttemptRecord attempt);
    void refresh_pass_flags();

    // True once every question in the course has at least one attempt.
    bool course_pass_complete() const;

    bool operator==(const StudyState& other) const;
};

// Fraction of option positions whose checked state matches the key. Generic
// self-assessment questions take exactly one selected level L and score (L-1)/4.
double score_attempt(const Question& q, const std::vector<bool>& selected);

// An attempt that moves the learner on: fully correct, or any valid
// self-assessment rating.
bool is_advancing(const Question& q, double score);

// Weighted mean of scores, most recent weight 1, each older one scaled by history_decay.
double performance_score(std::span<const AttemptRecord> history, const SchedulerConfig& cfg);

double recency_score(std::optional<std::int64_t> last_attempt_ms, std::int64_t now_ms, const SchedulerConfig& cfg);

MasteryScore mastery(const Question& q, const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                     const RecencyModel* recency = nullptr);

// During the initial pass: the lowest-order unattempted question. Afterwards:
// the lowest combined mastery, ties to the lower order_index.
std::string next_question(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                          const RecencyModel* recency = nullptr);

// Up to review_list_length scores, ascending by combined mastery then order_index.
// With a unit, ranks that unit's questions only. Throws PassIncompleteError if the
// pass over the unit (or whole course) is not complete.
std::vector<MasteryScore> review_ranking(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                                         const std::optional<std::string>& unit = std::nullopt,
                                         const RecencyModel* recency = nullptr);

std::vector<std::string> review_list(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                                     const std::optional<std::string>& unit = std::nullopt);

// #correct / max(requested, #given).
double grade_free_response(int requested, const std::vector<bool>& given_correct);

}  // namespace quizcram
