#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/event_log.hpp"
#include "quizcram/mastery_scheduler.hpp"
#include "quizcram/watch_tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace quizcram::service {

enum class Mode { initial_pass, review };

struct Session {
    std::string session_id;
    std::string user_id;
    std::string course_id;
    std::string current_question_id;
    Mode mode = Mode::initial_pass;
    std::int64_t created_at_ms = 0;

    bool operator==(const Session&) const = default;
};

struct TimelineEntry {
    std::string question_id;
    std::string prompt;
    bool answered_correctly = false;
    double latest_score = 0.0;
    std::vector<std::string> segment_refs;
    std::map<std::string, int> resume_position_s;  // by video id
    std::int64_t answered_at_ms = 0;

    bool operator==(const TimelineEntry&) const = default;
};

struct AnswerResult {
    double score = 0.0;
    bool correct = false;   // every option position matched
    bool advanced = false;  // the session moved to a new current question
    Session next;
};

enum class WatchAction { play, pause, seek, heartbeat };

// Newest first: one entry per question that has been answered well enough to
// advance, ordered by that question's latest attempt.
std::vector<TimelineEntry> build_timeline(const StudyState& state);

struct ServiceConfig {
    SchedulerConfig scheduler;
    std::filesystem::path storage_dir = "quizcram-data";
    std::string listen_address = "127.0.0.1";
    int port = 8080;
    std::vector<std::filesystem::path> course_files;

    // Relative paths resolve against the config file's directory.
    static ServiceConfig load(const std::filesystem::path& path);
};

using Clock = std::function<std::int64_t()>;

std::int64_t system_clock_ms();

// Session engine behind the HTTP API. All state lives in the event log; the
// in-memory StudyState per (user, course) is a cache of replay(log). Commands
// for one user are serialized; different users proceed concurrently.
class StudyService {
public:
    StudyService(SchedulerConfig cfg, EventLog log, Clock clock = system_clock_ms);
    ~StudyService();

    StudyService(const StudyService&) = delete;
    StudyService& operator=(const StudyService&) = delete;

    void add_course(std::shared_ptr<const Course> course);
    std::shared_ptr<const Course> course(const std::string& course_id) const;
    const SchedulerConfig& config() const { return cfg_; }

    Session start_session(const std::string& user_id, const std::string& course_id);
    Session session(const std::string& session_id) const;
    Question current_question(const std::string& session_id) const;

    // Throws ConflictError when question_id is not the current question.
    AnswerResult submit_answer(const std::string& session_id, const std::string& question_id,
                               const std::vector<bool>& selected);

    // The action happens at to_s; from_s is where the reported span began
    // (play: from_s == to_s). Returns fresh regions for the progress bar.
    std::vector<CoverageRegion> report_watch(const std::string& session_id, const std::string& video_id, int from_s,
                                             int to_s, WatchAction action);

    std::vector<TimelineEntry> get_timeline(const std::string& session_id) const;

    // Throws PassIncompleteError before the initial pass is done.
    std::vector<MasteryScore> get_review(const std::string& session_id) const;

    std::optional<int> get_skip_target(const std::string& session_id, const std::string& video_id,
                                       int position_s) const;

    // The learner used the skip button at position_s; logs it and returns the target.
    int confirm_skip(const std::string& session_id, const std::string& video_id, int position_s);

    void expand_timeline(const std::string& session_id, const std::string& question_id);

    StudyState state_snapshot(const std::string& session_id) const;
    const EventLog& log() const { return log_; }

private:
    struct UserSlot;
    struct SessionRecord {
        std::string session_id;
        std::string user_id;
        std::string course_id;
        std::int64_t created_at_ms = 0;
    };

    SessionRecord record(const std::string& session_id) const;
    UserSlot& slot(const std::string& user_id) const;
    StudyState& state_for(UserSlot& slot, const std::string& user_id, const std::shared_ptr<const Course>& course) const;
    std::int64_t now_for(const std::string& user_id) const;
    void emit(UserSlot& slot, StudyState& state, const SessionRecord& session, EventPayload payload);
    Session view(const SessionRecord& rec, const StudyState& state) const;

    SchedulerConfig cfg_;
    EventLog log_;
    Clock clock_;

    struct Shared;
    std::unique_ptr<Shared> shared_;
};

const char* to_string(Mode m);
const char* to_string(WatchAction a);
std::optional<WatchAction> watch_action_from_string(const std::string& s);

}  // namespace quizcram::service
