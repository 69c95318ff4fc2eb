#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/mastery_scheduler.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace quizcram {

// Longest playhead span a single heartbeat may report.
inline constexpr int kMaxHeartbeatSpanS = 5;

enum class EventKind {
    session_start,
    question_shown,
    answer_submit,
    video_play,
    video_pause,
    video_seek,
    video_heartbeat,
    timeline_expand,
    skip_unseen_click,
};

inline constexpr std::size_t kEventKindCount = 9;

namespace event {

struct SessionStart {
    std::string session_id;
    std::string course_id;
    bool operator==(const SessionStart&) const = default;
};
struct QuestionShown {
    std::string question_id;
    bool operator==(const QuestionShown&) const = default;
};
struct AnswerSubmit {
    std::string question_id;
    std::vector<bool> selected;
    double score = 0.0;
    bool operator==(const AnswerSubmit&) const = default;
};
struct VideoPlay {
    std::string video_id;
    int position_s = 0;
    bool operator==(const VideoPlay&) const = default;
};
struct VideoPause {
    std::string video_id;
    int position_s = 0;
    bool operator==(const VideoPause&) const = default;
};
struct VideoSeek {
    std::string video_id;
    int from_s = 0;
    int to_s = 0;
    bool operator==(const VideoSeek&) const = default;
};
// Playback covered [from_s, to_s) and is still running at to_s.
struct VideoHeartbeat {
    std::string video_id;
    int from_s = 0;
    int to_s = 0;
    bool operator==(const VideoHeartbeat&) const = default;
};
struct TimelineExpand {
    std::string question_id;
    bool operator==(const TimelineExpand&) const = default;
};
struct SkipUnseenClick {
    std::string video_id;
    int from_s = 0;
    int to_s = 0;
    bool operator==(const SkipUnseenClick&) const = default;
};

}  // namespace event

// Alternative order matches EventKind.
using EventPayload = std::variant<event::SessionStart, event::QuestionShown, event::AnswerSubmit, event::VideoPlay,
                                  event::VideoPause, event::VideoSeek, event::VideoHeartbeat, event::TimelineExpand,
                                  event::SkipUnseenClick>;

struct InteractionEvent {
    std::uint64_t event_id = 0;
    std::string user_id;
    std::int64_t at_ms = 0;
    EventPayload payload;

    EventKind kind() const { return static_cast<EventKind>(payload.index()); }
    bool operator==(const InteractionEvent&) const = default;
};

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(const std::string& s);

// Throws ValidationError if a required payload field is empty or out of range.
void check_payload(const InteractionEvent& ev);

// Append-only per-user event streams. With a storage directory, each user's
// events go to <dir>/<user>/<first-event-id>_<session>.jsonl, one record per
// line followed by a record-count footer; a session_start opens a new file.
// Thread-safe; appends for one user are serialized.
class EventLog {
public:
    // In-memory only.
    EventLog();
    // Loads every existing log under `dir` and persists new appends there.
    explicit EventLog(const std::filesystem::path& dir);
    ~EventLog();

    EventLog(EventLog&&) noexcept;
    EventLog& operator=(EventLog&&) noexcept;

    // Throws ValidationError on a non-increasing event id, a timestamp that
    // goes backwards, or an incomplete payload.
    void append(const InteractionEvent& ev);

    std::vector<InteractionEvent> events(const std::string& user_id) const;
    std::vector<std::string> users() const;
    std::optional<InteractionEvent> last_event(const std::string& user_id) const;

    std::optional<std::filesystem::path> directory() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Parses one log file and checks its footer. Throws LogFormatError.
std::vector<InteractionEvent> read_log_file(const std::filesystem::path& path);

// Every *.jsonl file below `dir`, grouped by user and ordered by event id.
std::map<std::string, std::vector<InteractionEvent>> read_log_directory(const std::filesystem::path& dir);

struct EventCounts {
    std::map<EventKind, std::size_t> per_kind;  // every kind present, zero if unseen
    std::map<std::string, std::size_t> attempts_per_question;
    std::size_t answer_attempts = 0;
    std::size_t correct_attempts = 0;
    double correct_rate = 0.0;  // correct_attempts / answer_attempts, 0 with no attempts
    std::size_t seeks = 0;
    std::size_t timeline_expansions = 0;

    bool operator==(const EventCounts&) const = default;
};

EventCounts event_counts(std::span<const InteractionEvent> events);
EventCounts event_counts(const EventLog& log, const std::string& user_id);

// Applies one event to the state. Throws ValidationError naming the event when
// it references something missing from the course or out of bounds.
void apply_event(StudyState& state, const InteractionEvent& ev);

// Folds the user's events into a fresh state. Events after a session_start
// for a different course are skipped.
StudyState replay(std::span<const InteractionEvent> events, const std::string& user_id,
                  std::shared_ptr<const Course> course);
StudyState replay(const EventLog& log, const std::string& user_id, std::shared_ptr<const Course> course);

}  // namespace quizcram
