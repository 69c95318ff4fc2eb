#include "quizcram/errors.hpp"
#include "quizcram/event_log.hpp"

namespace quizcram {

namespace {

class Applier {
public:
    Applier(StudyState& state, const InteractionEvent& ev) : state_(state), ev_(ev) {}

    void operator()(const event::SessionStart&) const {
        // A new session means a new player; spans left open by the old one are dropped.
        state_.open_playback.clear();
    }

    void operator()(const event::QuestionShown& p) const {
        question(p.question_id);
        state_.current_question_id = p.question_id;
    }

    void operator()(const event::AnswerSubmit& p) const {
        const Question& q = question(p.question_id);
        if (p.selected.size() != q.options.size()) {
            fail("selection has " + std::to_string(p.selected.size()) + " entries, question '" + q.question_id +
                 "' has " + std::to_string(q.options.size()) + " options");
        }
        state_.record_attempt({ev_.user_id, p.question_id, ev_.at_ms, p.selected, p.score, ev_.event_id});
    }

    void operator()(const event::VideoPlay& p) const {
        auto open = open_span(p.video_id);
        playback_play(coverage(p.video_id, {p.position_s}), open, p.position_s);
        store_span(p.video_id, open);
    }

    void operator()(const event::VideoHeartbeat& p) const {
        auto open = open_span(p.video_id);
        playback_heartbeat(coverage(p.video_id, {p.from_s, p.to_s}), open, p.from_s, p.to_s);
        store_span(p.video_id, open);
    }

    void operator()(const event::VideoPause& p) const {
        auto open = open_span(p.video_id);
        playback_pause(coverage(p.video_id, {p.position_s}), open, p.position_s);
        store_span(p.video_id, open);
    }

    void operator()(const event::VideoSeek& p) const {
        auto open = open_span(p.video_id);
        playback_seek(coverage(p.video_id, {p.from_s, p.to_s}), open, p.from_s, p.to_s);
        store_span(p.video_id, open);
    }

    void operator()(const event::TimelineExpand& p) const { question(p.question_id); }

    void operator()(const event::SkipUnseenClick& p) const { coverage(p.video_id, {p.from_s, p.to_s}); }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError("event " + std::to_string(ev_.event_id) + " (" + to_string(ev_.kind()) +
                              ") for user '" + ev_.user_id + "': " + what);
    }

    const Question& question(const std::string& id) const {
        const auto* q = state_.course->find_question(id);
        if (!q) fail("unknown question '" + id + "'");
        return *q;
    }

    WatchCoverage& coverage(const std::string& video_id, std::initializer_list<int> positions) const {
        const auto* v = state_.course->find_video(video_id);
        if (!v) fail("unknown video '" + video_id + "'");
        for (int p : positions) {
            if (p < 0 || p > v->duration_s) {
                fail("position " + std::to_string(p) + " is outside video '" + video_id + "'");
            }
        }
        return state_.coverage_for(video_id);
    }

    std::optional<int> open_span(const std::string& video_id) const {
        auto it = state_.open_playback.find(video_id);
        if (it == state_.open_playback.end()) return std::nullopt;
        return it->second;
    }

    void store_span(const std::string& video_id, std::optional<int> open) const {
        if (open) {
            state_.open_playback[video_id] = *open;
        } else {
            state_.open_playback.erase(video_id);
        }
    }

    StudyState& state_;
    const InteractionEvent& ev_;
};

}  // namespace

void apply_event(StudyState& state, const InteractionEvent& ev) {
    if (ev.user_id != state.user_id) {
        throw ValidationError("event " + std::to_string(ev.event_id) + " belongs to user '" + ev.user_id +
                              "', not '" + state.user_id + "'");
    }
    std::visit(Applier(state, ev), ev.payload);
}

StudyState replay(std::span<const InteractionEvent> events, const std::string& user_id,
                  std::shared_ptr<const Course> course) {
    StudyState state(user_id, std::move(course));
    bool in_course = true;
    for (const auto& ev : events) {
        if (ev.user_id != user_id) continue;
        if (const auto* start = std::get_if<event::SessionStart>(&ev.payload)) {
            in_course = start->course_id == state.course->id();
        }
        if (in_course) apply_event(state, ev);
    }
    return state;
}

StudyState replay(const EventLog& log, const std::string& user_id, std::shared_ptr<const Course> course) {
    const auto events = log.events(user_id);
    return replay(events, user_id, std::move(course));
}

}  // namespace quizcram
