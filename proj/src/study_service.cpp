#include "quizcram/study_service.hpp"

#include "quizcram/errors.hpp"
#include "quizcram/serialization.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <shared_mutex>

namespace fs = std::filesystem;

namespace quizcram::service {

const char* to_string(Mode m) { return m == Mode::review ? "review" : "initial_pass"; }

const char* to_string(WatchAction a) {
    switch (a) {
        case WatchAction::play:
            return "play";
        case WatchAction::pause:
            return "pause";
        case WatchAction::seek:
            return "seek";
        case WatchAction::heartbeat:
            return "heartbeat";
    }
    return "play";
}

std::optional<WatchAction> watch_action_from_string(const std::string& s) {
    if (s == "play") return WatchAction::play;
    if (s == "pause") return WatchAction::pause;
    if (s == "seek") return WatchAction::seek;
    if (s == "heartbeat") return WatchAction::heartbeat;
    return std::nullopt;
}

namespace {

// A question left unanswered, or answered without advancing, stays current
// across sessions; otherwise the scheduler picks.
std::string resume_question(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms) {
    if (state.current_question_id) {
        if (const Question* q = state.course->find_question(*state.current_question_id)) {
            const AttemptRecord* last = state.latest_attempt(q->question_id);
            if (!last || !is_advancing(*q, last->score)) return q->question_id;
        }
    }
    return next_question(state, cfg, now_ms);
}

}  // namespace

std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

std::vector<TimelineEntry> build_timeline(const StudyState& state) {
    std::vector<std::pair<std::uint64_t, TimelineEntry>> keyed;
    for (const auto& [qid, history] : state.attempts) {
        const Question& q = state.course->question(qid);
        const bool ever_advanced = std::any_of(history.begin(), history.end(),
                                               [&](const AttemptRecord& a) { return is_advancing(q, a.score); });
        if (!ever_advanced) continue;
        const AttemptRecord& latest = history.back();

        TimelineEntry e;
        e.question_id = qid;
        e.prompt = q.prompt;
        e.answered_correctly = is_advancing(q, latest.score);
        e.latest_score = latest.score;
        e.segment_refs = q.segment_refs;
        e.answered_at_ms = latest.at_ms;
        for (const auto& ref : q.segment_refs) {
            const auto& video_id = state.course->segment(ref).video_id;
            const auto* cov = state.find_coverage(video_id);
            e.resume_position_s[video_id] = cov ? cov->last_position_s() : 0;
        }
        keyed.emplace_back(latest.event_id, std::move(e));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    std::vector<TimelineEntry> out;
    out.reserve(keyed.size());
    for (auto& [_, e] : keyed) out.push_back(std::move(e));
    return out;
}

ServiceConfig ServiceConfig::load(const fs::path& path) {
    const Json j = read_json_file(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : base / p; };

    ServiceConfig cfg;
    if (j.contains("scheduler")) cfg.scheduler = parse_as<SchedulerConfig>(j["scheduler"], "scheduler");
    cfg.scheduler.validate();
    if (j.contains("storage_dir")) cfg.storage_dir = resolve(parse_as<std::string>(j["storage_dir"], "storage_dir"));
    if (j.contains("listen_address")) cfg.listen_address = parse_as<std::string>(j["listen_address"], "listen_address");
    if (j.contains("port")) cfg.port = parse_as<int>(j["port"], "port");
    if (j.contains("courses")) {
        for (const auto& c : parse_as<std::vector<std::string>>(j["courses"], "courses")) {
            cfg.course_files.push_back(resolve(c));
        }
    }
    return cfg;
}

struct StudyService::UserSlot {
    std::mutex mutex;
    std::map<std::string, StudyState> states;  // by course id
    // Course of the user's most recent session_start in the log.
    std::optional<std::string> logged_course;
};

struct StudyService::Shared {
    mutable std::shared_mutex mutex;
    std::map<std::string, std::shared_ptr<const Course>> courses;
    std::map<std::string, SessionRecord> sessions;
    std::map<std::string, std::unique_ptr<UserSlot>> users;
};

StudyService::StudyService(SchedulerConfig cfg, EventLog log, Clock clock)
    : cfg_(std::move(cfg)), log_(std::move(log)), clock_(std::move(clock)), shared_(std::make_unique<Shared>()) {
    cfg_.validate();
}

StudyService::~StudyService() = default;

void StudyService::add_course(std::shared_ptr<const Course> course) {
    std::unique_lock lock(shared_->mutex);
    shared_->courses[course->id()] = std::move(course);
}

std::shared_ptr<const Course> StudyService::course(const std::string& course_id) const {
    std::shared_lock lock(shared_->mutex);
    auto it = shared_->courses.find(course_id);
    if (it == shared_->courses.end()) throw NotFoundError("unknown course '" + course_id + "'");
    return it->second;
}

StudyService::SessionRecord StudyService::record(const std::string& session_id) const {
    std::shared_lock lock(shared_->mutex);
    auto it = shared_->sessions.find(session_id);
    if (it == shared_->sessions.end()) throw NotFoundError("unknown session '" + session_id + "'");
    return it->second;
}

StudyService::UserSlot& StudyService::slot(const std::string& user_id) const {
    {
        std::shared_lock lock(shared_->mutex);
        if (auto it = shared_->users.find(user_id); it != shared_->users.end()) return *it->second;
    }
    std::unique_lock lock(shared_->mutex);
    auto& s = shared_->users[user_id];
    if (!s) {
        s = std::make_unique<UserSlot>();
        for (const auto& ev : log_.events(user_id)) {
            if (const auto* start = std::get_if<event::SessionStart>(&ev.payload)) s->logged_course = start->course_id;
        }
    }
    return *s;
}

StudyState& StudyService::state_for(UserSlot& s, const std::string& user_id,
                                    const std::shared_ptr<const Course>& course) const {
    auto it = s.states.find(course->id());
    if (it == s.states.end()) it = s.states.emplace(course->id(), replay(log_, user_id, course)).first;
    return it->second;
}

std::int64_t StudyService::now_for(const std::string& user_id) const {
    std::int64_t now = clock_();
    if (auto last = log_.last_event(user_id)) now = std::max(now, last->at_ms);
    return now;
}

void StudyService::emit(UserSlot& s, StudyState& state, const SessionRecord& session, EventPayload payload) {
    const bool starting = std::holds_alternative<event::SessionStart>(payload);
    if (!starting && s.logged_course != session.course_id) {
        // Another course's session started in between; re-open this one so
        // replay attributes the following events to the right course.
        emit(s, state, session, event::SessionStart{session.session_id, session.course_id});
    }
    InteractionEvent ev;
    const auto last = log_.last_event(session.user_id);
    ev.event_id = last ? last->event_id + 1 : 1;
    ev.user_id = session.user_id;
    ev.at_ms = now_for(session.user_id);
    ev.payload = std::move(payload);

    // Apply to a copy first so a rejected event leaves both log and state untouched.
    StudyState next = state;
    apply_event(next, ev);
    log_.append(ev);
    state = std::move(next);
    if (starting) s.logged_course = session.course_id;
}

Session StudyService::view(const SessionRecord& rec, const StudyState& state) const {
    return Session{rec.session_id, rec.user_id, rec.course_id, state.current_question_id.value_or(""),
                   state.course_pass_complete() ? Mode::review : Mode::initial_pass, rec.created_at_ms};
}

Session StudyService::start_session(const std::string& user_id, const std::string& course_id) {
    if (user_id.empty()) throw ValidationError("user_id is empty");
    auto c = course(course_id);
    auto& s = slot(user_id);
    std::lock_guard lock(s.mutex);
    StudyState& state = state_for(s, user_id, c);

    const auto last = log_.last_event(user_id);
    SessionRecord rec;
    rec.session_id = user_id + "-" + std::to_string(last ? last->event_id + 1 : 1);
    rec.user_id = user_id;
    rec.course_id = course_id;
    rec.created_at_ms = now_for(user_id);

    emit(s, state, rec, event::SessionStart{rec.session_id, course_id});
    emit(s, state, rec, event::QuestionShown{resume_question(state, cfg_, now_for(user_id))});
    {
        std::unique_lock shared_lock(shared_->mutex);
        shared_->sessions[rec.session_id] = rec;
    }
    return view(rec, state);
}

Session StudyService::session(const std::string& session_id) const {
    const auto rec = record(session_id);
    return view(rec, state_snapshot(session_id));
}

Question StudyService::current_question(const std::string& session_id) const {
    const auto s = session(session_id);
    return course(s.course_id)->question(s.current_question_id);
}

AnswerResult StudyService::submit_answer(const std::string& session_id, const std::string& question_id,
                                         const std::vector<bool>& selected) {
    const auto rec = record(session_id);
    auto c = course(rec.course_id);
    auto& s = slot(rec.user_id);
    std::lock_guard lock(s.mutex);
    StudyState& state = state_for(s, rec.user_id, c);

    const std::string current = state.current_question_id.value_or("");
    if (question_id != current) {
        throw ConflictError("question '" + question_id + "' is not the current question", current);
    }
    const Question& q = c->question(question_id);
    const double score = score_attempt(q, selected);
    emit(s, state, rec, event::AnswerSubmit{question_id, selected, score});

    AnswerResult result;
    result.score = score;
    result.correct = score == 1.0;
    if (is_advancing(q, score)) {
        const auto next = next_question(state, cfg_, now_for(rec.user_id));
        emit(s, state, rec, event::QuestionShown{next});
        result.advanced = next != question_id;
    }
    result.next = view(rec, state);
    return result;
}

std::vector<CoverageRegion> StudyService::report_watch(const std::string& session_id, const std::string& video_id,
                                                       int from_s, int to_s, WatchAction action) {
    const auto rec = record(session_id);
    auto c = course(rec.course_id);
    const Video& video = c->video(video_id);

    auto in_bounds = [&](int p) { return p >= 0 && p <= video.duration_s; };
    if (!in_bounds(from_s) || !in_bounds(to_s)) {
        throw ValidationError("watch report [" + std::to_string(from_s) + "," + std::to_string(to_s) +
                              "] is outside video '" + video_id + "'");
    }
    if (action != WatchAction::seek && from_s > to_s) {
        throw ValidationError("watch report runs backwards; use a seek");
    }
    if (action == WatchAction::heartbeat && to_s - from_s > kMaxHeartbeatSpanS) {
        throw ValidationError("heartbeat spans " + std::to_string(to_s - from_s) + " s; the limit is " +
                              std::to_string(kMaxHeartbeatSpanS) + " s");
    }

    auto& s = slot(rec.user_id);
    std::lock_guard lock(s.mutex);
    StudyState& state = state_for(s, rec.user_id, c);
    switch (action) {
        case WatchAction::play:
            emit(s, state, rec, event::VideoPlay{video_id, to_s});
            break;
        case WatchAction::pause:
            emit(s, state, rec, event::VideoPause{video_id, to_s});
            break;
        case WatchAction::seek:
            emit(s, state, rec, event::VideoSeek{video_id, from_s, to_s});
            break;
        case WatchAction::heartbeat:
            emit(s, state, rec, event::VideoHeartbeat{video_id, from_s, to_s});
            break;
    }

    std::optional<Interval> part;
    if (state.current_question_id) {
        for (const auto& ref : c->question(*state.current_question_id).segment_refs) {
            const Segment& seg = c->segment(ref);
            if (seg.video_id == video_id) part = Interval{seg.start_s, seg.end_s};
        }
    }
    return coverage_regions(state.coverage_for(video_id), part);
}

std::vector<TimelineEntry> StudyService::get_timeline(const std::string& session_id) const {
    return build_timeline(state_snapshot(session_id));
}

std::vector<MasteryScore> StudyService::get_review(const std::string& session_id) const {
    const auto rec = record(session_id);
    const auto state = state_snapshot(session_id);
    return review_ranking(state, cfg_, now_for(rec.user_id));
}

std::optional<int> StudyService::get_skip_target(const std::string& session_id, const std::string& video_id,
                                                 int position_s) const {
    const auto rec = record(session_id);
    const Video& video = course(rec.course_id)->video(video_id);
    const auto state = state_snapshot(session_id);
    if (const auto* cov = state.find_coverage(video_id)) return next_unseen(*cov, position_s);
    return next_unseen(WatchCoverage(rec.user_id, video_id, video.duration_s), position_s);
}

int StudyService::confirm_skip(const std::string& session_id, const std::string& video_id, int position_s) {
    const auto target = get_skip_target(session_id, video_id, position_s);
    if (!target) throw ValidationError("nothing unseen after " + std::to_string(position_s) + " s");
    const auto rec = record(session_id);
    auto c = course(rec.course_id);
    auto& s = slot(rec.user_id);
    std::lock_guard lock(s.mutex);
    emit(s, state_for(s, rec.user_id, c), rec, event::SkipUnseenClick{video_id, position_s, *target});
    return *target;
}

void StudyService::expand_timeline(const std::string& session_id, const std::string& question_id) {
    const auto rec = record(session_id);
    auto c = course(rec.course_id);
    c->question(question_id);
    auto& s = slot(rec.user_id);
    std::lock_guard lock(s.mutex);
    emit(s, state_for(s, rec.user_id, c), rec, event::TimelineExpand{question_id});
}

StudyState StudyService::state_snapshot(const std::string& session_id) const {
    const auto rec = record(session_id);
    auto c = course(rec.course_id);
    auto& s = slot(rec.user_id);
    std::lock_guard lock(s.mutex);
    return state_for(s, rec.user_id, c);
}

}  // namespace quizcram::service
