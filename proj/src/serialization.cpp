#include "quizcram/serialization.hpp"

#include "quizcram/errors.hpp"

#include <fstream>
#include <sstream>

namespace quizcram {

namespace {

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.is_object()) throw ValidationError(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("field '") + key + "': " + e.what());
    }
}

template <typename T>
T optional_field(const Json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return field<T>(j, key);
}

QuestionKind kind_field(const Json& j, QuestionKind fallback) {
    auto it = j.find("kind");
    if (it == j.end()) return fallback;
    const auto name = field<std::string>(j, "kind");
    if (auto k = question_kind_from_string(name)) return *k;
    throw ValidationError("unknown question kind '" + name + "'");
}

}  // namespace

void to_json(Json& j, const AnswerOption& o) { j = Json{{"text", o.text}, {"correct", o.correct}}; }

void from_json(const Json& j, AnswerOption& o) {
    o.text = field<std::string>(j, "text");
    o.correct = field<bool>(j, "correct");
}

void to_json(Json& j, const Video& v) {
    j = Json{{"video_id", v.video_id}, {"title", v.title},       {"duration_s", v.duration_s},
             {"unit_id", v.unit_id},   {"order_index", v.order_index}};
    if (!v.url.empty()) j["url"] = v.url;
}

void from_json(const Json& j, Video& v) {
    v.video_id = field<std::string>(j, "video_id");
    v.title = optional_field<std::string>(j, "title", "");
    v.duration_s = field<int>(j, "duration_s");
    v.unit_id = field<std::string>(j, "unit_id");
    v.order_index = field<int>(j, "order_index");
    v.url = optional_field<std::string>(j, "url", "");
}

void to_json(Json& j, const Segment& s) {
    j = Json{{"segment_id", s.segment_id}, {"video_id", s.video_id}, {"start_s", s.start_s}, {"end_s", s.end_s}};
}

void from_json(const Json& j, Segment& s) {
    s.segment_id = field<std::string>(j, "segment_id");
    s.video_id = field<std::string>(j, "video_id");
    s.start_s = field<int>(j, "start_s");
    s.end_s = field<int>(j, "end_s");
}

void to_json(Json& j, const Question& q) {
    j = Json{{"question_id", q.question_id},   {"prompt", q.prompt},         {"options", q.options},
             {"segment_refs", q.segment_refs}, {"kind", to_string(q.kind)}, {"order_index", q.order_index}};
}

void from_json(const Json& j, Question& q) {
    q.question_id = field<std::string>(j, "question_id");
    q.prompt = field<std::string>(j, "prompt");
    q.options = field<std::vector<AnswerOption>>(j, "options");
    q.segment_refs = field<std::vector<std::string>>(j, "segment_refs");
    q.kind = kind_field(j, QuestionKind::original);
    q.order_index = field<int>(j, "order_index");
}

void to_json(Json& j, const CourseManifest& m) {
    j = Json{{"course_id", m.course_id}, {"units", m.units},         {"videos", m.videos},
             {"segments", m.segments},   {"questions", m.questions}};
}

void from_json(const Json& j, CourseManifest& m) {
    m.course_id = field<std::string>(j, "course_id");
    m.units = field<std::vector<std::string>>(j, "units");
    m.videos = field<std::vector<Video>>(j, "videos");
    m.segments = field<std::vector<Segment>>(j, "segments");
    m.questions = field<std::vector<Question>>(j, "questions");
}

void to_json(Json& j, const InVideoQuizCourse& c) {
    Json quizzes = Json::array();
    for (const auto& q : c.quizzes) {
        quizzes.push_back(Json{{"video_id", q.video_id},
                               {"position_s", q.position_s},
                               {"question",
                                Json{{"prompt", q.question.prompt},
                                     {"options", q.question.options},
                                     {"kind", to_string(q.question.kind)}}}});
    }
    j = Json{{"course_id", c.course_id}, {"videos", c.videos}, {"quizzes", quizzes}};
    if (!c.units.empty()) j["units"] = c.units;
}

void from_json(const Json& j, InVideoQuizCourse& c) {
    c.course_id = field<std::string>(j, "course_id");
    c.units = optional_field<std::vector<std::string>>(j, "units", {});
    c.videos = field<std::vector<Video>>(j, "videos");
    c.quizzes.clear();
    for (const auto& q : field<Json>(j, "quizzes")) {
        InVideoQuiz quiz;
        quiz.video_id = field<std::string>(q, "video_id");
        quiz.position_s = field<int>(q, "position_s");
        const auto body = field<Json>(q, "question");
        quiz.question.prompt = field<std::string>(body, "prompt");
        quiz.question.options = field<std::vector<AnswerOption>>(body, "options");
        quiz.question.kind = kind_field(body, QuestionKind::original);
        c.quizzes.push_back(std::move(quiz));
    }
}

void to_json(Json& j, const Violation& v) { j = Json{{"entity", v.entity}, {"rule", v.rule}, {"message", v.message}}; }

void to_json(Json& j, const SchedulerConfig& c) {
    j = Json{{"performance_weight", c.performance_weight},
             {"watched_weight", c.watched_weight},
             {"recency_weight", c.recency_weight},
             {"history_decay", c.history_decay},
             {"recency_halflife_ms", c.recency_halflife_ms},
             {"review_list_length", c.review_list_length}};
}

void from_json(const Json& j, SchedulerConfig& c) {
    const SchedulerConfig d;
    c.performance_weight = optional_field<double>(j, "performance_weight", d.performance_weight);
    c.watched_weight = optional_field<double>(j, "watched_weight", d.watched_weight);
    c.recency_weight = optional_field<double>(j, "recency_weight", d.recency_weight);
    c.history_decay = optional_field<double>(j, "history_decay", d.history_decay);
    c.recency_halflife_ms = optional_field<std::int64_t>(j, "recency_halflife_ms", d.recency_halflife_ms);
    c.review_list_length = optional_field<std::size_t>(j, "review_list_length", d.review_list_length);
}

void to_json(Json& j, const MasteryScore& m) {
    j = Json{{"question_id", m.question_id}, {"performance", m.performance}, {"watched", m.watched},
             {"recency", m.recency},         {"combined", m.combined},       {"computed_at_ms", m.computed_at_ms}};
}

void to_json(Json& j, const CoverageRegion& r) {
    j = Json{{"from_s", r.interval.begin}, {"to_s", r.interval.end}, {"tag", to_string(r.tag)}};
}

namespace {

struct PayloadWriter {
    Json& j;
    void operator()(const event::SessionStart& p) const {
        j["session_id"] = p.session_id;
        j["course_id"] = p.course_id;
    }
    void operator()(const event::QuestionShown& p) const { j["question_id"] = p.question_id; }
    void operator()(const event::AnswerSubmit& p) const {
        j["question_id"] = p.question_id;
        j["selected"] = p.selected;
        j["score"] = p.score;
    }
    void operator()(const event::VideoPlay& p) const {
        j["video_id"] = p.video_id;
        j["position_s"] = p.position_s;
    }
    void operator()(const event::VideoPause& p) const {
        j["video_id"] = p.video_id;
        j["position_s"] = p.position_s;
    }
    void operator()(const event::VideoSeek& p) const { span(p.video_id, p.from_s, p.to_s); }
    void operator()(const event::VideoHeartbeat& p) const { span(p.video_id, p.from_s, p.to_s); }
    void operator()(const event::TimelineExpand& p) const { j["question_id"] = p.question_id; }
    void operator()(const event::SkipUnseenClick& p) const { span(p.video_id, p.from_s, p.to_s); }

    void span(const std::string& video, int from, int to) const {
        j["video_id"] = video;
        j["from_s"] = from;
        j["to_s"] = to;
    }
};

}  // namespace

void to_json(Json& j, const InteractionEvent& ev) {
    j = Json{{"event_id", ev.event_id}, {"user_id", ev.user_id}, {"at_ms", ev.at_ms}, {"kind", to_string(ev.kind())}};
    std::visit(PayloadWriter{j}, ev.payload);
}

void from_json(const Json& j, InteractionEvent& ev) {
    ev.event_id = field<std::uint64_t>(j, "event_id");
    ev.user_id = field<std::string>(j, "user_id");
    ev.at_ms = field<std::int64_t>(j, "at_ms");
    const auto kind_name = field<std::string>(j, "kind");
    const auto kind = event_kind_from_string(kind_name);
    if (!kind) throw ValidationError("unknown event kind '" + kind_name + "'");
    switch (*kind) {
        case EventKind::session_start:
            ev.payload = event::SessionStart{field<std::string>(j, "session_id"), field<std::string>(j, "course_id")};
            break;
        case EventKind::question_shown:
            ev.payload = event::QuestionShown{field<std::string>(j, "question_id")};
            break;
        case EventKind::answer_submit:
            ev.payload = event::AnswerSubmit{field<std::string>(j, "question_id"),
                                             field<std::vector<bool>>(j, "selected"), field<double>(j, "score")};
            break;
        case EventKind::video_play:
            ev.payload = event::VideoPlay{field<std::string>(j, "video_id"), field<int>(j, "position_s")};
            break;
        case EventKind::video_pause:
            ev.payload = event::VideoPause{field<std::string>(j, "video_id"), field<int>(j, "position_s")};
            break;
        case EventKind::video_seek:
            ev.payload =
                event::VideoSeek{field<std::string>(j, "video_id"), field<int>(j, "from_s"), field<int>(j, "to_s")};
            break;
        case EventKind::video_heartbeat:
            ev.payload = event::VideoHeartbeat{field<std::string>(j, "video_id"), field<int>(j, "from_s"),
                                               field<int>(j, "to_s")};
            break;
        case EventKind::timeline_expand:
            ev.payload = event::TimelineExpand{field<std::string>(j, "question_id")};
            break;
        case EventKind::skip_unseen_click:
            ev.payload = event::SkipUnseenClick{field<std::string>(j, "video_id"), field<int>(j, "from_s"),
                                                field<int>(j, "to_s")};
            break;
    }
}

void to_json(Json& j, const EventCounts& c) {
    Json kinds = Json::object();
    for (const auto& [kind, n] : c.per_kind) kinds[to_string(kind)] = n;
    j = Json{{"per_kind", kinds},
             {"attempts_per_question", c.attempts_per_question},
             {"answer_attempts", c.answer_attempts},
             {"correct_attempts", c.correct_attempts},
             {"correct_rate", c.correct_rate},
             {"seeks", c.seeks},
             {"timeline_expansions", c.timeline_expansions}};
}

namespace analytics {

namespace {
Json maybe(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
}  // namespace

void to_json(Json& j, const SeekStats& s) {
    j = Json{{"total_chains", s.total_chains},
             {"backward_chains", s.backward_chains},
             {"forward_chains", s.forward_chains},
             {"zero_displacement_chains", s.zero_displacement_chains},
             {"backward_from_quiz_fraction", maybe(s.backward_from_quiz_fraction)},
             {"forward_to_quiz_window_fraction", maybe(s.forward_to_quiz_window_fraction)},
             {"chains_not_crossing_quiz_fraction", maybe(s.chains_not_crossing_quiz_fraction)},
             {"per_quiz_backward_rate_ratio", maybe(s.per_quiz_backward_rate_ratio)},
             {"forward_cross_rate_ratio", maybe(s.forward_cross_rate_ratio)},
             {"rewatch_fraction", maybe(s.rewatch_fraction)}};
}

void to_json(Json& j, const SeekTally& t) {
    j = Json{{"total_chains", t.total_chains},
             {"backward_chains", t.backward_chains},
             {"forward_chains", t.forward_chains},
             {"zero_displacement_chains", t.zero_displacement_chains},
             {"backward_from_quiz", t.backward_from_quiz},
             {"forward_to_quiz_window", t.forward_to_quiz_window},
             {"crossing_chains", t.crossing_chains},
             {"forward_quiz_crossings", t.forward_quiz_crossings},
             {"forward_skipped_seconds", t.forward_skipped_seconds},
             {"quiz_count", t.quiz_count},
             {"duration_s", t.duration_s},
             {"finished_viewers", t.finished_viewers},
             {"rewatching_viewers", t.rewatching_viewers}};
}

}  // namespace analytics

std::string canonical_json(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << canonical_json(j);
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

CourseManifest load_manifest(const std::filesystem::path& path) {
    return parse_as<CourseManifest>(read_json_file(path), path.string());
}

InVideoQuizCourse load_invideo_course(const std::filesystem::path& path) {
    return parse_as<InVideoQuizCourse>(read_json_file(path), path.string());
}

}  // namespace quizcram
