#include "quizcram/course_model.hpp"

#include "quizcram/errors.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace quizcram {

std::vector<AnswerOption> self_rating_options() {
    return {
        {"1 - Not at all", false},
        {"2 - Slightly", false},
        {"3 - Moderately", false},
        {"4 - Mostly", false},
        {"5 - Completely", false},
    };
}

std::string segment_id_for(const std::string& video_id, int start_s) {
    return video_id + "@" + std::to_string(start_s);
}

std::string question_id_for(const std::string& video_id, int start_s) {
    return "q/" + segment_id_for(video_id, start_s);
}

const char* to_string(QuestionKind kind) {
    switch (kind) {
        case QuestionKind::original:
            return "original";
        case QuestionKind::extra:
            return "extra";
        case QuestionKind::generic_self_assessment:
            return "generic_self_assessment";
    }
    return "original";
}

std::optional<QuestionKind> question_kind_from_string(const std::string& s) {
    if (s == "original") return QuestionKind::original;
    if (s == "extra") return QuestionKind::extra;
    if (s == "generic_self_assessment") return QuestionKind::generic_self_assessment;
    return std::nullopt;
}

namespace {

std::vector<std::string> unit_order(const InVideoQuizCourse& src) {
    if (!src.units.empty()) {
        std::set<std::string> seen;
        for (const auto& u : src.units) {
            if (!seen.insert(u).second) {
                throw ValidationError("duplicate unit id '" + u + "'");
            }
        }
        return src.units;
    }
    std::vector<std::string> units;
    for (const auto& v : src.videos) {
        if (std::find(units.begin(), units.end(), v.unit_id) == units.end()) {
            units.push_back(v.unit_id);
        }
    }
    return units;
}

}  // namespace

CourseManifest convert_course(const InVideoQuizCourse& src) {
    if (src.course_id.empty()) {
        throw ValidationError("course_id is empty");
    }

    CourseManifest out;
    out.course_id = src.course_id;
    out.units = unit_order(src);

    std::map<std::string, std::size_t> unit_rank;
    for (std::size_t i = 0; i < out.units.size(); ++i) unit_rank[out.units[i]] = i;

    std::map<std::string, const Video*> videos;
    std::set<std::pair<std::string, int>> unit_slots;
    for (const auto& v : src.videos) {
        if (v.video_id.empty()) throw ValidationError("video with empty video_id");
        if (!videos.emplace(v.video_id, &v).second) {
            throw ValidationError("duplicate video id '" + v.video_id + "'");
        }
        if (v.duration_s <= 0) {
            throw ValidationError("video '" + v.video_id + "' has non-positive duration");
        }
        if (!unit_rank.contains(v.unit_id)) {
            throw ValidationError("video '" + v.video_id + "' references unknown unit '" + v.unit_id + "'");
        }
        if (!unit_slots.emplace(v.unit_id, v.order_index).second) {
            throw ValidationError("video '" + v.video_id + "' repeats order_index " +
                                  std::to_string(v.order_index) + " within unit '" + v.unit_id + "'");
        }
    }

    std::map<std::string, std::map<int, const InVideoQuiz*>> quizzes_by_video;
    for (const auto& quiz : src.quizzes) {
        auto it = videos.find(quiz.video_id);
        if (it == videos.end()) {
            throw ValidationError("quiz references unknown video '" + quiz.video_id + "'");
        }
        if (quiz.position_s <= 0 || quiz.position_s > it->second->duration_s) {
            throw ValidationError("quiz at " + std::to_string(quiz.position_s) + " s is outside video '" +
                                  quiz.video_id + "' (duration " + std::to_string(it->second->duration_s) + " s)");
        }
        if (quiz.question.kind == QuestionKind::generic_self_assessment) {
            throw ValidationError("quiz at " + std::to_string(quiz.position_s) + " s in video '" + quiz.video_id +
                                  "' cannot be a generic self-assessment question");
        }
        if (quiz.question.options.empty()) {
            throw ValidationError("quiz at " + std::to_string(quiz.position_s) + " s in video '" + quiz.video_id +
                                  "' has no options");
        }
        if (!quizzes_by_video[quiz.video_id].emplace(quiz.position_s, &quiz).second) {
            throw ValidationError("duplicate quiz position " + std::to_string(quiz.position_s) + " s in video '" +
                                  quiz.video_id + "'");
        }
    }

    std::vector<const Video*> ordered;
    ordered.reserve(src.videos.size());
    for (const auto& v : src.videos) ordered.push_back(&v);
    std::sort(ordered.begin(), ordered.end(), [&](const Video* a, const Video* b) {
        const auto ra = unit_rank.at(a->unit_id);
        const auto rb = unit_rank.at(b->unit_id);
        if (ra != rb) return ra < rb;
        return a->order_index < b->order_index;
    });

    int next_order = 0;
    for (const Video* v : ordered) {
        out.videos.push_back(*v);

        std::vector<int> bounds{0};
        const auto& quizzes = quizzes_by_video[v->video_id];
        for (const auto& [pos, _] : quizzes) bounds.push_back(pos);
        if (bounds.back() != v->duration_s) bounds.push_back(v->duration_s);

        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            Segment seg{segment_id_for(v->video_id, bounds[i]), v->video_id, bounds[i], bounds[i + 1]};

            Question q;
            q.question_id = question_id_for(v->video_id, seg.start_s);
            q.segment_refs = {seg.segment_id};
            q.order_index = next_order++;
            if (auto it = quizzes.find(seg.end_s); it != quizzes.end()) {
                q.prompt = it->second->question.prompt;
                q.options = it->second->question.options;
                q.kind = it->second->question.kind;
            } else {
                q.prompt = kGenericPrompt;
                q.options = self_rating_options();
                q.kind = QuestionKind::generic_self_assessment;
            }

            out.segments.push_back(std::move(seg));
            out.questions.push_back(std::move(q));
        }
    }
    return out;
}

std::vector<Violation> validate_manifest(const CourseManifest& m) {
    std::vector<Violation> out;
    auto flag = [&](std::string entity, std::string rule, std::string message) {
        out.push_back({std::move(entity), std::move(rule), std::move(message)});
    };

    if (m.course_id.empty()) flag("course", "course_id_present", "course_id is empty");

    std::set<std::string> units;
    for (const auto& u : m.units) {
        if (!units.insert(u).second) flag("unit " + u, "unique_unit_id", "unit id appears more than once");
    }

    std::map<std::string, const Video*> videos;
    std::set<std::pair<std::string, int>> unit_slots;
    for (const auto& v : m.videos) {
        const std::string entity = "video " + v.video_id;
        if (!videos.emplace(v.video_id, &v).second) {
            flag(entity, "unique_video_id", "video id appears more than once");
        }
        if (v.duration_s <= 0) flag(entity, "positive_duration", "duration_s must be > 0");
        if (!units.contains(v.unit_id)) {
            flag(entity, "unit_resolves", "unit '" + v.unit_id + "' is not listed in units");
        }
        if (!unit_slots.emplace(v.unit_id, v.order_index).second) {
            flag(entity, "unique_order_in_unit",
                 "order_index " + std::to_string(v.order_index) + " repeats within unit '" + v.unit_id + "'");
        }
    }

    std::map<std::string, const Segment*> segments;
    std::map<std::string, std::vector<const Segment*>> by_video;
    for (const auto& s : m.segments) {
        const std::string entity = "segment " + s.segment_id;
        if (!segments.emplace(s.segment_id, &s).second) {
            flag(entity, "unique_segment_id", "segment id appears more than once");
        }
        auto vit = videos.find(s.video_id);
        if (vit == videos.end()) {
            flag(entity, "video_resolves", "video '" + s.video_id + "' does not exist");
            continue;
        }
        if (s.start_s < 0 || s.start_s >= s.end_s || s.end_s > vit->second->duration_s) {
            flag(entity, "segment_bounds",
                 "[" + std::to_string(s.start_s) + "," + std::to_string(s.end_s) + ") is not within [0," +
                     std::to_string(vit->second->duration_s) + ")");
            continue;
        }
        by_video[s.video_id].push_back(&s);
    }

    for (const auto& v : m.videos) {
        auto& segs = by_video[v.video_id];
        if (segs.empty()) {
            flag("video " + v.video_id, "segment_coverage", "video has no segments");
            continue;
        }
        std::sort(segs.begin(), segs.end(), [](const Segment* a, const Segment* b) {
            return a->start_s != b->start_s ? a->start_s < b->start_s : a->end_s < b->end_s;
        });
        const Segment* reach = nullptr;  // segment with the furthest end so far
        int covered_to = 0;
        for (const Segment* s : segs) {
            if (reach && s->start_s < covered_to) {
                flag("segment " + reach->segment_id + ", segment " + s->segment_id, "segments_disjoint",
                     "segments overlap on [" + std::to_string(s->start_s) + "," +
                         std::to_string(std::min(covered_to, s->end_s)) + ")");
            } else if (s->start_s > covered_to) {
                flag("video " + v.video_id, "segment_coverage",
                     "seconds [" + std::to_string(covered_to) + "," + std::to_string(s->start_s) +
                         ") are not covered by any segment");
            }
            if (!reach || s->end_s > covered_to) {
                reach = s;
                covered_to = s->end_s;
            }
        }
        if (covered_to < v.duration_s) {
            flag("video " + v.video_id, "segment_coverage",
                 "seconds [" + std::to_string(covered_to) + "," + std::to_string(v.duration_s) +
                     ") are not covered by any segment");
        }
    }

    std::set<std::string> question_ids;
    std::set<int> order_indices;
    std::map<std::string, int> focus_count;
    const auto rating = self_rating_options();
    for (const auto& q : m.questions) {
        const std::string entity = "question " + q.question_id;
        if (!question_ids.insert(q.question_id).second) {
            flag(entity, "unique_question_id", "question id appears more than once");
        }
        if (!order_indices.insert(q.order_index).second) {
            flag(entity, "unique_order_index", "order_index " + std::to_string(q.order_index) + " repeats");
        }
        if (q.segment_refs.empty()) {
            flag(entity, "segment_refs_nonempty", "question references no segments");
        }
        for (const auto& ref : q.segment_refs) {
            if (!segments.contains(ref)) {
                flag(entity, "segment_resolves", "segment '" + ref + "' does not exist");
            }
        }
        if (!q.segment_refs.empty() && segments.contains(q.segment_refs.back())) {
            ++focus_count[q.segment_refs.back()];
        }
        if (q.kind == QuestionKind::generic_self_assessment) {
            if (q.options != rating) {
                flag(entity, "self_rating_options", "generic question must carry the fixed self-rating scale");
            }
        } else if (q.options.empty()) {
            flag(entity, "options_nonempty", "question has no options");
        }
    }

    for (const auto& s : m.segments) {
        const int n = focus_count[s.segment_id];
        if (n != 1) {
            flag("segment " + s.segment_id, "single_focus_question",
                 "segment is the focus of " + std::to_string(n) + " questions, expected 1");
        }
    }
    return out;
}

Course::Course(CourseManifest manifest) : manifest_(std::move(manifest)) {
    for (std::size_t i = 0; i < manifest_.videos.size(); ++i) videos_[manifest_.videos[i].video_id] = i;
    for (std::size_t i = 0; i < manifest_.segments.size(); ++i) segments_[manifest_.segments[i].segment_id] = i;
    for (std::size_t i = 0; i < manifest_.questions.size(); ++i) {
        questions_[manifest_.questions[i].question_id] = i;
        ordered_.push_back(&manifest_.questions[i]);
    }
    std::sort(ordered_.begin(), ordered_.end(),
              [](const Question* a, const Question* b) { return a->order_index < b->order_index; });
}

std::shared_ptr<const Course> Course::build(CourseManifest manifest) {
    const auto violations = validate_manifest(manifest);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid course manifest '" << manifest.course_id << "':";
        for (const auto& v : violations) msg << "\n  " << v.entity << ": " << v.message << " [" << v.rule << "]";
        throw ValidationError(msg.str());
    }
    return std::shared_ptr<const Course>(new Course(std::move(manifest)));
}

const Video* Course::find_video(const std::string& id) const {
    auto it = videos_.find(id);
    return it == videos_.end() ? nullptr : &manifest_.videos[it->second];
}

const Segment* Course::find_segment(const std::string& id) const {
    auto it = segments_.find(id);
    return it == segments_.end() ? nullptr : &manifest_.segments[it->second];
}

const Question* Course::find_question(const std::string& id) const {
    auto it = questions_.find(id);
    return it == questions_.end() ? nullptr : &manifest_.questions[it->second];
}

const Video& Course::video(const std::string& id) const {
    if (const auto* v = find_video(id)) return *v;
    throw NotFoundError("unknown video '" + id + "'");
}

const Segment& Course::segment(const std::string& id) const {
    if (const auto* s = find_segment(id)) return *s;
    throw NotFoundError("unknown segment '" + id + "'");
}

const Question& Course::question(const std::string& id) const {
    if (const auto* q = find_question(id)) return *q;
    throw NotFoundError("unknown question '" + id + "'");
}

const std::string& Course::unit_of(const Question& q) const {
    return video(segment(q.segment_refs.back()).video_id).unit_id;
}

}  // namespace quizcram
