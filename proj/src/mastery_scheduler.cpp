#include "quizcram/mastery_scheduler.hpp"

#include "quizcram/errors.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace quizcram {

void SchedulerConfig::validate() const {
    for (double w : {performance_weight, watched_weight, recency_weight}) {
        if (!(w >= 0.0)) throw ValidationError("scheduler weights must be non-negative");
    }
    if (std::abs(performance_weight + watched_weight + recency_weight - 1.0) > 1e-9) {
        throw ValidationError("scheduler weights must sum to 1");
    }
    if (!(history_decay > 0.0 && history_decay <= 1.0)) {
        throw ValidationError("history_decay must be in (0, 1]");
    }
    if (recency_halflife_ms <= 0) throw ValidationError("recency_halflife_ms must be positive");
}

SchedulerConfig SchedulerConfig::with_weights(double performance, double watched, double recency) const {
    const double total = performance + watched + recency;
    if (!(total > 0.0) || performance < 0.0 || watched < 0.0 || recency < 0.0) {
        throw ValidationError("scheduler weights must be non-negative with a positive sum");
    }
    SchedulerConfig out = *this;
    out.performance_weight = performance / total;
    out.watched_weight = watched / total;
    out.recency_weight = recency / total;
    return out;
}

HyperbolicRecency::HyperbolicRecency(std::int64_t halflife_ms) : halflife_ms_(halflife_ms) {
    if (halflife_ms_ <= 0) throw ValidationError("recency half-life must be positive");
}

double HyperbolicRecency::score(std::optional<std::int64_t> last_attempt_ms, std::int64_t now_ms) const {
    if (!last_attempt_ms) return 0.0;
    if (now_ms < *last_attempt_ms) {
        throw ValidationError("recency evaluated before the last attempt");
    }
    const double tau = static_cast<double>(halflife_ms_);
    return tau / (tau + static_cast<double>(now_ms - *last_attempt_ms));
}

StudyState::StudyState(std::string user, std::shared_ptr<const Course> c)
    : user_id(std::move(user)), course(std::move(c)) {
    refresh_pass_flags();
}

std::size_t StudyState::attempt_count(const std::string& question_id) const {
    auto it = attempts.find(question_id);
    return it == attempts.end() ? 0 : it->second.size();
}

const AttemptRecord* StudyState::latest_attempt(const std::string& question_id) const {
    auto it = attempts.find(question_id);
    if (it == attempts.end() || it->second.empty()) return nullptr;
    return &it->second.back();
}

WatchCoverage& StudyState::coverage_for(const std::string& video_id) {
    auto it = coverage.find(video_id);
    if (it == coverage.end()) {
        const Video& v = course->video(video_id);
        it = coverage.emplace(video_id, WatchCoverage(user_id, video_id, v.duration_s)).first;
    }
    return it->second;
}

const WatchCoverage* StudyState::find_coverage(const std::string& video_id) const {
    auto it = coverage.find(video_id);
    return it == coverage.end() ? nullptr : &it->second;
}

void StudyState::record_attempt(AttemptRecord attempt) {
    const std::string id = attempt.question_id;
    attempts[id].push_back(std::move(attempt));
    refresh_pass_flags();
}

void StudyState::refresh_pass_flags() {
    initial_pass_complete.clear();
    if (!course) return;
    for (const auto& unit : course->manifest().units) initial_pass_complete[unit] = true;
    for (const Question* q : course->questions_in_order()) {
        if (attempt_count(q->question_id) == 0) initial_pass_complete[course->unit_of(*q)] = false;
    }
}

bool StudyState::course_pass_complete() const {
    return std::all_of(initial_pass_complete.begin(), initial_pass_complete.end(),
                       [](const auto& kv) { return kv.second; });
}

bool StudyState::operator==(const StudyState& other) const {
    const bool same_course = (!course && !other.course) || (course && other.course && course->id() == other.course->id());
    return same_course && user_id == other.user_id && attempts == other.attempts && coverage == other.coverage &&
           open_playback == other.open_playback && initial_pass_complete == other.initial_pass_complete &&
           current_question_id == other.current_question_id;
}

double score_attempt(const Question& q, const std::vector<bool>& selected) {
    if (selected.size() != q.options.size()) {
        throw ValidationError("question '" + q.question_id + "' has " + std::to_string(q.options.size()) +
                              " options but " + std::to_string(selected.size()) + " selections were given");
    }
    if (q.kind == QuestionKind::generic_self_assessment) {
        const auto picked = std::count(selected.begin(), selected.end(), true);
        if (picked != 1) {
            throw ValidationError("self-assessment question '" + q.question_id + "' needs exactly one rating");
        }
        const auto level = std::find(selected.begin(), selected.end(), true) - selected.begin() + 1;
        return static_cast<double>(level - 1) / static_cast<double>(selected.size() - 1);
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i] == q.options[i].correct) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(selected.size());
}

bool is_advancing(const Question& q, double score) {
    return q.kind == QuestionKind::generic_self_assessment || score == 1.0;
}

double performance_score(std::span<const AttemptRecord> history, const SchedulerConfig& cfg) {
    if (history.empty()) return 0.0;
    // Walk newest to oldest so the weight is a running product.
    double weight = 1.0;
    double num = 0.0;
    double den = 0.0;
    for (auto it = history.rbegin(); it != history.rend(); ++it) {
        num += weight * it->score;
        den += weight;
        weight *= cfg.history_decay;
    }
    return std::clamp(num / den, 0.0, 1.0);
}

double recency_score(std::optional<std::int64_t> last_attempt_ms, std::int64_t now_ms, const SchedulerConfig& cfg) {
    return HyperbolicRecency(cfg.recency_halflife_ms).score(last_attempt_ms, now_ms);
}

MasteryScore mastery(const Question& q, const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                     const RecencyModel* recency) {
    MasteryScore out;
    out.question_id = q.question_id;
    out.computed_at_ms = now_ms;

    if (auto it = state.attempts.find(q.question_id); it != state.attempts.end()) {
        out.performance = performance_score(it->second, cfg);
    }

    double watched_sum = 0.0;
    for (const auto& ref : q.segment_refs) {
        const Segment& seg = state.course->segment(ref);
        if (const auto* cov = state.find_coverage(seg.video_id)) watched_sum += watched_fraction(*cov, seg);
    }
    out.watched = q.segment_refs.empty() ? 0.0 : watched_sum / static_cast<double>(q.segment_refs.size());

    std::optional<std::int64_t> last;
    if (const auto* a = state.latest_attempt(q.question_id)) last = a->at_ms;
    if (recency) {
        out.recency = std::clamp(recency->score(last, now_ms), 0.0, 1.0);
    } else {
        out.recency = recency_score(last, now_ms, cfg);
    }

    out.combined = std::clamp(
        cfg.performance_weight * out.performance + cfg.watched_weight * out.watched + cfg.recency_weight * out.recency,
        0.0, 1.0);
    return out;
}

namespace {

std::vector<std::pair<MasteryScore, int>> score_all(const StudyState& state, const SchedulerConfig& cfg,
                                                    std::int64_t now_ms, const std::optional<std::string>& unit,
                                                    const RecencyModel* recency) {
    std::vector<std::pair<MasteryScore, int>> scored;
    for (const Question* q : state.course->questions_in_order()) {
        if (unit && state.course->unit_of(*q) != *unit) continue;
        scored.emplace_back(mastery(*q, state, cfg, now_ms, recency), q->order_index);
    }
    std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        return std::tie(a.first.combined, a.second) < std::tie(b.first.combined, b.second);
    });
    return scored;
}

}  // namespace

std::string next_question(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                          const RecencyModel* recency) {
    const auto& ordered = state.course->questions_in_order();
    if (ordered.empty()) throw ValidationError("course '" + state.course->id() + "' has no questions");
    for (const Question* q : ordered) {
        if (state.attempt_count(q->question_id) == 0) return q->question_id;
    }
    return score_all(state, cfg, now_ms, std::nullopt, recency).front().first.question_id;
}

std::vector<MasteryScore> review_ranking(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                                         const std::optional<std::string>& unit, const RecencyModel* recency) {
    if (unit) {
        auto it = state.initial_pass_complete.find(*unit);
        if (it == state.initial_pass_complete.end()) throw NotFoundError("unknown unit '" + *unit + "'");
        if (!it->second) throw PassIncompleteError("initial pass over unit '" + *unit + "' is not complete");
    } else if (!state.course_pass_complete()) {
        throw PassIncompleteError("initial pass over the course is not complete");
    }
    auto scored = score_all(state, cfg, now_ms, unit, recency);
    std::vector<MasteryScore> out;
    for (std::size_t i = 0; i < scored.size() && i < cfg.review_list_length; ++i) out.push_back(scored[i].first);
    return out;
}

std::vector<std::string> review_list(const StudyState& state, const SchedulerConfig& cfg, std::int64_t now_ms,
                                     const std::optional<std::string>& unit) {
    std::vector<std::string> ids;
    for (const auto& m : review_ranking(state, cfg, now_ms, unit)) ids.push_back(m.question_id);
    return ids;
}

double grade_free_response(int requested, const std::vector<bool>& given_correct) {
    if (requested < 1) throw ValidationError("free-response grading needs at least one requested example");
    const auto correct = std::count(given_correct.begin(), given_correct.end(), true);
    const auto denom = std::max<std::size_t>(static_cast<std::size_t>(requested), given_correct.size());
    return static_cast<double>(correct) / static_cast<double>(denom);
}

}  // namespace quizcram
