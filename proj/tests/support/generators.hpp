#pragma once

#include "quizcram/course_model.hpp"
#include "quizcram/event_log.hpp"
#include "quizcram/seek_analytics.hpp"
#include "quizcram/study_service.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace quizcram::testing {

using Rng = std::mt19937_64;

int uniform(Rng& rng, int lo, int hi);  // inclusive
std::int64_t uniform64(Rng& rng, std::int64_t lo, std::int64_t hi);
bool chance(Rng& rng, double p);

// Multiple-checkbox question with 2..5 options and a random key.
QuizQuestion random_quiz_question(Rng& rng, const std::string& label);

// 1..max_videos videos over one or two units, each with 0..max_quizzes quizzes
// at distinct random positions (sometimes exactly at the end).
InVideoQuizCourse random_invideo_course(Rng& rng, int max_videos = 4, int max_quizzes = 5);

// A small fixed course: `videos` videos of 120 s with quizzes at 40 s and 120 s.
InVideoQuizCourse fixed_invideo_course(int videos = 2);

// Random seek stream for one user and video, sorted by time; gaps straddle the
// merge threshold so both merges and splits occur.
std::vector<analytics::SeekEvent> random_seek_stream(Rng& rng, const std::string& user, const std::string& video,
                                                     std::size_t count, int duration_s);

// Chain counts a synthetic log plants for one 600 s video with a single quiz at 300 s.
struct SeekPlan {
    std::size_t backward_from_quiz_noncrossing = 150;
    std::size_t backward_from_quiz_crossing = 50;
    std::size_t backward_plain_noncrossing = 270;
    std::size_t backward_plain_crossing = 30;
    std::size_t forward_to_window = 125;
    std::size_t forward_plain_noncrossing = 355;
    std::size_t forward_crossing = 20;
    std::size_t zero_displacement = 40;
    std::size_t seek_users = 40;

    std::size_t finished_viewers = 100;
    std::size_t rewatching_viewers = 11;
    std::size_t unfinished_viewers = 30;

    std::size_t backward() const {
        return backward_from_quiz_noncrossing + backward_from_quiz_crossing + backward_plain_noncrossing +
               backward_plain_crossing;
    }
    std::size_t forward() const { return forward_to_window + forward_plain_noncrossing + forward_crossing; }
    std::size_t total() const { return backward() + forward(); }
    std::size_t crossing() const { return backward_from_quiz_crossing + backward_plain_crossing + forward_crossing; }
};

struct PlantedLog {
    analytics::VideoInfo video;
    std::map<std::string, std::vector<InteractionEvent>> events_by_user;
};

inline constexpr int kPlantVideoDuration = 600;
inline constexpr int kPlantQuiz = 300;

// Generates complete event streams realizing the plan: multi-hop seek chains
// with sub-threshold gaps, and viewers whose opens cover known fractions.
PlantedLog planted_seek_log(Rng& rng, const SeekPlan& plan, const analytics::AnalysisOptions& options);

// Drives a StudyService session like a learner would: watching the focus
// segment with heartbeats, seeking, answering (correctly with probability
// p_correct), expanding the timeline and using the skip button.
class SimulatedLearner {
public:
    SimulatedLearner(service::StudyService& svc, std::string user, std::string course_id, Rng& rng,
                     std::int64_t& clock_ms, double p_correct);

    void start();
    // One random interaction; returns false once the step budget is spent.
    void step();
    void run(std::size_t steps);

    // Answers the current question correctly (any rating for self-assessments).
    service::AnswerResult answer_correctly();
    service::AnswerResult answer_wrongly();

    const std::string& session_id() const { return session_id_; }

private:
    void watch_current_segment();

    service::StudyService& svc_;
    std::string user_;
    std::string course_id_;
    Rng& rng_;
    std::int64_t& clock_ms_;
    double p_correct_;
    std::string session_id_;
};

std::vector<bool> answer_key(const Question& q);

}  // namespace quizcram::testing
