#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace quizcram {

struct Video {
    std::string video_id;
    std::string title;
    int duration_s = 0;
    std::string unit_id;
    int order_index = 0;
    // Where the player fetches the media; served elsewhere.
    std::string url;

    bool operator==(const Video&) const = default;
};

// Half-open span [start_s, end_s) of one video.
struct Segment {
    std::string segment_id;
    std::string video_id;
    int start_s = 0;
    int end_s = 0;

    int length() const { return end_s - start_s; }
    bool operator==(const Segment&) const = default;
};

enum class QuestionKind { original, extra, generic_self_assessment };

struct AnswerOption {
    std::string text;
    bool correct = false;

    bool operator==(const AnswerOption&) const = default;
};

struct Question {
    std::string question_id;
    std::string prompt;
    std::vector<AnswerOption> options;
    // The last reference is the segment this question focuses.
    std::vector<std::string> segment_refs;
    QuestionKind kind = QuestionKind::original;
    int order_index = 0;

    bool operator==(const Question&) const = default;
};

struct CourseManifest {
    std::string course_id;
    std::vector<std::string> units;
    std::vector<Video> videos;
    std::vector<Segment> segments;
    std::vector<Question> questions;

    bool operator==(const CourseManifest&) const = default;
};

// Question as it appears inside an in-video quiz, before segment pairing.
struct QuizQuestion {
    std::string prompt;
    std::vector<AnswerOption> options;
    QuestionKind kind = QuestionKind::original;

    bool operator==(const QuizQuestion&) const = default;
};

struct InVideoQuiz {
    std::string video_id;
    int position_s = 0;
    QuizQuestion question;

    bool operator==(const InVideoQuiz&) const = default;
};

struct InVideoQuizCourse {
    std::string course_id;
    // Optional explicit unit order; defaults to first appearance in `videos`.
    std::vector<std::string> units;
    std::vector<Video> videos;
    std::vector<InVideoQuiz> quizzes;

    bool operator==(const InVideoQuizCourse&) const = default;
};

struct Violation {
    std::string entity;
    std::string rule;
    std::string message;

    bool operator==(const Violation&) const = default;
};

inline constexpr const char* kGenericPrompt = "How well did you understand this video?";
inline constexpr int kSelfRatingLevels = 5;

// The fixed self-rating scale carried by every generic_self_assessment question.
std::vector<AnswerOption> self_rating_options();

std::string segment_id_for(const std::string& video_id, int start_s);
std::string question_id_for(const std::string& video_id, int start_s);

// Splits each video at its quiz positions; a quiz at p focuses the segment
// ending at p, and any segment without a quiz gets a generic self-assessment
// question. Throws ValidationError on malformed input.
CourseManifest convert_course(const InVideoQuizCourse& src);

// Empty iff every manifest invariant holds.
std::vector<Violation> validate_manifest(const CourseManifest& m);

// Validated manifest plus id lookups. Immutable once built.
class Course {
public:
    // Throws ValidationError listing the violations when the manifest is invalid.
    static std::shared_ptr<const Course> build(CourseManifest manifest);

    const CourseManifest& manifest() const { return manifest_; }
    const std::string& id() const { return manifest_.course_id; }

    const Video* find_video(const std::string& id) const;
    const Segment* find_segment(const std::string& id) const;
    const Question* find_question(const std::string& id) const;

    const Video& video(const std::string& id) const;
    const Segment& segment(const std::string& id) const;
    const Question& question(const std::string& id) const;

    // Questions sorted by order_index.
    const std::vector<const Question*>& questions_in_order() const { return ordered_; }

    // Unit of the video holding the question's focus segment.
    const std::string& unit_of(const Question& q) const;

private:
    explicit Course(CourseManifest manifest);

    CourseManifest manifest_;
    std::unordered_map<std::string, std::size_t> videos_;
    std::unordered_map<std::string, std::size_t> segments_;
    std::unordered_map<std::string, std::size_t> questions_;
    std::vector<const Question*> ordered_;
};

const char* to_string(QuestionKind kind);
std::optional<QuestionKind> question_kind_from_string(const std::string& s);

}  // namespace quizcram
