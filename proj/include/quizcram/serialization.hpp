#pragma once

// JSON mapping for every persisted or transmitted type. Field names follow the
// documented schemas in docs/formats.md. Parsing is strict: missing or
// mistyped fields raise ValidationError.

#include "quizcram/course_model.hpp"
#include "quizcram/errors.hpp"
#include "quizcram/event_log.hpp"
#include "quizcram/mastery_scheduler.hpp"
#include "quizcram/seek_analytics.hpp"
#include "quizcram/watch_tracker.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace quizcram {

using Json = nlohmann::json;

void to_json(Json& j, const AnswerOption& o);
void from_json(const Json& j, AnswerOption& o);
void to_json(Json& j, const Video& v);
void from_json(const Json& j, Video& v);
void to_json(Json& j, const Segment& s);
void from_json(const Json& j, Segment& s);
void to_json(Json& j, const Question& q);
void from_json(const Json& j, Question& q);
void to_json(Json& j, const CourseManifest& m);
void from_json(const Json& j, CourseManifest& m);
void to_json(Json& j, const InVideoQuizCourse& c);
void from_json(const Json& j, InVideoQuizCourse& c);
void to_json(Json& j, const Violation& v);

void to_json(Json& j, const SchedulerConfig& c);
void from_json(const Json& j, SchedulerConfig& c);
void to_json(Json& j, const MasteryScore& m);
void to_json(Json& j, const CoverageRegion& r);

void to_json(Json& j, const InteractionEvent& ev);
void from_json(const Json& j, InteractionEvent& ev);

void to_json(Json& j, const EventCounts& c);

namespace analytics {
void to_json(Json& j, const SeekStats& s);
void to_json(Json& j, const SeekTally& t);
}  // namespace analytics

// Stable text form: sorted keys, two-space indent, trailing newline.
std::string canonical_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

CourseManifest load_manifest(const std::filesystem::path& path);
InVideoQuizCourse load_invideo_course(const std::filesystem::path& path);

// Rethrows nlohmann parse/type errors as ValidationError with `context`.
template <typename T>
T parse_as(const Json& j, const std::string& context) {
    try {
        return j.get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(context + ": " + e.what());
    }
}

}  // namespace quizcram
