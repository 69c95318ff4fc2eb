#include "quizcram/event_log.hpp"

#include "quizcram/errors.hpp"
#include "quizcram/serialization.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <shared_mutex>

namespace fs = std::filesystem;

namespace quizcram {

namespace {

constexpr std::array<const char*, kEventKindCount> kKindNames = {
    "session_start", "question_shown",  "answer_submit",   "video_play",        "video_pause",
    "video_seek",    "video_heartbeat", "timeline_expand", "skip_unseen_click",
};

std::string footer_line(std::size_t count) {
    return Json{{"footer", Json{{"record_count", count}}}}.dump() + "\n";
}

bool safe_path_component(const std::string& s) {
    if (s.empty() || s == "." || s == "..") return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '@';
    });
}

std::string file_name_for(std::uint64_t first_event_id, const std::string& session_id) {
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "%012llu", static_cast<unsigned long long>(first_event_id));
    return std::string(prefix) + "_" + (safe_path_component(session_id) ? session_id : "session") + ".jsonl";
}

// An open log file whose last line is always the footer. Each append writes
// the record over the old footer and then a fresh footer after it.
class LogFile {
public:
    explicit LogFile(fs::path path) : path_(std::move(path)) {
        out_.open(path_, std::ios::out | std::ios::trunc | std::ios::binary);
        if (!out_) throw std::runtime_error("cannot create log file '" + path_.string() + "'");
        write_footer();
    }

    void append(const std::string& line) {
        out_.seekp(footer_offset_);
        out_ << line << '\n';
        footer_offset_ = out_.tellp();
        ++count_;
        write_footer();
    }

private:
    void write_footer() {
        out_ << footer_line(count_);
        out_.flush();
        if (!out_) throw std::runtime_error("failed writing log file '" + path_.string() + "'");
    }

    fs::path path_;
    std::ofstream out_;
    std::streamoff footer_offset_ = 0;
    std::size_t count_ = 0;
};

}  // namespace

const char* to_string(EventKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::optional<EventKind> event_kind_from_string(const std::string& s) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (s == kKindNames[i]) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

void check_payload(const InteractionEvent& ev) {
    const std::string where = "event " + std::to_string(ev.event_id) + " (" + to_string(ev.kind()) + ")";
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw ValidationError(where + ": " + what);
    };
    need(!ev.user_id.empty(), "missing user_id");
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, event::SessionStart>) {
                need(!p.session_id.empty(), "missing session_id");
                need(!p.course_id.empty(), "missing course_id");
            } else if constexpr (std::is_same_v<P, event::QuestionShown> || std::is_same_v<P, event::TimelineExpand>) {
                need(!p.question_id.empty(), "missing question_id");
            } else if constexpr (std::is_same_v<P, event::AnswerSubmit>) {
                need(!p.question_id.empty(), "missing question_id");
                need(!p.selected.empty(), "missing selected");
                need(p.score >= 0.0 && p.score <= 1.0, "score outside [0,1]");
            } else if constexpr (std::is_same_v<P, event::VideoPlay> || std::is_same_v<P, event::VideoPause>) {
                need(!p.video_id.empty(), "missing video_id");
                need(p.position_s >= 0, "negative position_s");
            } else if constexpr (std::is_same_v<P, event::VideoHeartbeat>) {
                need(!p.video_id.empty(), "missing video_id");
                need(p.from_s >= 0 && p.from_s <= p.to_s, "heartbeat span must satisfy 0 <= from_s <= to_s");
            } else {
                need(!p.video_id.empty(), "missing video_id");
                need(p.from_s >= 0 && p.to_s >= 0, "negative position");
            }
        },
        ev.payload);
}

struct EventLog::Impl {
    struct UserStream {
        mutable std::mutex mutex;
        std::vector<InteractionEvent> events;
        std::unique_ptr<LogFile> file;
    };

    std::optional<fs::path> dir;
    mutable std::shared_mutex map_mutex;
    std::map<std::string, std::unique_ptr<UserStream>> users;

    UserStream& stream(const std::string& user) {
        {
            std::shared_lock lock(map_mutex);
            if (auto it = users.find(user); it != users.end()) return *it->second;
        }
        std::unique_lock lock(map_mutex);
        auto& slot = users[user];
        if (!slot) slot = std::make_unique<UserStream>();
        return *slot;
    }

    const UserStream* find(const std::string& user) const {
        std::shared_lock lock(map_mutex);
        auto it = users.find(user);
        return it == users.end() ? nullptr : it->second.get();
    }
};

EventLog::EventLog() : impl_(std::make_unique<Impl>()) {}

EventLog::EventLog(const fs::path& dir) : impl_(std::make_unique<Impl>()) {
    impl_->dir = dir;
    fs::create_directories(dir);
    for (auto& [user, events] : read_log_directory(dir)) {
        auto& s = impl_->stream(user);
        for (std::size_t i = 1; i < events.size(); ++i) {
            if (events[i].event_id <= events[i - 1].event_id || events[i].at_ms < events[i - 1].at_ms) {
                throw LogFormatError("stored log for user '" + user + "' is not monotonic at event " +
                                     std::to_string(events[i].event_id));
            }
        }
        s.events = std::move(events);
    }
}

EventLog::~EventLog() = default;
EventLog::EventLog(EventLog&&) noexcept = default;
EventLog& EventLog::operator=(EventLog&&) noexcept = default;

void EventLog::append(const InteractionEvent& ev) {
    check_payload(ev);
    if (ev.event_id == 0) throw ValidationError("event ids start at 1");
    auto& s = impl_->stream(ev.user_id);
    std::lock_guard lock(s.mutex);
    if (!s.events.empty()) {
        const auto& last = s.events.back();
        if (ev.event_id <= last.event_id) {
            throw ValidationError("event id " + std::to_string(ev.event_id) + " does not follow " +
                                  std::to_string(last.event_id) + " for user '" + ev.user_id + "'");
        }
        if (ev.at_ms < last.at_ms) {
            throw ValidationError("event " + std::to_string(ev.event_id) + " is timestamped before event " +
                                  std::to_string(last.event_id) + " for user '" + ev.user_id + "'");
        }
    }
    if (impl_->dir) {
        if (!safe_path_component(ev.user_id)) {
            throw ValidationError("user id '" + ev.user_id + "' cannot be stored on disk");
        }
        const auto* start = std::get_if<event::SessionStart>(&ev.payload);
        if (start || !s.file) {
            const fs::path user_dir = *impl_->dir / ev.user_id;
            fs::create_directories(user_dir);
            s.file = std::make_unique<LogFile>(user_dir /
                                               file_name_for(ev.event_id, start ? start->session_id : "session"));
        }
        s.file->append(Json(ev).dump());
    }
    s.events.push_back(ev);
}

std::vector<InteractionEvent> EventLog::events(const std::string& user_id) const {
    const auto* s = impl_->find(user_id);
    if (!s) return {};
    std::lock_guard lock(s->mutex);
    return s->events;
}

std::vector<std::string> EventLog::users() const {
    std::shared_lock lock(impl_->map_mutex);
    std::vector<std::string> out;
    for (const auto& [user, _] : impl_->users) out.push_back(user);
    return out;
}

std::optional<InteractionEvent> EventLog::last_event(const std::string& user_id) const {
    const auto* s = impl_->find(user_id);
    if (!s) return std::nullopt;
    std::lock_guard lock(s->mutex);
    if (s->events.empty()) return std::nullopt;
    return s->events.back();
}

std::optional<fs::path> EventLog::directory() const { return impl_->dir; }

std::vector<InteractionEvent> read_log_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LogFormatError("cannot open log file '" + path.string() + "'");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) lines.push_back(std::move(line));
    }
    const std::string where = "log file '" + path.string() + "'";
    if (lines.empty()) throw LogFormatError(where + " has no footer");

    Json footer;
    try {
        footer = Json::parse(lines.back());
    } catch (const nlohmann::json::exception&) {
        throw LogFormatError(where + " has an unreadable footer");
    }
    if (!footer.is_object() || !footer.contains("footer") || !footer["footer"].contains("record_count")) {
        throw LogFormatError(where + " does not end with a footer");
    }
    const auto expected = footer["footer"]["record_count"].get<std::size_t>();
    lines.pop_back();
    if (expected != lines.size()) {
        throw LogFormatError(where + " footer says " + std::to_string(expected) + " records but holds " +
                             std::to_string(lines.size()));
    }

    std::vector<InteractionEvent> out;
    out.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            auto ev = Json::parse(lines[i]).get<InteractionEvent>();
            check_payload(ev);
            out.push_back(std::move(ev));
        } catch (const std::exception& e) {
            throw LogFormatError(where + " line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return out;
}

std::map<std::string, std::vector<InteractionEvent>> read_log_directory(const fs::path& dir) {
    std::vector<fs::path> files;
    if (fs::exists(dir)) {
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".jsonl") files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, std::vector<InteractionEvent>> out;
    for (const auto& f : files) {
        for (auto& ev : read_log_file(f)) out[ev.user_id].push_back(std::move(ev));
    }
    for (auto& [user, events] : out) {
        std::stable_sort(events.begin(), events.end(),
                         [](const InteractionEvent& a, const InteractionEvent& b) { return a.event_id < b.event_id; });
    }
    return out;
}

EventCounts event_counts(std::span<const InteractionEvent> events) {
    EventCounts out;
    for (std::size_t i = 0; i < kEventKindCount; ++i) out.per_kind[static_cast<EventKind>(i)] = 0;
    for (const auto& ev : events) {
        ++out.per_kind[ev.kind()];
        if (const auto* a = std::get_if<event::AnswerSubmit>(&ev.payload)) {
            ++out.answer_attempts;
            ++out.attempts_per_question[a->question_id];
            if (a->score == 1.0) ++out.correct_attempts;
        }
    }
    out.seeks = out.per_kind[EventKind::video_seek];
    out.timeline_expansions = out.per_kind[EventKind::timeline_expand];
    if (out.answer_attempts > 0) {
        out.correct_rate = static_cast<double>(out.correct_attempts) / static_cast<double>(out.answer_attempts);
    }
    return out;
}

EventCounts event_counts(const EventLog& log, const std::string& user_id) {
    const auto events = log.events(user_id);
    return event_counts(events);
}

}  // namespace quizcram
