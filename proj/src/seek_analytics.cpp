#include "quizcram/seek_analytics.hpp"

#include "quizcram/errors.hpp"
#include "quizcram/watch_tracker.hpp"

#include <algorithm>
#include <sstream>

namespace quizcram::analytics {

const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

namespace {

std::vector<int> quizzes_between(int a, int b, std::span<const int> quizzes) {
    const int lo = std::min(a, b);
    const int hi = std::max(a, b);
    std::vector<int> out;
    for (int q : quizzes) {
        if (q > lo && q < hi) out.push_back(q);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

ChainSet build_chains(std::span<const SeekEvent> events, std::span<const int> quizzes,
                      std::int64_t merge_threshold_ms) {
    ChainSet out;
    if (events.empty()) return out;
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].at_ms < events[i - 1].at_ms) {
            throw ValidationError("seek events are not sorted by time at index " + std::to_string(i));
        }
        if (events[i].user_id != events[0].user_id || events[i].video_id != events[0].video_id) {
            throw ValidationError("seek chains are built per user and video; index " + std::to_string(i) +
                                  " belongs to another stream");
        }
    }

    std::size_t begin = 0;
    while (begin < events.size()) {
        std::size_t end = begin + 1;
        while (end < events.size() && events[end].at_ms - events[end - 1].at_ms < merge_threshold_ms) ++end;

        const SeekEvent& first = events[begin];
        const SeekEvent& last = events[end - 1];
        if (first.from_s == last.to_s) {
            ++out.zero_displacement;
        } else {
            SeekChain c;
            c.user_id = first.user_id;
            c.video_id = first.video_id;
            c.source_s = first.from_s;
            c.dest_s = last.to_s;
            c.started_at_ms = first.at_ms;
            c.direction = c.dest_s > c.source_s ? Direction::forward : Direction::backward;
            c.seek_count = end - begin;
            c.crossed_quizzes = quizzes_between(c.source_s, c.dest_s, quizzes);
            out.chains.push_back(std::move(c));
        }
        begin = end;
    }
    return out;
}

ChainClass classify_chain(const SeekChain& chain, std::span<const int> quizzes, int quiz_window_s) {
    ChainClass out;
    for (int q : quizzes) {
        if (chain.source_s >= q && chain.source_s <= q + quiz_window_s) out.starts_at_quiz = true;
        if (chain.direction == Direction::forward && chain.dest_s >= q - quiz_window_s && chain.dest_s <= q) {
            out.ends_in_quiz_window = true;
        }
    }
    out.crossed_quizzes = quizzes_between(chain.source_s, chain.dest_s, quizzes);
    out.crosses_quiz = !out.crossed_quizzes.empty();
    out.plain = !out.starts_at_quiz && !out.ends_in_quiz_window && !out.crosses_quiz;
    return out;
}

void SeekTally::merge(const SeekTally& o) {
    total_chains += o.total_chains;
    backward_chains += o.backward_chains;
    forward_chains += o.forward_chains;
    zero_displacement_chains += o.zero_displacement_chains;
    backward_from_quiz += o.backward_from_quiz;
    forward_to_quiz_window += o.forward_to_quiz_window;
    crossing_chains += o.crossing_chains;
    forward_quiz_crossings += o.forward_quiz_crossings;
    forward_skipped_seconds += o.forward_skipped_seconds;
    quiz_count += o.quiz_count;
    duration_s += o.duration_s;
    finished_viewers += o.finished_viewers;
    rewatching_viewers += o.rewatching_viewers;
}

SeekTally tally_video(std::span<const SeekChain> chains, std::span<const int> quizzes, int video_duration_s,
                      std::span<const UserOpens> opens, const AnalysisOptions& options) {
    if (video_duration_s <= 0) throw ValidationError("video duration must be positive");
    SeekTally t;
    t.quiz_count = quizzes.size();
    t.duration_s = static_cast<std::size_t>(video_duration_s);
    for (const auto& c : chains) {
        ++t.total_chains;
        const ChainClass cls = classify_chain(c, quizzes, options.quiz_window_s);
        if (cls.crosses_quiz) ++t.crossing_chains;
        if (c.direction == Direction::backward) {
            ++t.backward_chains;
            if (cls.starts_at_quiz) ++t.backward_from_quiz;
        } else {
            ++t.forward_chains;
            if (cls.ends_in_quiz_window) ++t.forward_to_quiz_window;
            t.forward_quiz_crossings += cls.crossed_quizzes.size();
            t.forward_skipped_seconds += static_cast<std::size_t>(c.dest_s - c.source_s);
        }
    }
    for (const auto& u : opens) {
        const bool finished = std::any_of(u.open_fractions.begin(), u.open_fractions.end(),
                                          [&](double f) { return f >= options.finished_fraction; });
        if (!finished) continue;
        ++t.finished_viewers;
        if (u.open_fractions.size() >= 2) ++t.rewatching_viewers;
    }
    return t;
}

SeekStats finalize(const SeekTally& t) {
    auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0) return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    SeekStats s;
    s.total_chains = t.total_chains;
    s.backward_chains = t.backward_chains;
    s.forward_chains = t.forward_chains;
    s.zero_displacement_chains = t.zero_displacement_chains;
    s.rewatch_fraction = ratio(t.rewatching_viewers, t.finished_viewers);
    if (t.quiz_count == 0) return s;

    s.backward_from_quiz_fraction = ratio(t.backward_from_quiz, t.backward_chains);
    s.forward_to_quiz_window_fraction = ratio(t.forward_to_quiz_window, t.forward_chains);
    s.chains_not_crossing_quiz_fraction = ratio(t.total_chains - t.crossing_chains, t.total_chains);

    const double quizzes = static_cast<double>(t.quiz_count);
    const double seconds = static_cast<double>(t.duration_s);
    if (t.backward_chains > 0 && t.duration_s > 0) {
        const double per_quiz = static_cast<double>(t.backward_from_quiz) / quizzes;
        const double per_second = static_cast<double>(t.backward_chains) / seconds;
        s.per_quiz_backward_rate_ratio = per_quiz / per_second;
    }
    if (t.forward_skipped_seconds > 0 && t.duration_s > 0) {
        const double per_quiz = static_cast<double>(t.forward_quiz_crossings) / quizzes;
        const double per_second = static_cast<double>(t.forward_skipped_seconds) / seconds;
        s.forward_cross_rate_ratio = per_quiz / per_second;
    }
    return s;
}

SeekStats compute_stats(std::span<const SeekChain> chains, std::span<const int> quizzes, int video_duration_s,
                        std::span<const UserOpens> opens, const AnalysisOptions& options) {
    return finalize(tally_video(chains, quizzes, video_duration_s, opens, options));
}

SeekHistograms seek_histograms(std::span<const SeekChain> chains) {
    int extent = 0;
    for (const auto& c : chains) extent = std::max({extent, c.source_s + 1, c.dest_s + 1});
    SeekHistograms h;
    h.destination_counts.assign(static_cast<std::size_t>(extent), 0);
    std::vector<long long> delta(static_cast<std::size_t>(extent) + 1, 0);
    for (const auto& c : chains) {
        ++h.destination_counts[static_cast<std::size_t>(c.dest_s)];
        if (c.direction == Direction::forward) {
            ++delta[static_cast<std::size_t>(c.source_s)];
            --delta[static_cast<std::size_t>(c.dest_s)];
        }
    }
    h.skip_counts.resize(static_cast<std::size_t>(extent));
    long long running = 0;
    for (std::size_t s = 0; s < h.skip_counts.size(); ++s) {
        running += delta[s];
        h.skip_counts[s] = static_cast<std::size_t>(running);
    }
    return h;
}

FigureData emit_figure_data(std::span<const SeekChain> chains, std::span<const int> quizzes) {
    std::ostringstream scatter;
    scatter << "user_id,video_id,source_s,dest_s,direction\n";
    for (const auto& c : chains) {
        scatter << c.user_id << ',' << c.video_id << ',' << c.source_s << ',' << c.dest_s << ','
                << to_string(c.direction) << '\n';
    }

    std::vector<int> sorted(quizzes.begin(), quizzes.end());
    std::sort(sorted.begin(), sorted.end());
    const auto h = seek_histograms(chains);
    std::ostringstream hist;
    hist << "second,destination_count,skip_count,is_quiz\n";
    for (std::size_t s = 0; s < h.destination_counts.size(); ++s) {
        const bool is_quiz = std::binary_search(sorted.begin(), sorted.end(), static_cast<int>(s));
        hist << s << ',' << h.destination_counts[s] << ',' << h.skip_counts[s] << ',' << (is_quiz ? 1 : 0) << '\n';
    }
    return {scatter.str(), hist.str()};
}

std::vector<VideoInfo> videos_from_course(const InVideoQuizCourse& course) {
    std::vector<VideoInfo> out;
    for (const auto& v : course.videos) {
        VideoInfo info{v.video_id, v.duration_s, {}};
        for (const auto& q : course.quizzes) {
            if (q.video_id == v.video_id) info.quizzes.push_back(q.position_s);
        }
        std::sort(info.quizzes.begin(), info.quizzes.end());
        out.push_back(std::move(info));
    }
    return out;
}

std::vector<VideoInfo> videos_from_manifest(const CourseManifest& manifest) {
    std::map<std::string, const Segment*> segments;
    for (const auto& s : manifest.segments) segments[s.segment_id] = &s;
    std::vector<VideoInfo> out;
    for (const auto& v : manifest.videos) {
        VideoInfo info{v.video_id, v.duration_s, {}};
        for (const auto& q : manifest.questions) {
            if (q.kind != QuestionKind::original || q.segment_refs.empty()) continue;
            auto it = segments.find(q.segment_refs.back());
            if (it != segments.end() && it->second->video_id == v.video_id) info.quizzes.push_back(it->second->end_s);
        }
        std::sort(info.quizzes.begin(), info.quizzes.end());
        info.quizzes.erase(std::unique(info.quizzes.begin(), info.quizzes.end()), info.quizzes.end());
        out.push_back(std::move(info));
    }
    return out;
}

std::vector<SeekEvent> seeks_for(std::span<const InteractionEvent> user_events, const std::string& video_id) {
    std::vector<SeekEvent> out;
    for (const auto& ev : user_events) {
        if (const auto* s = std::get_if<event::VideoSeek>(&ev.payload); s && s->video_id == video_id) {
            out.push_back({ev.user_id, s->video_id, ev.at_ms, s->from_s, s->to_s});
        }
    }
    return out;
}

namespace {

const std::string* video_of(const InteractionEvent& ev) {
    return std::visit(
        [](const auto& p) -> const std::string* {
            if constexpr (requires { p.video_id; }) {
                return &p.video_id;
            } else {
                return nullptr;
            }
        },
        ev.payload);
}

}  // namespace

std::vector<double> open_fractions(std::span<const InteractionEvent> user_events, const VideoInfo& video) {
    std::vector<double> out;
    std::optional<std::string> current;
    std::optional<WatchCoverage> cov;
    std::optional<int> open_from;
    auto clamp = [&](int s) { return std::clamp(s, 0, video.duration_s); };
    auto close = [&] {
        if (cov) out.push_back(static_cast<double>(cov->seen().total()) / video.duration_s);
        cov.reset();
        open_from.reset();
        current.reset();
    };

    for (const auto& ev : user_events) {
        if (ev.kind() == EventKind::session_start) {
            close();
            continue;
        }
        const std::string* vid = video_of(ev);
        if (!vid) continue;
        if (!current || *current != *vid) {
            close();
            current = *vid;
            if (*vid == video.video_id) cov.emplace(ev.user_id, video.video_id, video.duration_s);
        }
        if (!cov) continue;
        std::visit(
            [&](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, event::VideoPlay>) {
                    playback_play(*cov, open_from, clamp(p.position_s));
                } else if constexpr (std::is_same_v<P, event::VideoPause>) {
                    playback_pause(*cov, open_from, clamp(p.position_s));
                } else if constexpr (std::is_same_v<P, event::VideoHeartbeat>) {
                    playback_heartbeat(*cov, open_from, clamp(p.from_s), clamp(p.to_s));
                } else if constexpr (std::is_same_v<P, event::VideoSeek>) {
                    playback_seek(*cov, open_from, clamp(p.from_s), clamp(p.to_s));
                }
            },
            ev.payload);
    }
    close();
    return out;
}

AnalysisReport analyze_logs(const std::map<std::string, std::vector<InteractionEvent>>& events_by_user,
                            const std::vector<VideoInfo>& videos, const AnalysisOptions& options) {
    AnalysisReport report;
    std::map<std::string, std::size_t> index;
    for (const auto& v : videos) {
        index[v.video_id] = report.videos.size();
        report.videos.push_back({v, {}, {}, {}});
    }
    std::vector<std::vector<UserOpens>> opens(videos.size());
    std::vector<std::size_t> dropped(videos.size(), 0);

    for (const auto& [user, events] : events_by_user) {
        for (const auto& ev : events) {
            const std::string* vid = video_of(ev);
            if (vid && !index.contains(*vid)) ++report.skipped_events;
        }
        for (std::size_t i = 0; i < report.videos.size(); ++i) {
            const VideoInfo& v = report.videos[i].video;
            const auto seeks = seeks_for(events, v.video_id);
            auto set = build_chains(seeks, v.quizzes, options.merge_threshold_ms);
            dropped[i] += set.zero_displacement;
            auto& chains = report.videos[i].chains;
            chains.insert(chains.end(), std::make_move_iterator(set.chains.begin()),
                          std::make_move_iterator(set.chains.end()));
            auto fractions = open_fractions(events, v);
            if (!fractions.empty()) opens[i].push_back({user, std::move(fractions)});
        }
    }

    for (std::size_t i = 0; i < report.videos.size(); ++i) {
        auto& r = report.videos[i];
        r.tally = tally_video(r.chains, r.video.quizzes, r.video.duration_s, opens[i], options);
        r.tally.zero_displacement_chains = dropped[i];
        r.stats = finalize(r.tally);
        report.overall_tally.merge(r.tally);
    }
    report.overall = finalize(report.overall_tally);
    return report;
}

}  // namespace quizcram::analytics
