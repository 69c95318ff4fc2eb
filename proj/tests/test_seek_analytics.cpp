#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include "quizcram/errors.hpp"
#include "quizcram/seek_analytics.hpp"

#include <cmath>

using namespace quizcram;
using namespace quizcram::analytics;
using quizcram::testing::Rng;
using quizcram::testing::uniform;

namespace {

SeekEvent seek(std::int64_t at_ms, int from, int to) { return {"u", "v", at_ms, from, to}; }

SeekChain chain(int source, int dest) {
    return {"u", "v", source, dest, 0, dest > source ? Direction::forward : Direction::backward, 1, {}};
}

InteractionEvent ev(std::uint64_t id, EventPayload p) { return {id, "u", static_cast<std::int64_t>(id) * 1000, std::move(p)}; }

}  // namespace

TEST_CASE("seeks closer than the threshold form one chain") {
    const std::vector<SeekEvent> merged{seek(0, 30, 100), seek(3000, 100, 250)};
    const auto a = build_chains(merged);
    REQUIRE(a.chains.size() == 1);
    CHECK(a.chains[0].source_s == 30);
    CHECK(a.chains[0].dest_s == 250);
    CHECK(a.chains[0].seek_count == 2);
    CHECK(a.chains[0].direction == Direction::forward);

    const std::vector<SeekEvent> split{seek(0, 30, 100), seek(6000, 100, 250)};
    CHECK(build_chains(split).chains.size() == 2);

    const std::vector<SeekEvent> boundary{seek(0, 30, 100), seek(5000, 100, 250)};
    CHECK(build_chains(boundary).chains.size() == 2);
    const std::vector<SeekEvent> just_inside{seek(0, 30, 100), seek(4999, 100, 250)};
    CHECK(build_chains(just_inside).chains.size() == 1);
}

TEST_CASE("chains that return to their origin are dropped but counted") {
    const std::vector<SeekEvent> back_and_forth{seek(0, 30, 100), seek(2000, 100, 30)};
    const auto set = build_chains(back_and_forth);
    CHECK(set.chains.empty());
    CHECK(set.zero_displacement == 1);
}

TEST_CASE("build_chains rejects unsorted or mixed input") {
    const std::vector<SeekEvent> unsorted{seek(5000, 1, 2), seek(0, 2, 3)};
    CHECK_THROWS_AS(build_chains(unsorted), ValidationError);
    std::vector<SeekEvent> mixed{seek(0, 1, 2), seek(10, 2, 3)};
    mixed[1].user_id = "someone-else";
    CHECK_THROWS_AS(build_chains(mixed), ValidationError);
    CHECK(build_chains(std::span<const SeekEvent>{}).chains.empty());
}

TEST_CASE("build_chains matches the union-find oracle on random streams") {
    Rng rng(5);
    for (int trial = 0; trial < 300; ++trial) {
        const auto events = testing::random_seek_stream(rng, "u", "v", static_cast<std::size_t>(uniform(rng, 0, 60)),
                                                        uniform(rng, 1, 900));
        const auto set = build_chains(events);
        CHECK(testing::matches_oracle(set, testing::oracle_chains(events, 5000)));
        std::size_t members = 0;
        for (const auto& c : set.chains) members += c.seek_count;
        CHECK(set.chains.size() + set.zero_displacement <= events.size());
        CHECK(members <= events.size());
    }
}

TEST_CASE("classify_chain examples") {
    const std::vector<int> quiz{300};
    const auto from_quiz = classify_chain(chain(300, 200), quiz);
    CHECK(from_quiz.starts_at_quiz);
    CHECK_FALSE(from_quiz.crosses_quiz);
    CHECK_FALSE(from_quiz.plain);

    CHECK(classify_chain(chain(310, 200), quiz).starts_at_quiz);
    CHECK_FALSE(classify_chain(chain(311, 200), quiz).starts_at_quiz);
    CHECK_FALSE(classify_chain(chain(299, 200), quiz).starts_at_quiz);

    const auto into_window = classify_chain(chain(100, 295), quiz);
    CHECK(into_window.ends_in_quiz_window);
    CHECK_FALSE(into_window.crosses_quiz);
    CHECK(classify_chain(chain(100, 290), quiz).ends_in_quiz_window);
    CHECK_FALSE(classify_chain(chain(100, 289), quiz).ends_in_quiz_window);
    CHECK_FALSE(classify_chain(chain(400, 295), quiz).ends_in_quiz_window);

    const auto across = classify_chain(chain(100, 400), quiz);
    CHECK(across.crosses_quiz);
    CHECK(across.crossed_quizzes == std::vector<int>{300});

    const auto plain = classify_chain(chain(10, 20), quiz);
    CHECK(plain.plain);
    CHECK(classify_chain(chain(10, 20), {}).plain);
}

TEST_CASE("classification is translation invariant") {
    Rng rng(9);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<int> quizzes;
        for (int i = 0; i < uniform(rng, 0, 4); ++i) quizzes.push_back(uniform(rng, 1, 500));
        std::sort(quizzes.begin(), quizzes.end());
        const int a = uniform(rng, 0, 500);
        int b = uniform(rng, 0, 500);
        if (b == a) ++b;
        const int offset = uniform(rng, 0, 1000);
        auto moved = quizzes;
        for (int& q : moved) q += offset;
        const auto base = classify_chain(chain(a, b), quizzes);
        auto shifted = classify_chain(chain(a + offset, b + offset), moved);
        for (int& q : shifted.crossed_quizzes) q -= offset;
        CHECK(base == shifted);
    }
}

TEST_CASE("build_chains records crossed quizzes when given them") {
    const std::vector<SeekEvent> events{seek(0, 10, 500)};
    const std::vector<int> quizzes{100, 300, 500};
    const auto set = build_chains(events, quizzes);
    REQUIRE(set.chains.size() == 1);
    CHECK(set.chains[0].crossed_quizzes == std::vector<int>{100, 300});
}

TEST_CASE("per-quiz backward ratio") {
    const std::vector<SeekChain> chains{chain(50, 20)};
    const std::vector<int> quizzes{50};
    const auto s = compute_stats(chains, quizzes, 100, {});
    REQUIRE(s.per_quiz_backward_rate_ratio.has_value());
    CHECK(std::abs(*s.per_quiz_backward_rate_ratio - 100.0) < 1e-9);
    CHECK(s.backward_from_quiz_fraction == 1.0);
    CHECK_FALSE(s.forward_to_quiz_window_fraction.has_value());
    CHECK_FALSE(s.rewatch_fraction.has_value());
}

TEST_CASE("forward crossing ratio counts quizzes per skipped second") {
    // Two forward chains skip 100 s in total and cross one quiz once.
    const std::vector<SeekChain> chains{chain(0, 60), chain(100, 140)};
    const std::vector<int> quizzes{50, 200};
    const auto s = compute_stats(chains, quizzes, 400, {});
    REQUIRE(s.forward_cross_rate_ratio.has_value());
    CHECK(std::abs(*s.forward_cross_rate_ratio - (1.0 / 2.0) / (100.0 / 400.0)) < 1e-12);
    CHECK(s.chains_not_crossing_quiz_fraction == 0.5);
}

TEST_CASE("without quizzes only totals are defined") {
    const std::vector<SeekChain> chains{chain(10, 5), chain(5, 50)};
    const auto s = compute_stats(chains, {}, 100, {});
    CHECK(s.total_chains == 2);
    CHECK(s.backward_chains == 1);
    CHECK(s.forward_chains == 1);
    CHECK_FALSE(s.backward_from_quiz_fraction.has_value());
    CHECK_FALSE(s.forward_to_quiz_window_fraction.has_value());
    CHECK_FALSE(s.chains_not_crossing_quiz_fraction.has_value());
    CHECK_FALSE(s.per_quiz_backward_rate_ratio.has_value());
    CHECK_FALSE(s.forward_cross_rate_ratio.has_value());
    CHECK_THROWS_AS(compute_stats(chains, {}, 0, {}), ValidationError);
}

TEST_CASE("rewatch fraction counts finishers who came back") {
    const std::vector<UserOpens> opens{
        {"a", {0.95, 0.1}},
        {"b", {0.9}},
        {"c", {0.2, 0.3, 0.5}},  // never finished
        {"d", {0.1, 1.0}},
    };
    const auto s = compute_stats({}, {}, 100, opens);
    REQUIRE(s.rewatch_fraction.has_value());
    CHECK(*s.rewatch_fraction == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("tallies merge by addition") {
    Rng rng(21);
    const std::vector<int> quizzes{100, 200};
    std::vector<SeekChain> all;
    SeekTally merged;
    for (int part = 0; part < 5; ++part) {
        std::vector<SeekChain> chains;
        for (int i = 0; i < 20; ++i) {
            const int a = uniform(rng, 0, 300);
            const int b = uniform(rng, 0, 300);
            if (a != b) chains.push_back(chain(a, b));
        }
        merged.merge(tally_video(chains, quizzes, 300, {}));
        all.insert(all.end(), chains.begin(), chains.end());
    }
    auto whole = tally_video(all, quizzes, 300, {});
    // Quiz count and duration are per video and add up across parts.
    whole.quiz_count *= 5;
    whole.duration_s *= 5;
    CHECK(merged == whole);
}

TEST_CASE("figure data") {
    const std::vector<SeekChain> one{chain(30, 250)};
    const auto fig = emit_figure_data(one, std::vector<int>{100});
    CHECK(fig.scatter_csv == "user_id,video_id,source_s,dest_s,direction\nu,v,30,250,forward\n");
    const auto h = seek_histograms(one);
    REQUIRE(h.skip_counts.size() == 251);
    for (int s = 0; s < 251; ++s) CHECK(h.skip_counts[static_cast<std::size_t>(s)] == (s >= 30 && s < 250 ? 1u : 0u));
    CHECK(h.destination_counts[250] == 1);
    CHECK(fig.histogram_csv.find("\n100,0,1,1\n") != std::string::npos);

    const auto empty = emit_figure_data({}, {});
    CHECK(empty.scatter_csv == "user_id,video_id,source_s,dest_s,direction\n");
    CHECK(empty.histogram_csv == "second,destination_count,skip_count,is_quiz\n");
}

TEST_CASE("histograms equal a naive recount") {
    Rng rng(13);
    std::vector<SeekChain> chains;
    for (int i = 0; i < 1000; ++i) {
        const int a = uniform(rng, 0, 700);
        int b = uniform(rng, 0, 700);
        if (a == b) b = a + 1;
        chains.push_back(chain(a, b));
    }
    const auto h = seek_histograms(chains);
    const auto o = testing::oracle_histograms(chains);
    CHECK(h.destination_counts == o.destination_counts);
    CHECK(h.skip_counts == o.skip_counts);
}

TEST_CASE("opens are runs of events on one video") {
    const VideoInfo video{"v", 100, {50}};
    const std::vector<InteractionEvent> events{
        ev(1, event::SessionStart{"s1", "c"}),
        ev(2, event::VideoPlay{"v", 0}),
        ev(3, event::VideoPause{"v", 95}),
        ev(4, event::VideoPlay{"other", 0}),
        ev(5, event::VideoPlay{"v", 10}),
        ev(6, event::VideoHeartbeat{"v", 10, 15}),
        ev(7, event::SessionStart{"s2", "c"}),
        ev(8, event::VideoSeek{"v", 0, 40}),
    };
    const auto fractions = open_fractions(events, video);
    REQUIRE(fractions.size() == 3);
    CHECK(fractions[0] == 0.95);
    CHECK(fractions[1] == 0.05);
    CHECK(fractions[2] == 0.0);
}

TEST_CASE("manifest quiz positions come from original questions") {
    const auto m = convert_course(testing::fixed_invideo_course(1));
    const auto videos = videos_from_manifest(m);
    REQUIRE(videos.size() == 1);
    CHECK(videos[0].quizzes == std::vector<int>{40, 120});
    CHECK(videos_from_course(testing::fixed_invideo_course(1))[0].quizzes == std::vector<int>{40, 120});
}

TEST_CASE("analyze_logs recovers a small planted log") {
    Rng rng(17);
    testing::SeekPlan plan;
    plan.backward_from_quiz_noncrossing = 3;
    plan.backward_from_quiz_crossing = 1;
    plan.backward_plain_noncrossing = 4;
    plan.backward_plain_crossing = 2;
    plan.forward_to_window = 5;
    plan.forward_plain_noncrossing = 4;
    plan.forward_crossing = 1;
    plan.zero_displacement = 3;
    plan.seek_users = 4;
    plan.finished_viewers = 8;
    plan.rewatching_viewers = 2;
    plan.unfinished_viewers = 3;
    const AnalysisOptions options;
    const auto log = testing::planted_seek_log(rng, plan, options);
    auto events = log.events_by_user;
    events["stranger"].push_back({1, "stranger", 0, event::VideoSeek{"unknown-video", 0, 5}});
    const auto report = analyze_logs(events, {log.video}, options);
    REQUIRE(report.videos.size() == 1);
    const auto& s = report.overall;
    CHECK(s.total_chains == plan.total());
    CHECK(s.zero_displacement_chains == plan.zero_displacement);
    CHECK(s.backward_from_quiz_fraction == doctest::Approx(4.0 / 10.0));
    CHECK(s.forward_to_quiz_window_fraction == doctest::Approx(5.0 / 10.0));
    CHECK(s.chains_not_crossing_quiz_fraction == doctest::Approx(16.0 / 20.0));
    CHECK(s.rewatch_fraction == doctest::Approx(2.0 / 8.0));
    CHECK(report.skipped_events == 1);
}
