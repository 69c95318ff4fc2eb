#include "doctest.h"
#include "generators.hpp"

#include "quizcram/http_api.hpp"
#include "quizcram/serialization.hpp"

#include "httplib.h"

#include <thread>

using namespace quizcram;
using namespace quizcram::service;

namespace {

class Server {
public:
    Server() {
        svc.add_course(Course::build(convert_course(testing::fixed_invideo_course(1))));
        port = api.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { api.listen_after_bind(); });
        api.wait_until_ready();
    }
    ~Server() {
        api.stop();
        thread.join();
    }

    httplib::Client client() const { return httplib::Client("127.0.0.1", port); }

    std::int64_t now = 1000;
    StudyService svc{SchedulerConfig{}, EventLog{}, [this] { return now; }};
    HttpApi api{svc};
    int port = -1;
    std::thread thread;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expected_status) {
    auto res = c.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return Json::parse(res->body);
}

Json get(httplib::Client& c, const std::string& path, int expected_status = 200) {
    auto res = c.Get(path);
    REQUIRE(res);
    CHECK(res->status == expected_status);
    return Json::parse(res->body);
}

}  // namespace

TEST_CASE("a learner session over HTTP") {
    Server server;
    auto c = server.client();

    const auto course = get(c, "/api/courses/fixed");
    CHECK(course.at("course_id") == "fixed");
    CHECK(course.at("questions").size() == 2);

    const auto session = post(c, "/api/sessions", {{"user_id", "web"}, {"course_id", "fixed"}}, 201);
    const std::string sid = session.at("session_id");
    CHECK(session.at("current_question_id") == "q/v0@0");
    CHECK(session.at("mode") == "initial_pass");
    CHECK(get(c, "/api/sessions/" + sid).at("session_id") == sid);

    const auto current = get(c, "/api/sessions/" + sid + "/question");
    CHECK(current.at("question").at("question_id") == "q/v0@0");
    CHECK(current.at("question").at("options").size() == 3);

    const auto watch = post(c, "/api/sessions/" + sid + "/watch",
                            {{"video_id", "v0"}, {"from_s", 0}, {"to_s", 0}, {"action", "play"}}, 200);
    CHECK(watch.at("regions").is_array());
    const auto paused = post(c, "/api/sessions/" + sid + "/watch",
                             {{"video_id", "v0"}, {"from_s", 0}, {"to_s", 25}, {"action", "pause"}}, 200);
    CHECK(paused.at("regions").at(0) == Json{{"from_s", 0}, {"to_s", 25}, {"tag", "seen_current_part"}});
    CHECK(paused.at("regions").back().at("tag") == "relevant");

    CHECK(get(c, "/api/sessions/" + sid + "/skip-target?video_id=v0&position_s=3").at("target_s") == 25);
    CHECK(get(c, "/api/sessions/" + sid + "/skip-target?video_id=v0&position_s=120").at("target_s").is_null());
    CHECK(post(c, "/api/sessions/" + sid + "/skip", {{"video_id", "v0"}, {"position_s", 3}}, 200).at("target_s") == 25);

    const auto wrong = post(c, "/api/sessions/" + sid + "/answers",
                            {{"question_id", "q/v0@0"}, {"selected", {true, true, true}}}, 200);
    CHECK(wrong.at("correct") == false);
    CHECK(wrong.at("advanced") == false);

    const auto stale = post(c, "/api/sessions/" + sid + "/answers",
                            {{"question_id", "q/v0@40"}, {"selected", {false, true}}}, 409);
    CHECK(stale.at("error") == "conflict");
    CHECK(stale.at("current_question_id") == "q/v0@0");

    const auto right = post(c, "/api/sessions/" + sid + "/answers",
                            {{"question_id", "q/v0@0"}, {"selected", {true, false, true}}}, 200);
    CHECK(right.at("correct") == true);
    CHECK(right.at("score") == 1.0);
    CHECK(right.at("next").at("current_question_id") == "q/v0@40");

    const auto review_early = get(c, "/api/sessions/" + sid + "/review", 409);
    CHECK(review_early.at("error") == "pass_incomplete");

    post(c, "/api/sessions/" + sid + "/answers", {{"question_id", "q/v0@40"}, {"selected", {false, true}}}, 200);
    const auto timeline = get(c, "/api/sessions/" + sid + "/timeline").at("entries");
    REQUIRE(timeline.size() == 2);
    CHECK(timeline[0].at("question_id") == "q/v0@40");
    // The skip click is only logged; the playhead stays where playback paused.
    CHECK(timeline[1].at("resume_position_s").at("v0") == 25);
    post(c, "/api/sessions/" + sid + "/timeline/expand", {{"question_id", "q/v0@0"}}, 200);

    const auto review = get(c, "/api/sessions/" + sid + "/review").at("entries");
    CHECK(review.size() == 2);
    CHECK(review[0].contains("combined"));
    CHECK(get(c, "/api/sessions/" + sid).at("mode") == "review");
}

TEST_CASE("HTTP errors carry a kind and message") {
    Server server;
    auto c = server.client();
    CHECK(get(c, "/api/courses/missing", 404).at("error") == "not_found");
    CHECK(get(c, "/api/sessions/missing", 404).at("error") == "not_found");
    CHECK(post(c, "/api/sessions", {{"user_id", "web"}}, 400).at("error") == "invalid_request");

    auto res = c.Post("/api/sessions", "{oops", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);

    const std::string sid = post(c, "/api/sessions", {{"user_id", "web"}, {"course_id", "fixed"}}, 201).at("session_id");
    const auto bad_action = post(c, "/api/sessions/" + sid + "/watch",
                                 {{"video_id", "v0"}, {"from_s", 0}, {"to_s", 0}, {"action", "rewind"}}, 400);
    CHECK(bad_action.at("message").get<std::string>().find("rewind") != std::string::npos);
    CHECK(get(c, "/api/sessions/" + sid + "/skip-target?video_id=v0&position_s=x", 400).at("error") ==
          "invalid_request");
}
