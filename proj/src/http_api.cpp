#include "quizcram/http_api.hpp"

#include "quizcram/errors.hpp"
#include "quizcram/serialization.hpp"

#include "httplib.h"

namespace quizcram::service {

namespace {

Json session_json(const Session& s) {
    return Json{{"session_id", s.session_id},
                {"user_id", s.user_id},
                {"course_id", s.course_id},
                {"current_question_id", s.current_question_id},
                {"mode", to_string(s.mode)},
                {"created_at_ms", s.created_at_ms}};
}

Json timeline_json(const TimelineEntry& e) {
    return Json{{"question_id", e.question_id},
                {"prompt", e.prompt},
                {"answered_correctly", e.answered_correctly},
                {"latest_score", e.latest_score},
                {"segment_refs", e.segment_refs},
                {"resume_position_s", e.resume_position_s},
                {"answered_at_ms", e.answered_at_ms}};
}

void reply(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& kind, const std::string& message,
                 Json extra = Json::object()) {
    extra["error"] = kind;
    extra["message"] = message;
    reply(res, status, extra);
}

Json body_of(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    try {
        return Json::parse(req.body);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("request body is not JSON: ") + e.what());
    }
}

template <typename T>
T body_field(const Json& body, const char* key) {
    if (!body.is_object() || !body.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
    return parse_as<T>(body.at(key), key);
}

int int_param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) throw ValidationError(std::string("missing query parameter '") + key + "'");
    const auto raw = req.get_param_value(key);
    try {
        std::size_t used = 0;
        const int v = std::stoi(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(std::string("query parameter '") + key + "' is not an integer");
    }
}

// Maps domain exceptions onto status codes.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const ConflictError& e) {
            reply_error(res, 409, "conflict", e.what(), Json{{"current_question_id", e.current_question_id()}});
        } catch (const PassIncompleteError& e) {
            reply_error(res, 409, "pass_incomplete", e.what());
        } catch (const NotFoundError& e) {
            reply_error(res, 404, "not_found", e.what());
        } catch (const ValidationError& e) {
            reply_error(res, 400, "invalid_request", e.what());
        } catch (const std::exception& e) {
            reply_error(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

struct HttpApi::Impl {
    StudyService& service;
    httplib::Server server;

    explicit Impl(StudyService& s) : service(s) { routes(); }

    void routes() {
        server.Get("/api/courses/:course_id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       reply(res, 200, Json(service.course(req.path_params.at("course_id"))->manifest()));
                   }));

        server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = body_of(req);
                        const auto s = service.start_session(body_field<std::string>(body, "user_id"),
                                                             body_field<std::string>(body, "course_id"));
                        reply(res, 201, session_json(s));
                    }));

        server.Get("/api/sessions/:sid", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       reply(res, 200, session_json(service.session(req.path_params.at("sid"))));
                   }));

        server.Get("/api/sessions/:sid/question",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       const auto& sid = req.path_params.at("sid");
                       const auto s = service.session(sid);
                       const Json question = service.current_question(sid);
                       reply(res, 200, Json{{"session", session_json(s)}, {"question", question}});
                   }));

        server.Post("/api/sessions/:sid/answers",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = body_of(req);
                        const auto r = service.submit_answer(req.path_params.at("sid"),
                                                             body_field<std::string>(body, "question_id"),
                                                             body_field<std::vector<bool>>(body, "selected"));
                        reply(res, 200,
                              Json{{"score", r.score},
                                   {"correct", r.correct},
                                   {"advanced", r.advanced},
                                   {"next", session_json(r.next)}});
                    }));

        server.Post("/api/sessions/:sid/watch", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = body_of(req);
                        const auto action_name = body_field<std::string>(body, "action");
                        const auto action = watch_action_from_string(action_name);
                        if (!action) throw ValidationError("unknown watch action '" + action_name + "'");
                        const auto regions = service.report_watch(
                            req.path_params.at("sid"), body_field<std::string>(body, "video_id"),
                            body_field<int>(body, "from_s"), body_field<int>(body, "to_s"), *action);
                        reply(res, 200, Json{{"regions", regions}});
                    }));

        server.Get("/api/sessions/:sid/timeline",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       Json entries = Json::array();
                       for (const auto& e : service.get_timeline(req.path_params.at("sid"))) {
                           entries.push_back(timeline_json(e));
                       }
                       reply(res, 200, Json{{"entries", entries}});
                   }));

        server.Post("/api/sessions/:sid/timeline/expand",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = body_of(req);
                        service.expand_timeline(req.path_params.at("sid"),
                                                body_field<std::string>(body, "question_id"));
                        reply(res, 200, Json{{"ok", true}});
                    }));

        server.Get("/api/sessions/:sid/review", guarded([this](const httplib::Request& req, httplib::Response& res) {
                       // Evaluated first: an exception inside a braced Json list leaks under GCC.
                       const auto entries = service.get_review(req.path_params.at("sid"));
                       reply(res, 200, Json{{"entries", entries}});
                   }));

        server.Get("/api/sessions/:sid/skip-target",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       if (!req.has_param("video_id")) throw ValidationError("missing query parameter 'video_id'");
                       const auto target = service.get_skip_target(
                           req.path_params.at("sid"), req.get_param_value("video_id"), int_param(req, "position_s"));
                       reply(res, 200, Json{{"target_s", target ? Json(*target) : Json(nullptr)}});
                   }));

        server.Post("/api/sessions/:sid/skip", guarded([this](const httplib::Request& req, httplib::Response& res) {
                        const Json body = body_of(req);
                        const int target =
                            service.confirm_skip(req.path_params.at("sid"), body_field<std::string>(body, "video_id"),
                                                 body_field<int>(body, "position_s"));
                        reply(res, 200, Json{{"target_s", target}});
                    }));
    }
};

HttpApi::HttpApi(StudyService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpApi::~HttpApi() = default;

bool HttpApi::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int HttpApi::bind_to_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpApi::listen_after_bind() { return impl_->server.listen_after_bind(); }

void HttpApi::stop() { impl_->server.stop(); }

void HttpApi::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace quizcram::service
