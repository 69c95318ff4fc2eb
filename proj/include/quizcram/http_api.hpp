#pragma once

#include "quizcram/study_service.hpp"

#include <memory>
#include <string>

namespace quizcram::service {

// JSON-over-HTTP front end for StudyService. Routes are listed in docs/http_api.md.
class HttpApi {
public:
    explicit HttpApi(StudyService& service);
    ~HttpApi();

    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    // Blocks until stop(). Returns false if the address cannot be bound.
    bool listen(const std::string& host, int port);

    // Binds an ephemeral port and returns it (-1 on failure); call listen_after_bind() to serve.
    int bind_to_any_port(const std::string& host);
    bool listen_after_bind();

    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace quizcram::service
