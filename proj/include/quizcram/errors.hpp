#pragma once

#include <stdexcept>
#include <string>

namespace quizcram {

// Input rejected: a precondition or invariant of the request does not hold.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The client submitted against a question that is no longer current.
class ConflictError : public std::runtime_error {
public:
    ConflictError(const std::string& what, std::string current_question_id)
        : std::runtime_error(what), current_question_id_(std::move(current_question_id)) {}

    const std::string& current_question_id() const noexcept { return current_question_id_; }

private:
    std::string current_question_id_;
};

// Review scheduling requested before every question has been attempted once.
class PassIncompleteError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A persisted log failed to parse or failed its integrity checks.
class LogFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace quizcram
