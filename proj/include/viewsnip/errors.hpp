#pragma once

#include <stdexcept>
#include <string>

namespace viewsnip {

// Invalid input data: corpus lines, model files, annotation records, ...
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure talking to a remote classifier endpoint. The kind distinguishes the
// error categories so callers can map them to exit codes or retry policies.
class RemoteError : public std::runtime_error {
 public:
  enum class Kind {
    connect,          // endpoint unreachable / transport failure
    http_status,      // reply with a non-success status code
    malformed_reply,  // body that is not the expected JSON shape
    invalid_scores,   // score vector of wrong length, negative or non-finite
  };

  RemoteError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace viewsnip
