#pragma once

#include <cassert>
#include <string>
#include <utility>
#include <variant>

namespace fedsim {

// Error vocabulary shared by the whole protocol surface. The names double as
// wire status codes, so keep them stable.
enum class Errc {
  malformed,
  malformed_document,
  invalid_name,
  name_taken,
  bad_credential,
  unknown_actor,
  unknown_object,
  unknown_subject,
  unknown_target,
  unknown_attribute,
  unknown_collection,
  unreachable,
  bad_token,
  replayed_nonce,
  forbidden,
  forbidden_scope,
  payload_too_large,
  stale_unavailable,
  conflict_retry,
  self_follow,
  duplicate,
  quiescent,
  parse_error,
  assertion_failure,
};

const char* to_string(Errc code);

struct Error {
  Errc code;
  std::string detail;

  Error(Errc c, std::string d = {}) : code(c), detail(std::move(d)) {}
};

struct Unit {};

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Error error) : state_(std::move(error)) {}
  Result(Errc code) : state_(Error(code)) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return std::get<T>(state_);
  }
  T& value() & {
    assert(ok());
    return std::get<T>(state_);
  }
  T take() && {
    assert(ok());
    return std::move(std::get<T>(state_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(state_);
  }
  Errc code() const { return error().code; }

 private:
  std::variant<T, Error> state_;
};

using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace fedsim
