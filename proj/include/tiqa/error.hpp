#pragma once

#include <stdexcept>
#include <string>

namespace tiqa {

enum class ErrorKind {
  capacity,
  domain,
  out_of_hemisphere,
  shape,
  support,
  dimension,
  aspect,
  plugin,
  pairing,
  aggregation,
  layout,
  identifiability,
  incomplete_data,
  io,
  format,
  config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception. The kind lets callers (and the CLI) distinguish
/// contract violations without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Failure of an external metric process. Carries whatever the child wrote
/// to stderr so callers can surface it.
class PluginError : public Error {
 public:
  PluginError(const std::string& what, std::string stderr_text, bool timed_out)
      : Error(ErrorKind::plugin, what),
        stderr_text_(std::move(stderr_text)),
        timed_out_(timed_out) {}

  const std::string& stderr_text() const noexcept { return stderr_text_; }
  bool timed_out() const noexcept { return timed_out_; }

 private:
  std::string stderr_text_;
  bool timed_out_;
};

}  // namespace tiqa
