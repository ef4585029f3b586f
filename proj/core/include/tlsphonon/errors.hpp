#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace tlsphonon {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A physical parameter violates its invariant (negative loss, zero mass, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression hit a vanishing denominator.
class SingularParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration input. Carries the offending key and line (0 when
/// the value came from the command line).
class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, std::string expected, const std::string& detail)
      : Error(format(key, line, expected, detail)),
        key_(std::move(key)),
        line_(line),
        expected_(std::move(expected)),
        detail_(detail) {}

  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& expected,
                            const std::string& detail) {
    std::string msg = "config error";
    if (line > 0) msg += " at line " + std::to_string(line);
    if (!key.empty()) msg += " for key '" + key + "'";
    if (!expected.empty()) msg += " (expected " + expected + ")";
    if (!detail.empty()) msg += ": " + detail;
    return msg;
  }

  std::string key_;
  int line_;
  std::string expected_;
  std::string detail_;
};

/// The integrator produced a non-finite state.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(double time)
      : Error("integration diverged (non-finite state) at t = " + seconds(time)), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  static std::string seconds(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g s", t);
    return buf;
  }
  double time_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& detail)
      : Error("I/O error on '" + path + "': " + detail), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace tlsphonon
