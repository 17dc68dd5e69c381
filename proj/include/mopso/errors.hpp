#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mopso {

// Every error carries a short machine-readable category used by the CLI.

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
  static constexpr const char* category = "invalid_argument";
};

class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
  static constexpr const char* category = "state_error";
};

// Configuration or scenario file rejected; key() names the offending field.
class LoadError : public std::runtime_error {
 public:
  LoadError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message),
        key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }
  static constexpr const char* category = "load_error";

 private:
  std::string key_;
};

class UnsupportedReport : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  static constexpr const char* category = "unsupported_report";
};

class IoError : public std::runtime_error {
 public:
  IoError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }
  static constexpr const char* category = "io_error";

 private:
  std::string path_;
};

}  // namespace mopso
