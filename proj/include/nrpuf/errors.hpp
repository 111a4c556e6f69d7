#pragma once

#include <stdexcept>
#include <string>

namespace nrpuf {

/// Invalid parameters, configuration documents or command-line input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A well-formed request that cannot be carried out (index out of range,
/// undefined statistic, ...).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Persistence failures. The kind distinguishes a damaged payload from an
/// unreadable or incompatible file.
class FormatError : public std::runtime_error {
 public:
  enum class Kind { malformed, version_mismatch, checksum_mismatch, io };

  FormatError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace nrpuf
