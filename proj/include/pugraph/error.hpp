#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pugraph {

// Base of every error raised by the toolkit. `category()` is a short
// machine-readable tag used by the CLI's one-line error output.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& what)
      : std::runtime_error(what), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("parse", "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error("config", key + ": " + what), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct SamplingError : Error {
  explicit SamplingError(const std::string& what) : Error("sampling", what) {}
};

struct DegenerateDataError : Error {
  explicit DegenerateDataError(const std::string& what) : Error("degenerate-data", what) {}
};

struct CalibrationError : Error {
  explicit CalibrationError(const std::string& what) : Error("calibration", what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error("dimension", what) {}
};

struct UndefinedMetricError : Error {
  explicit UndefinedMetricError(const std::string& what) : Error("undefined-metric", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error("io", what) {}
};

}  // namespace pugraph
