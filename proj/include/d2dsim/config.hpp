#pragma once

// Flat `key = value` experiment configuration and report emission.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "d2dsim/engine.hpp"

namespace d2dsim {

/// Parse failure; line() is 1-based, 0 when the problem is not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, const std::string& what);
  int line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  int line_;
};

/// The config file itself could not be read.
class ConfigIoError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies one key. Throws ConfigError(line 0) on unknown keys or malformed
/// values; range checks are left to ExperimentConfig::validate.
void apply_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses config text. Missing keys keep their defaults; the result is
/// validated and contradictions are reported against the offending line.
ExperimentConfig parse_config_text(std::string_view text, const std::string& source = "<config>");

ExperimentConfig parse_config(const std::filesystem::path& path);

/// `key = value` lines for every key, reparseable into the same config.
std::string config_echo(const ExperimentConfig& cfg);

std::string coordination_to_string(const CoordinationMode& mode);

/// printf("%.6g") formatting used by every CSV and summary number.
std::string format_number(double v);

std::string summary_text(const RunResult& result);
std::string manifest_text(const RunResult& result);

/// Writes sinr_samples.csv or throughput.csv, summary.txt and manifest.txt.
/// Throws OutputError when the directory or a file cannot be written.
void emit_reports(const RunResult& result, const std::filesystem::path& out_dir);

}  // namespace d2dsim
