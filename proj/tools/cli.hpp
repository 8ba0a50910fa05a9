#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace anderson::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class KeyType { count, integer, real, text, seed };

struct KeyInfo {
  const char* name;
  KeyType type;
  const char* help;
};

/// Every key a config file, environment or flag may set.
const std::vector<KeyInfo>& config_keys();

/// Subcommand names in the order they are listed by --help.
const std::vector<std::string>& subcommands();

/// Flat key=value configuration of one run. Values are kept as the text they
/// were given in, so serialization round-trips exactly.
class RunConfig {
 public:
  /// Defaults of `command`: every key it reads has a value.
  static RunConfig defaults(const std::string& command);

  /// Parses key=value lines; blank lines and lines starting with '#' are skipped.
  static RunConfig from_text(const std::string& text);

  const std::string& command() const noexcept { return command_; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, const std::string& value);

  /// Applies key=value lines on top of the current values.
  void merge_text(const std::string& text);

  /// ANDERSON_SEED and ANDERSON_WORKERS, when present.
  void merge_environment();

  std::string to_text() const;

  std::size_t count(const std::string& key) const;
  long long integer(const std::string& key) const;
  double real(const std::string& key) const;
  std::uint64_t seed() const;
  const std::string& text(const std::string& key) const;

  /// Throws ConfigError on any malformed, non-positive or misordered value.
  void validate() const;

  /// FNV-1a of to_text() without workers, out and format.
  std::uint64_t hash() const;

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

struct RunOutput {
  std::string body;     // CSV (with metadata trailer) or JSON document
  std::string summary;  // one line: estimate +- stderr
};

/// Runs the subcommand and returns its output; throws on failure.
RunOutput execute(const RunConfig& config);

/// execute() plus file/stream handling: writes the body to `out` (stdout when
/// empty) and the summary line; on failure writes a JSON error object to
/// `err` and returns a nonzero status (2 for configuration errors, 1 otherwise).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Error object printed on failure.
std::string error_json(const std::string& type, const std::string& message);

}  // namespace anderson::cli
