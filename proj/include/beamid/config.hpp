#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace beamid {

/// Line-oriented `key = value` configuration with `#` comments. Keys carry a
/// section prefix (`grid.n_elements`). Later lines override earlier ones.
class RunConfig {
 public:
  RunConfig() = default;

  /// Throws ConfigError on malformed lines.
  static RunConfig parse(std::istream& is, const std::string& source = "<config>");
  /// Relative file references in the config resolve against its directory.
  static RunConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return entries_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::optional<double> get_optional_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Path value resolved against the config directory; ConfigError naming
  /// the path if the file does not exist.
  std::optional<std::filesystem::path> get_existing_path(const std::string& key) const;

  /// ConfigError listing every key not in `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::filesystem::path& base_dir() const { return base_dir_; }

  /// FNV-1a 64 over the sorted `key=value` lines.
  std::uint64_t hash() const;

  /// Every key looked up so far with the value in effect (explicit or default).
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

 private:
  void note(const std::string& key, const std::string& value) const { resolved_[key] = value; }

  std::map<std::string, std::string> entries_;
  mutable std::map<std::string, std::string> resolved_;
  std::filesystem::path base_dir_ = ".";
};

}  // namespace beamid
