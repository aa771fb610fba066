#include "beamid/config.hpp"

#include "beamid/errors.hpp"
#include "csv_util.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace beamid {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

RunConfig RunConfig::parse(std::istream& is, const std::string& source) {
  RunConfig c;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(lineno) + ": expected `key = value`");
    auto key = trim(std::string_view(text).substr(0, eq));
    auto value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty())
      throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
    c.entries_[key] = value;
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  auto c = parse(in, path.string());
  c.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

void RunConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto v = get(key).value_or(fallback);
  note(key, v);
  return v;
}

std::optional<double> RunConfig::get_optional_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  double out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': '" + *v + "' is not a number");
  note(key, *v);
  return out;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get_optional_double(key);
  if (!v) note(key, detail::fmt_double(fallback));
  return v.value_or(fallback);
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  const auto v = get(key);
  if (!v) {
    note(key, std::to_string(fallback));
    return fallback;
  }
  int out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': '" + *v + "' is not an integer");
  note(key, *v);
  return out;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) {
    note(key, std::to_string(fallback));
    return fallback;
  }
  std::uint64_t out = 0;
  const auto* end = v->data() + v->size();
  const auto [ptr, ec] = std::from_chars(v->data(), end, out);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("key '" + key + "': '" + *v + "' is not an unsigned integer");
  note(key, *v);
  return out;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  const auto v = get(key);
  if (!v) {
    note(key, fallback ? "true" : "false");
    return fallback;
  }
  note(key, *v);
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError("key '" + key + "': '" + *v + "' is not a boolean");
}

std::optional<std::filesystem::path> RunConfig::get_existing_path(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  std::filesystem::path p(*v);
  if (p.is_relative()) p = base_dir_ / p;
  if (!std::filesystem::is_regular_file(p))
    throw ConfigError("key '" + key + "': file '" + p.string() + "' does not exist");
  note(key, *v);
  return p;
}

void RunConfig::reject_unknown(const std::set<std::string>& known) const {
  std::string bad;
  for (const auto& [k, v] : entries_)
    if (!known.count(k)) bad += (bad.empty() ? "" : ", ") + k;
  if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  auto feed = [&](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
  };
  for (const auto& [k, v] : entries_) {
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

}  // namespace beamid
