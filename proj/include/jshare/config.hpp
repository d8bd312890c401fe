#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace jshare {

/// One block of `key = value` lines. `#` starts a comment and `[name]` opens a
/// new section, so one file can describe several scenarios.
struct ConfigSection {
  std::string name;
  std::map<std::string, std::string> values;

  std::optional<std::string> get(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  /// Comma-separated integer list.
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
};

struct ConfigFile {
  /// Keys before the first section header.
  ConfigSection global;
  std::vector<ConfigSection> sections;
};

ConfigFile parse_config(std::istream& in);
ConfigFile load_config(const std::filesystem::path& path);

}  // namespace jshare
