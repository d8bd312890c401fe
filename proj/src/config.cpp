#include "jshare/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

#include "jshare/common.hpp"

namespace jshare {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find(',', start);
    auto item = trim(std::string_view(text).substr(
        start, end == std::string::npos ? std::string::npos : end - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

template <typename T>
T to_number(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("config key '" + key + "': invalid number '" + text + "'");
  }
  return value;
}

}  // namespace

std::optional<std::string> ConfigSection::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) return std::nullopt;
  return it->second;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  auto v = get(key);
  return v ? to_number<double>(key, *v) : fallback;
}

int ConfigSection::get_int(const std::string& key, int fallback) const {
  auto v = get(key);
  return v ? to_number<int>(key, *v) : fallback;
}

std::string ConfigSection::get_string(const std::string& key,
                                      const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::vector<int> ConfigSection::get_int_list(const std::string& key,
                                             const std::vector<int>& fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::vector<int> out;
  for (const auto& item : split_commas(*v)) out.push_back(to_number<int>(key, item));
  return out;
}

std::vector<std::string> ConfigSection::get_list(const std::string& key,
                                                 const std::vector<std::string>& fallback) const {
  auto v = get(key);
  return v ? split_commas(*v) : fallback;
}

ConfigFile parse_config(std::istream& in) {
  ConfigFile file;
  ConfigSection* current = &file.global;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) throw ParseError(line_no, "bad section header");
      file.sections.push_back(ConfigSection{trim(text.substr(1, text.size() - 2)), {}});
      current = &file.sections.back();
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ParseError(line_no, "empty key");
    current->values.insert_or_assign(key, trim(text.substr(eq + 1)));
  }
  return file;
}

ConfigFile load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return parse_config(in);
}

}  // namespace jshare
