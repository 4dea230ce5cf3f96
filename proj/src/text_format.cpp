#include "fcs/text_format.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace fcs::text {
namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const Section &s) {
  return s.name.empty() ? std::string("top level") : "[" + s.name + "] at line " + std::to_string(s.line);
}

template <typename T> T parse_number(const std::string &text, const std::string &key, const Section &s) {
  T value{};
  const char *first = text.data();
  const char *last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("bad value '" + text + "' for '" + key + "' in " + where(s));
  return value;
}

} // namespace

const std::string &Section::get(const std::string &key) const {
  const auto it = values_.find(key);
  if (it == values_.end())
    throw std::runtime_error("missing key '" + key + "' in " + where(*this));
  return it->second;
}

std::string Section::get_or(const std::string &key, const std::string &fallback) const {
  return has(key) ? get(key) : fallback;
}

int Section::get_int(const std::string &key) const { return parse_number<int>(get(key), key, *this); }
int Section::get_int_or(const std::string &key, int fallback) const { return has(key) ? get_int(key) : fallback; }

double Section::get_double(const std::string &key) const { return parse_number<double>(get(key), key, *this); }
double Section::get_double_or(const std::string &key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Section::get_u64(const std::string &key) const {
  return parse_number<std::uint64_t>(get(key), key, *this);
}
std::uint64_t Section::get_u64_or(const std::string &key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

bool Section::get_bool_or(const std::string &key, bool fallback) const {
  if (!has(key))
    return fallback;
  const std::string &v = get(key);
  if (v == "true" || v == "yes" || v == "1")
    return true;
  if (v == "false" || v == "no" || v == "0")
    return false;
  throw std::runtime_error("bad boolean '" + v + "' for '" + key + "' in " + where(*this));
}

Document parse_key_values(const std::string &text) {
  Document doc;
  Section *current = &doc.global;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty())
      continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::runtime_error("unterminated section header at line " + std::to_string(line_no));
      doc.sections.push_back(Section{});
      doc.sections.back().name = trim(line.substr(1, line.size() - 2));
      doc.sections.back().line = line_no;
      current = &doc.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("expected 'key = value' at line " + std::to_string(line_no));
    current->set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return doc;
}

std::vector<std::string> split_list(const std::string &value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty())
      out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string &value) {
  std::vector<double> out;
  Section anon;
  for (const auto &item : split_list(value))
    out.push_back(parse_number<double>(item, "list", anon));
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  if (std::isnan(v))
    return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc())
    throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

} // namespace fcs::text
