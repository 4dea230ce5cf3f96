#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

// `key = value` text with optional repeated `[section]` headers and `#`
// comments. Used for mask sidecars and experiment plans.
namespace fcs::text {

class Section {
public:
  std::string name;
  int line = 0;

  void set(const std::string &key, const std::string &value) { values_[key] = value; }
  bool has(const std::string &key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string> &values() const { return values_; }

  /// Throws std::runtime_error naming the section when the key is missing.
  const std::string &get(const std::string &key) const;
  std::string get_or(const std::string &key, const std::string &fallback) const;
  int get_int(const std::string &key) const;
  int get_int_or(const std::string &key, int fallback) const;
  double get_double(const std::string &key) const;
  double get_double_or(const std::string &key, double fallback) const;
  std::uint64_t get_u64(const std::string &key) const;
  std::uint64_t get_u64_or(const std::string &key, std::uint64_t fallback) const;
  bool get_bool_or(const std::string &key, bool fallback) const;

private:
  std::map<std::string, std::string> values_;
};

struct Document {
  Section global;
  std::vector<Section> sections;
};

Document parse_key_values(const std::string &text);

std::vector<std::string> split_list(const std::string &value);
std::vector<double> parse_double_list(const std::string &value);

/// Shortest text that parses back to exactly the same double.
std::string format_double(double v);

class KeyValueWriter {
public:
  void add(const std::string &key, const std::string &value) { out_ << key << " = " << value << '\n'; }
  void add(const std::string &key, const char *value) { add(key, std::string(value)); }
  void add(const std::string &key, double value) { add(key, format_double(value)); }
  void add(const std::string &key, int value) { add(key, std::to_string(value)); }
  void add(const std::string &key, std::uint64_t value) { add(key, std::to_string(value)); }
  std::string str() const { return out_.str(); }

private:
  std::ostringstream out_;
};

} // namespace fcs::text
