#include "glucolab/util/keyvalue.hpp"

#include <boost/property_tree/ini_parser.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

#include "glucolab/util/errors.hpp"
#include "glucolab/util/hashing.hpp"

namespace glucolab {

namespace pt = boost::property_tree;

std::string format_double(double value) {
  if (!std::isfinite(value)) throw NumericalError("refusing to format non-finite value");
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buffer, end);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

KeyValueDoc KeyValueDoc::parse(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  KeyValueDoc doc(std::move(tree));
  doc.origin_ = origin;
  return doc;
}

KeyValueDoc KeyValueDoc::load(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw MissingArtifactError("file not found: '" + path.string() + "'");
  }
  return parse(read_file(path), path.string());
}

std::string KeyValueDoc::to_string() const {
  std::ostringstream out;
  pt::write_ini(out, tree_);
  return out.str();
}

void KeyValueDoc::save(const std::filesystem::path& path) const { write_file_atomic(path, to_string()); }

bool KeyValueDoc::has(const std::string& key) const {
  return static_cast<bool>(tree_.get_optional<std::string>(pt::ptree::path_type(key, '.')));
}

std::string KeyValueDoc::get_string(const std::string& key) const {
  auto value = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
  if (!value) throw ConfigError(origin_ + ": missing key '" + key + "'");
  return trim(*value);
}

std::string KeyValueDoc::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double KeyValueDoc::get_double(const std::string& key) const {
  return parse_double(get_string(key), key);
}

double KeyValueDoc::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueDoc::get_int(const std::string& key) const {
  const double value = get_double(key);
  if (value != std::floor(value) || std::abs(value) > 9.0e15) {
    throw ConfigError(origin_ + ": key '" + key + "' must be an integer");
  }
  return static_cast<long long>(value);
}

long long KeyValueDoc::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueDoc::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = get_string(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(origin_ + ": key '" + key + "' must be a boolean");
}

std::vector<double> KeyValueDoc::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get_string(key))) out.push_back(parse_double(item, key));
  return out;
}

std::vector<std::string> KeyValueDoc::get_strings(const std::string& key) const {
  return split_list(get_string(key));
}

void KeyValueDoc::set(const std::string& key, const std::string& value) {
  tree_.put(pt::ptree::path_type(key, '.'), value);
}

void KeyValueDoc::set(const std::string& key, double value) { set(key, format_double(value)); }

void KeyValueDoc::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

void KeyValueDoc::set_doubles(const std::string& key, const std::vector<double>& values) {
  std::string text;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text += ", ";
    text += format_double(values[i]);
  }
  set(key, text);
}

std::vector<std::string> KeyValueDoc::sections() const {
  std::vector<std::string> out;
  for (const auto& [name, child] : tree_) {
    if (!child.empty()) out.push_back(name);
  }
  return out;
}

bool KeyValueDoc::has_section(const std::string& name) const {
  auto child = tree_.get_child_optional(pt::ptree::path_type(name, '\0'));
  return child && !child->empty();
}

KeyValueDoc KeyValueDoc::section(const std::string& name) const {
  auto child = tree_.get_child_optional(pt::ptree::path_type(name, '\0'));
  if (!child || child->empty()) throw ConfigError(origin_ + ": missing section [" + name + "]");
  KeyValueDoc doc(*child);
  doc.origin_ = origin_ + " [" + name + "]";
  return doc;
}

}  // namespace glucolab
