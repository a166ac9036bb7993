#pragma once

#include <boost/property_tree/ptree.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace glucolab {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// INI-style key-value document: top-level keys plus `[section]` blocks.
/// Used for the cohort and meal files, PID parameter files, dataset
/// sidecars, manifests and run configs.
class KeyValueDoc {
 public:
  KeyValueDoc() = default;
  explicit KeyValueDoc(boost::property_tree::ptree tree) : tree_(std::move(tree)) {}

  static KeyValueDoc parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValueDoc load(const std::filesystem::path& path);

  std::string to_string() const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;

  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  void set(const std::string& key, int value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, std::size_t value) { set(key, static_cast<long long>(value)); }
  void set(const std::string& key, bool value) { set(key, std::string(value ? "true" : "false")); }
  void set_doubles(const std::string& key, const std::vector<double>& values);

  /// Names of all `[section]` blocks, in file order.
  std::vector<std::string> sections() const;
  KeyValueDoc section(const std::string& name) const;
  bool has_section(const std::string& name) const;

  const boost::property_tree::ptree& tree() const { return tree_; }

 private:
  boost::property_tree::ptree tree_;
  std::string origin_ = "<memory>";
};

std::vector<std::string> split_list(const std::string& text);

}  // namespace glucolab
