#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bbayes {

/// Flat `key = value` configuration.
///
/// Lines are `key = value`; `#` starts a comment; keys may be dotted
/// (`prior.dist`). Lists are comma separated. Unknown keys are kept so that
/// callers can reject them with `require_known`.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::istream& is, const std::string& origin = "<config>");
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  /// Keys starting with `prefix`, with the prefix removed.
  KeyValueConfig subtree(const std::string& prefix) const;

  /// Throws ConfigError naming the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_ = "<config>";
};

}  // namespace bbayes
