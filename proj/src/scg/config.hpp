#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace scg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value text; '#' comments.  Unknown keys are errors, checked
// against the allowed set of the command that consumes the config.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  void set(const std::string& key, const std::string& value) { kv_[key] = value; }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_str(const std::string& key, const std::string& dflt) const;
  std::string require_str(const std::string& key) const;
  double get_num(const std::string& key, double dflt) const;
  long long get_int(const std::string& key, long long dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;

  void check_keys(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace scg
