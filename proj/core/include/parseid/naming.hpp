#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>

namespace parseid {

struct ImageIdentity {
  int person_id = 0;
  int camera_id = 0;
};

// Extracts person and camera ids from a file stem with a regex whose first
// two capture groups are the person id and the camera id.
class NamingRule {
 public:
  // `<pid>_c<cam>...`, e.g. 0002_c1s1_000451_03 or -1_c3s2_000101_00.
  static NamingRule market1501();
  // Throws ConfigError if the pattern does not compile.
  static NamingRule from_pattern(const std::string& pattern);

  std::optional<ImageIdentity> parse(std::string_view stem) const;
  const std::string& pattern() const noexcept { return pattern_; }

 private:
  explicit NamingRule(std::string pattern);

  std::string pattern_;
  std::regex regex_;
};

}  // namespace parseid
