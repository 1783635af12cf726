#include "parseid/naming.hpp"

#include <charconv>

#include "parseid/error.hpp"

namespace parseid {
namespace {

std::optional<int> to_int(const std::string& s) {
  int value = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || end != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

NamingRule::NamingRule(std::string pattern) : pattern_(std::move(pattern)) {
  try {
    regex_ = std::regex(pattern_, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    throw ConfigError("invalid naming pattern '" + pattern_ + "': " + e.what());
  }
  if (regex_.mark_count() < 2) {
    throw ConfigError("naming pattern '" + pattern_ +
                      "' needs two capture groups (person id, camera id)");
  }
}

NamingRule NamingRule::market1501() { return NamingRule(R"(^(-?\d+)_c(\d+))"); }

NamingRule NamingRule::from_pattern(const std::string& pattern) { return NamingRule(pattern); }

std::optional<ImageIdentity> NamingRule::parse(std::string_view stem) const {
  std::match_results<std::string_view::const_iterator> match;
  if (!std::regex_search(stem.begin(), stem.end(), match, regex_)) return std::nullopt;
  const auto person = to_int(match[1].str());
  const auto camera = to_int(match[2].str());
  if (!person || !camera) return std::nullopt;
  return ImageIdentity{*person, *camera};
}

}  // namespace parseid
