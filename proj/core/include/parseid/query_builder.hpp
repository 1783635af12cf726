#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "parseid/body_class.hpp"
#include "parseid/evaluation.hpp"
#include "parseid/features.hpp"
#include "parseid/raster.hpp"
#include "parseid/scoring.hpp"

namespace parseid {

// Half-width, in 64-bin units, of the window of set bits around a color.
inline constexpr int kDefaultSpread = 2;
inline constexpr const char* kAttributeQueryId = "attribute-query";

struct AttributeEntry {
  BodyClass body_class = BodyClass::upper_clothes;
  Rgb color;
  std::optional<std::string> texture_preset;
};

struct AttributeQuery {
  std::vector<AttributeEntry> entries;
};

// Named (contour, inner) LBP histogram pairs for typical textures.
class TexturePresetTable {
 public:
  // {"presets": {"<name>": {"contour": <lbp>, "inner": <lbp>}}}
  static TexturePresetTable from_json(const nlohmann::json& j);
  static TexturePresetTable load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void add(std::string name, TexturePair textures);
  const TexturePair* find(std::string_view name) const;
  std::vector<std::string> names() const;
  bool empty() const noexcept { return presets_.empty(); }

 private:
  std::map<std::string, TexturePair, std::less<>> presets_;
};

// Directory holding the bundled presets file, as configured at build time.
std::filesystem::path default_preset_path();

// "#rrggbb" or "rrggbb".
std::optional<Rgb> parse_hex_color(std::string_view text) noexcept;
std::string format_hex_color(Rgb color);

// "class=#rrggbb" with an optional ":preset" suffix. Throws QueryError.
AttributeEntry parse_attribute(std::string_view text);

// Throws QueryError on an empty query, a duplicate class or an unknown
// preset (the message lists the available presets).
void validate_query(const AttributeQuery& query, const TexturePresetTable& presets);

// Per entry: Lab mean from the color, bits in [bin - spread, bin + spread]
// (clamped) around the color's bin in each channel, textures from the
// preset or absent.
FeatureRecord synthesize_record(const AttributeQuery& query, const TexturePresetTable& presets,
                                int spread = kDefaultSpread);

// Top-k gallery records by score against the synthesized record.
RankingResult search_by_attributes(const AttributeQuery& query,
                                   std::span<const FeatureRecord> gallery, std::size_t k,
                                   const TexturePresetTable& presets,
                                   const ScoringConfig& config = {},
                                   int spread = kDefaultSpread, std::size_t workers = 1);

}  // namespace parseid
