#include "parseid/query_builder.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>

#include "parseid/error.hpp"
#include "parseid/record_json.hpp"

#ifndef PARSEID_DATA_DIR
#define PARSEID_DATA_DIR "data"
#endif

namespace parseid {

namespace fs = std::filesystem;
using nlohmann::json;

TexturePresetTable TexturePresetTable::from_json(const json& j) {
  TexturePresetTable table;
  try {
    for (const auto& [name, value] : j.at("presets").items()) {
      TexturePair textures{lbp_from_json(value.at("contour")), lbp_from_json(value.at("inner"))};
      validate_lbp_histogram(textures.contour, "preset " + name + "/contour");
      validate_lbp_histogram(textures.inner, "preset " + name + "/inner");
      table.add(name, std::move(textures));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed texture presets: ") + e.what());
  } catch (const StoreError& e) {
    throw ConfigError(std::string("invalid texture preset: ") + e.what());
  }
  return table;
}

TexturePresetTable TexturePresetTable::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open texture presets");
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json TexturePresetTable::to_json() const {
  json presets = json::object();
  for (const auto& [name, textures] : presets_) {
    presets[name] = json{{"contour", lbp_to_json(textures.contour)},
                         {"inner", lbp_to_json(textures.inner)}};
  }
  return json{{"presets", std::move(presets)}};
}

void TexturePresetTable::add(std::string name, TexturePair textures) {
  presets_.insert_or_assign(std::move(name), std::move(textures));
}

const TexturePair* TexturePresetTable::find(std::string_view name) const {
  const auto it = presets_.find(name);
  return it == presets_.end() ? nullptr : &it->second;
}

std::vector<std::string> TexturePresetTable::names() const {
  std::vector<std::string> out;
  for (const auto& [name, textures] : presets_) out.push_back(name);
  return out;
}

fs::path default_preset_path() {
  if (const char* env = std::getenv("PARSEID_PRESETS"); env != nullptr && *env != '\0') {
    return env;
  }
  return fs::path(PARSEID_DATA_DIR) / "texture_presets.json";
}

std::optional<Rgb> parse_hex_color(std::string_view text) noexcept {
  if (text.starts_with('#')) text.remove_prefix(1);
  if (text.size() != 6) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::array<std::uint8_t, 3> channels{};
  for (int i = 0; i < 3; ++i) {
    const int hi = nibble(text[2 * i]);
    const int lo = nibble(text[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    channels[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgb{channels[0], channels[1], channels[2]};
}

std::string format_hex_color(Rgb color) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "#";
  for (const std::uint8_t v : {color.r, color.g, color.b}) {
    out += kDigits[v >> 4];
    out += kDigits[v & 0xF];
  }
  return out;
}

AttributeEntry parse_attribute(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw QueryError("attribute '" + std::string(text) + "' must look like class=#rrggbb[:preset]");
  }
  AttributeEntry entry;
  const std::string_view name = text.substr(0, eq);
  const auto c = class_from_name(name);
  if (!c) throw QueryError("unknown class '" + std::string(name) + "'");
  entry.body_class = *c;

  std::string_view value = text.substr(eq + 1);
  if (const auto colon = value.find(':'); colon != std::string_view::npos) {
    entry.texture_preset = std::string(value.substr(colon + 1));
    value = value.substr(0, colon);
  }
  const auto color = parse_hex_color(value);
  if (!color) throw QueryError("invalid color '" + std::string(value) + "' (expected #rrggbb)");
  entry.color = *color;
  return entry;
}

void validate_query(const AttributeQuery& query, const TexturePresetTable& presets) {
  if (query.entries.empty()) throw QueryError("attribute query has no entries");
  std::set<BodyClass> seen;
  for (const AttributeEntry& entry : query.entries) {
    if (!seen.insert(entry.body_class).second) {
      throw QueryError("duplicate class '" + std::string(class_name(entry.body_class)) + "'");
    }
    if (entry.texture_preset && presets.find(*entry.texture_preset) == nullptr) {
      std::string available;
      for (const auto& name : presets.names()) available += (available.empty() ? "" : ", ") + name;
      throw QueryError("unknown texture preset '" + *entry.texture_preset +
                       "' (available: " + available + ")");
    }
  }
}

FeatureRecord synthesize_record(const AttributeQuery& query, const TexturePresetTable& presets,
                                int spread) {
  validate_query(query, presets);
  if (spread < 0) throw QueryError("spread must be non-negative");

  FeatureRecord record;
  record.image_id = kAttributeQueryId;
  record.extractor_version = extractor_version();
  for (const AttributeEntry& entry : query.entries) {
    ClassFeatures features;
    features.body_class = entry.body_class;
    const Lab8 lab = rgb_to_lab(entry.color);
    features.color.mean = LabMean{static_cast<double>(lab.L), static_cast<double>(lab.a),
                                  static_cast<double>(lab.b)};
    const std::array<std::uint8_t, 3> values = {lab.L, lab.a, lab.b};
    for (std::size_t c = 0; c < 3; ++c) {
      const int center = values[c] / kFoldWidth;
      const int lo = std::max(0, center - spread);
      const int hi = std::min(kBins - 1, center + spread);
      for (int bin = lo; bin <= hi; ++bin) features.color.hists[c].set(bin);
    }
    if (entry.texture_preset) {
      const TexturePair* textures = presets.find(*entry.texture_preset);
      features.contour = textures->contour;
      features.inner = textures->inner;
    }
    record.classes.push_back(std::move(features));
  }
  std::sort(record.classes.begin(), record.classes.end(),
            [](const ClassFeatures& a, const ClassFeatures& b) {
              return label_of(a.body_class) < label_of(b.body_class);
            });
  return record;
}

RankingResult search_by_attributes(const AttributeQuery& query,
                                   std::span<const FeatureRecord> gallery, std::size_t k,
                                   const TexturePresetTable& presets, const ScoringConfig& config,
                                   int spread, std::size_t workers) {
  if (k == 0) throw QueryError("k must be at least 1");
  const FeatureRecord record = synthesize_record(query, presets, spread);
  RankOptions options;
  options.cross_camera = false;
  RankingResult result = rank_query(record, gallery, config, options, workers);
  if (result.ranked.size() > k) result.ranked.resize(k);
  return result;
}

}  // namespace parseid
