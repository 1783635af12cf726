#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "parseid/features.hpp"
#include "parseid/texture_features.hpp"
#include "parseid/mask_ingest.hpp"
#include "parseid/raster.hpp"

namespace parseid::synth {

inline constexpr int kWidth = 64;
inline constexpr int kHeight = 128;

enum class Pattern : std::uint8_t { plain, hstripes, vstripes, checker, dots, diagonal };

struct Identity {
  int person_id = 0;
  Rgb upper;
  Rgb pants;
  Rgb skin;
  Rgb hair;
  Rgb shoes;
  Pattern pattern = Pattern::plain;
  int period = 6;
  bool hat = false;
  Rgb hat_color;
};

struct DatasetSpec {
  int identities = 20;
  int views = 4;
  std::uint64_t seed = 7;
  // Each view's CIELAB L is multiplied by a factor drawn from this range.
  // {1, 1} leaves images untouched.
  double l_scale_min = 1.0;
  double l_scale_max = 1.0;
  // Spread the factors evenly over an identity's views (rotated per
  // identity) instead of drawing them independently.
  bool even_l_scale = true;
  // Standard deviation of per-pixel RGB noise.
  double noise = 3.0;
};

struct SynthImage {
  std::string stem;
  int person_id = 0;
  int camera_id = 0;
  double l_scale = 1.0;
  RgbImage rgb;
  LabelMask mask;  // raw LIP labels
};

// Identities 1..n. Upper clothing colors are pairwise distinct; identity 7
// wears red.
std::vector<Identity> make_identities(int n);

SynthImage render_view(const Identity& id, int view, std::mt19937_64& rng, double l_scale,
                       double noise);

std::vector<SynthImage> make_dataset(const DatasetSpec& spec = {});

// Market1501-style stem: 0007_c2s1_000201_00
std::string market_stem(int person_id, int camera_id, int frame);

PersonImage to_person_image(const SynthImage& image);

// Writes <dir>/images/<stem>.png and <dir>/masks/<stem>.png.
void write_dataset(const std::filesystem::path& dir, const std::vector<SynthImage>& images);

// Multiplies CIELAB L of every pixel by `factor`.
RgbImage scale_lightness(const RgbImage& rgb, double factor);

struct RecordShape {
  double class_presence = 0.6;
  double over_highlight_rate = 0.05;
  double empty_texture_rate = 0.05;
  double empty_hist_rate = 0.02;
};

// Random but internally valid feature record.
FeatureRecord random_record(std::mt19937_64& rng, std::string image_id,
                            const RecordShape& shape = {});

}  // namespace parseid::synth

namespace parseid::synth {

inline constexpr const char* kSwatchNames[] = {"smooth", "fine_knit", "coarse"};

struct Swatch {
  RgbImage rgb;
  LabelMask mask;  // upper clothes on a background frame
};

// Deterministic 64x64 texture samples for the bundled presets. Throws
// std::invalid_argument for unknown names.
Swatch make_swatch(std::string_view name);

// Contour and inner LBP histograms of the labelled region of a swatch.
TexturePair preset_from_swatch(const RgbImage& rgb, const LabelMask& mask);

}  // namespace parseid::synth

namespace parseid::synth {

// Market1501 layout: <dir>/query holds view 0 of every identity,
// <dir>/bounding_box_test the remaining views, <dir>/masks all masks.
void write_market_dataset(const std::filesystem::path& dir, const std::vector<SynthImage>& images);

}  // namespace parseid::synth
