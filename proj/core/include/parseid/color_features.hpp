#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "parseid/raster.hpp"

namespace parseid {

inline constexpr int kRawBins = 256;
inline constexpr int kBins = 64;
inline constexpr int kFoldWidth = kRawBins / kBins;

// Threshold gain over the mean bin count used for binarization.
inline constexpr double kThresholdGain = 1.5;
// A class is over-highlighted when its raw L bin 255 holds more than this
// fraction of the class pixels.
inline constexpr double kOverHighlightFraction = 0.01;

// CIELAB in native units: L in [0,100], a/b roughly [-128,127].
struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;
};

// CIELAB packed into 8 bits per channel: L*255/100, a+128, b+128.
struct Lab8 {
  std::uint8_t L = 0;
  std::uint8_t a = 128;
  std::uint8_t b = 128;

  friend constexpr bool operator==(const Lab8&, const Lab8&) = default;
};

enum class Channel : std::uint8_t { L = 0, a = 1, b = 2 };
inline constexpr std::array<Channel, 3> kChannels = {Channel::L, Channel::a, Channel::b};
inline constexpr std::array<const char*, 3> kChannelNames = {"L", "a", "b"};

// sRGB (D65) to CIELAB.
LabColor srgb_to_lab(Rgb rgb) noexcept;
// Inverse of srgb_to_lab, rounded and clamped to 8 bits.
Rgb lab_to_srgb(const LabColor& lab) noexcept;

Lab8 encode_lab(const LabColor& lab) noexcept;
LabColor decode_lab(double L8, double a8, double b8) noexcept;

Lab8 rgb_to_lab(Rgb rgb) noexcept;
std::vector<Lab8> rgb_to_lab(std::span<const Rgb> pixels);

using RawHistogram = std::array<std::uint32_t, kRawBins>;

// A 64-bin channel histogram (256 raw bins folded by summing groups of 4).
struct ChannelHistogram {
  std::array<double, kBins> bins{};
  std::size_t n_pixels = 0;

  double total() const noexcept;
  friend bool operator==(const ChannelHistogram&, const ChannelHistogram&) = default;
};

RawHistogram raw_histogram(std::span<const std::uint8_t> values) noexcept;
ChannelHistogram reduce_histogram(const RawHistogram& raw) noexcept;
// Throws std::invalid_argument on empty input.
ChannelHistogram build_histogram(std::span<const std::uint8_t> values);

// Lightness histogram stretching: suppress sub-average bins, then walk out
// from the peak in both directions pushing half of every bin's excess over
// the new average into the next four bins, and finally drop the outermost
// non-zero bins. Deposits past either end land on the edge bin.
ChannelHistogram stretch_lightness(ChannelHistogram hist) noexcept;

// stretch_lightness without the final edge zeroing. The peak's excess is
// taken once and sent to both sides, so the peak ends at the new average.
// The bin total after suppression is preserved.
ChannelHistogram spread_lightness(ChannelHistogram hist) noexcept;

// Experimental, off by default: drop a lower-lightness peak that precedes
// the dominant one (cast shadows). Zeroes every bin up to the deepest valley
// between the two peaks.
ChannelHistogram remove_shadow_peak(ChannelHistogram hist) noexcept;

bool is_over_highlighted(const RawHistogram& raw_lightness, std::size_t n_pixels) noexcept;

// 64 presence bits. Bin 0 is the most significant bit of `bits`, so the
// 16-digit hex form reads left to right in bin order.
struct BinaryHistogram {
  std::uint64_t bits = 0;
  double threshold = 0.0;

  static constexpr std::uint64_t mask_for(int bin) noexcept {
    return std::uint64_t{1} << (kBins - 1 - bin);
  }
  bool test(int bin) const noexcept { return (bits & mask_for(bin)) != 0; }
  void set(int bin) noexcept { bits |= mask_for(bin); }
  int count() const noexcept;
  bool empty() const noexcept { return bits == 0; }

  std::string to_hex() const;
  // Throws std::invalid_argument unless given exactly 16 hex digits.
  static BinaryHistogram from_hex(std::string_view hex, double threshold = 0.0);

  friend bool operator==(const BinaryHistogram&, const BinaryHistogram&) = default;
};

// Bins at or above gain * mean(bins) are set. An all-zero histogram
// binarizes to no bits.
BinaryHistogram binarize(const ChannelHistogram& hist, double gain = kThresholdGain) noexcept;

// Mean of the 8-bit encoded values per channel.
struct LabMean {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const LabMean&, const LabMean&) = default;
};

// Throws std::invalid_argument on empty input.
LabMean lab_mean(std::span<const Lab8> pixels);

struct ColorOptions {
  bool stretch_lightness = true;
  bool remove_shadow_peak = false;
  double threshold_gain = kThresholdGain;
};

struct ColorFeatures {
  std::array<BinaryHistogram, 3> hists{};
  LabMean mean;
  bool over_highlighted = false;

  const BinaryHistogram& hist(Channel c) const noexcept {
    return hists[static_cast<std::size_t>(c)];
  }
  friend bool operator==(const ColorFeatures&, const ColorFeatures&) = default;
};

// Full color descriptor of one class region. Throws on empty input.
ColorFeatures extract_color(std::span<const Lab8> pixels, const ColorOptions& options = {});

}  // namespace parseid
