#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "parseid/raster.hpp"

namespace parseid {

inline constexpr int kLbpBins = 256;
// Number of 8-bit codes that are minimal under circular rotation.
inline constexpr int kMinimalCodeCount = 36;

// luma = round(0.299 R + 0.587 G + 0.114 B)
std::uint8_t luma(Rgb rgb) noexcept;
GrayImage grayscale(const RgbImage& rgb);

// Smallest value among the 8 circular rotations of `code`.
std::uint8_t rotation_min(std::uint8_t code) noexcept;
// The 36 rotation-minimal codes in ascending order.
const std::array<std::uint8_t, kMinimalCodeCount>& minimal_codes() noexcept;

// Rotation-invariant LBP code with radius 1. Neighbors are read clockwise
// from the top-left; a bit is set when that neighbor is strictly brighter
// than the center. `p` must not lie on the raster border.
std::uint8_t lbp_code(const GrayImage& gray, Pixel p);

struct ContourSplit {
  std::vector<Pixel> contour;
  std::vector<Pixel> inner;
};

// Contour pixels have a 4-neighbor with a different mask label or lie on
// the raster border. All pixels of the set must carry the same label.
ContourSplit split_contour_inner(std::span<const Pixel> class_pixels, const LabelMask& mask);

// Slot of a rotation-minimal code in [0, 36), or -1 for any other code.
int minimal_code_slot(std::uint8_t code) noexcept;

// Normalized histogram of rotation-minimal codes. Bins are addressed by
// code value; only the 36 minimal codes have storage, every other bin reads
// as zero.
struct LbpHistogram {
  std::array<double, kMinimalCodeCount> slots{};
  std::uint32_t n_codes = 0;

  double bin(int code) const noexcept;
  // Throws std::invalid_argument for codes that are not rotation-minimal
  // (unless `value` is 0).
  void set_bin(int code, double value);
  std::array<double, kLbpBins> dense() const noexcept;

  bool empty() const noexcept { return n_codes == 0; }
  friend bool operator==(const LbpHistogram&, const LbpHistogram&) = default;
};

// Codes are taken from the full raster (neighbors may be outside the set);
// border pixels of the raster contribute nothing.
LbpHistogram lbp_histogram(const GrayImage& gray, std::span<const Pixel> pixels);

struct TexturePair {
  LbpHistogram contour;
  LbpHistogram inner;

  friend bool operator==(const TexturePair&, const TexturePair&) = default;
};

TexturePair lbp_histograms(const GrayImage& gray, std::span<const Pixel> class_pixels,
                           const LabelMask& mask);

// Histogram intersection; nullopt when either histogram has no codes.
std::optional<double> texture_similarity(const LbpHistogram& h1, const LbpHistogram& h2) noexcept;

}  // namespace parseid
