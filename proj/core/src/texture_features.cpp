#include "parseid/texture_features.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace parseid {
namespace {

constexpr std::uint8_t rotate_right(std::uint8_t v, int n) {
  return static_cast<std::uint8_t>((v >> n) | (v << (8 - n)));
}

constexpr std::array<std::uint8_t, 256> kRotationMin = [] {
  std::array<std::uint8_t, 256> table{};
  for (int code = 0; code < 256; ++code) {
    auto best = static_cast<std::uint8_t>(code);
    for (int n = 1; n < 8; ++n) best = std::min(best, rotate_right(static_cast<std::uint8_t>(code), n));
    table[code] = best;
  }
  return table;
}();

constexpr std::array<std::uint8_t, kMinimalCodeCount> kMinimalCodes = [] {
  std::array<std::uint8_t, kMinimalCodeCount> codes{};
  std::size_t n = 0;
  for (int code = 0; code < 256; ++code) {
    if (kRotationMin[code] == code) codes[n++] = static_cast<std::uint8_t>(code);
  }
  return codes;
}();

constexpr std::array<std::int8_t, 256> kSlots = [] {
  std::array<std::int8_t, 256> slots{};
  slots.fill(-1);
  for (std::size_t i = 0; i < kMinimalCodes.size(); ++i) {
    slots[kMinimalCodes[i]] = static_cast<std::int8_t>(i);
  }
  return slots;
}();

// Clockwise from the top-left neighbor.
constexpr std::array<Pixel, 8> kNeighbors = {{
    {-1, -1}, {0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0},
}};

bool on_border(const GrayImage& gray, Pixel p) {
  return p.x <= 0 || p.y <= 0 || p.x >= gray.width() - 1 || p.y >= gray.height() - 1;
}

std::uint8_t code_at(const GrayImage& gray, Pixel p) {
  const std::uint8_t center = gray[p];
  unsigned code = 0;
  for (int k = 0; k < 8; ++k) {
    if (gray.at(p.x + kNeighbors[k].x, p.y + kNeighbors[k].y) > center) code |= 1u << k;
  }
  return kRotationMin[code];
}

}  // namespace

std::uint8_t luma(Rgb rgb) noexcept {
  const unsigned weighted = 299u * rgb.r + 587u * rgb.g + 114u * rgb.b;
  return static_cast<std::uint8_t>((weighted + 500u) / 1000u);
}

GrayImage grayscale(const RgbImage& rgb) {
  GrayImage gray(rgb.width(), rgb.height());
  std::transform(rgb.data().begin(), rgb.data().end(), gray.data().begin(), luma);
  return gray;
}

std::uint8_t rotation_min(std::uint8_t code) noexcept { return kRotationMin[code]; }

const std::array<std::uint8_t, kMinimalCodeCount>& minimal_codes() noexcept {
  return kMinimalCodes;
}

int minimal_code_slot(std::uint8_t code) noexcept { return kSlots[code]; }

double LbpHistogram::bin(int code) const noexcept {
  if (code < 0 || code >= kLbpBins) return 0.0;
  const int slot = kSlots[code];
  return slot < 0 ? 0.0 : slots[slot];
}

void LbpHistogram::set_bin(int code, double value) {
  const int slot = code >= 0 && code < kLbpBins ? kSlots[code] : -1;
  if (slot < 0) {
    if (value == 0.0) return;
    throw std::invalid_argument("LBP bin " + std::to_string(code) +
                                " is not a rotation-minimal code");
  }
  slots[slot] = value;
}

std::array<double, kLbpBins> LbpHistogram::dense() const noexcept {
  std::array<double, kLbpBins> out{};
  for (std::size_t i = 0; i < kMinimalCodes.size(); ++i) out[kMinimalCodes[i]] = slots[i];
  return out;
}

std::uint8_t lbp_code(const GrayImage& gray, Pixel p) {
  if (!gray.contains(p.x, p.y) || on_border(gray, p)) {
    throw std::invalid_argument("LBP code requested for a border pixel");
  }
  return code_at(gray, p);
}

ContourSplit split_contour_inner(std::span<const Pixel> class_pixels, const LabelMask& mask) {
  ContourSplit split;
  constexpr std::array<Pixel, 4> kFour = {{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
  for (const Pixel p : class_pixels) {
    const std::uint8_t label = mask[p];
    const bool touches_outside = std::any_of(kFour.begin(), kFour.end(), [&](Pixel d) {
      const int x = p.x + d.x;
      const int y = p.y + d.y;
      return !mask.contains(x, y) || mask.at(x, y) != label;
    });
    (touches_outside ? split.contour : split.inner).push_back(p);
  }
  return split;
}

LbpHistogram lbp_histogram(const GrayImage& gray, std::span<const Pixel> pixels) {
  std::array<std::uint32_t, kMinimalCodeCount> counts{};
  LbpHistogram hist;
  for (const Pixel p : pixels) {
    if (on_border(gray, p)) continue;
    ++counts[kSlots[code_at(gray, p)]];
    ++hist.n_codes;
  }
  if (hist.n_codes == 0) return hist;
  const auto total = static_cast<double>(hist.n_codes);
  for (int i = 0; i < kMinimalCodeCount; ++i) hist.slots[i] = counts[i] / total;
  return hist;
}

TexturePair lbp_histograms(const GrayImage& gray, std::span<const Pixel> class_pixels,
                           const LabelMask& mask) {
  const ContourSplit split = split_contour_inner(class_pixels, mask);
  return TexturePair{lbp_histogram(gray, split.contour), lbp_histogram(gray, split.inner)};
}

std::optional<double> texture_similarity(const LbpHistogram& h1, const LbpHistogram& h2) noexcept {
  if (h1.empty() || h2.empty()) return std::nullopt;
  double sum = 0.0;
  for (int i = 0; i < kMinimalCodeCount; ++i) sum += std::min(h1.slots[i], h2.slots[i]);
  // Both histograms sum to 1, so anything above is rounding.
  return std::min(sum, 1.0);
}

}  // namespace parseid
