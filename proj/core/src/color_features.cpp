#include "parseid/color_features.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace parseid {
namespace {

// D65 reference white.
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;
constexpr double kDelta = 6.0 / 29.0;

const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

double lab_f(double t) {
  return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inverse(double t) {
  return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0);
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

double gamma_encode(double c) {
  return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

double sum_bins(const std::array<double, kBins>& bins) {
  return std::accumulate(bins.begin(), bins.end(), 0.0);
}

}  // namespace

LabColor srgb_to_lab(Rgb rgb) noexcept {
  const auto& lin = linear_table();
  const double r = lin[rgb.r];
  const double g = lin[rgb.g];
  const double b = lin[rgb.b];
  const double x = (0.4124564 * r + 0.3575761 * g + 0.1804375 * b) / kWhiteX;
  const double y = (0.2126729 * r + 0.7151522 * g + 0.0721750 * b) / kWhiteY;
  const double z = (0.0193339 * r + 0.1191920 * g + 0.9503041 * b) / kWhiteZ;
  const double fx = lab_f(x);
  const double fy = lab_f(y);
  const double fz = lab_f(z);
  return LabColor{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb lab_to_srgb(const LabColor& lab) noexcept {
  const double fy = (lab.L + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const double x = kWhiteX * lab_f_inverse(fx);
  const double y = kWhiteY * lab_f_inverse(fy);
  const double z = kWhiteZ * lab_f_inverse(fz);
  const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
  const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
  const double b = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
  auto encode = [](double c) { return to_byte(255.0 * gamma_encode(std::clamp(c, 0.0, 1.0))); };
  return Rgb{encode(r), encode(g), encode(b)};
}

Lab8 encode_lab(const LabColor& lab) noexcept {
  return Lab8{to_byte(lab.L * 255.0 / 100.0), to_byte(lab.a + 128.0), to_byte(lab.b + 128.0)};
}

LabColor decode_lab(double L8, double a8, double b8) noexcept {
  return LabColor{L8 * 100.0 / 255.0, a8 - 128.0, b8 - 128.0};
}

Lab8 rgb_to_lab(Rgb rgb) noexcept { return encode_lab(srgb_to_lab(rgb)); }

std::vector<Lab8> rgb_to_lab(std::span<const Rgb> pixels) {
  std::vector<Lab8> out;
  out.reserve(pixels.size());
  for (const Rgb& p : pixels) out.push_back(rgb_to_lab(p));
  return out;
}

double ChannelHistogram::total() const noexcept { return sum_bins(bins); }

RawHistogram raw_histogram(std::span<const std::uint8_t> values) noexcept {
  RawHistogram raw{};
  for (const std::uint8_t v : values) ++raw[v];
  return raw;
}

ChannelHistogram reduce_histogram(const RawHistogram& raw) noexcept {
  ChannelHistogram hist;
  for (int i = 0; i < kRawBins; ++i) {
    hist.bins[i / kFoldWidth] += raw[i];
    hist.n_pixels += raw[i];
  }
  return hist;
}

ChannelHistogram build_histogram(std::span<const std::uint8_t> values) {
  if (values.empty()) throw std::invalid_argument("histogram of an empty pixel set");
  return reduce_histogram(raw_histogram(values));
}

ChannelHistogram spread_lightness(ChannelHistogram hist) noexcept {
  auto& h = hist.bins;

  const double average = sum_bins(h) / kBins;
  for (double& v : h) {
    if (v < average) v = 0.0;
  }
  const double new_average = sum_bins(h) / kBins;
  const int peak = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());

  auto deposit = [&](int from, int direction, double excess) {
    for (int k = 1; k <= 4; ++k) {
      h[std::clamp(from + direction * k, 0, kBins - 1)] += 0.25 * excess;
    }
  };
  auto push_excess = [&](int i, int direction) {
    if (h[i] <= new_average) return;
    const double excess = 0.5 * (h[i] - new_average);
    h[i] -= excess;
    deposit(i, direction, excess);
  };

  if (h[peak] > new_average) {
    const double excess = 0.5 * (h[peak] - new_average);
    h[peak] -= 2.0 * excess;
    deposit(peak, +1, excess);
    deposit(peak, -1, excess);
  }
  for (int i = peak + 1; i < kBins; ++i) push_excess(i, +1);
  for (int i = peak - 1; i >= 0; --i) push_excess(i, -1);
  return hist;
}

ChannelHistogram stretch_lightness(ChannelHistogram hist) noexcept {
  hist = spread_lightness(std::move(hist));
  auto& h = hist.bins;
  const auto nonzero = [](double v) { return v != 0.0; };
  const auto first = std::find_if(h.begin(), h.end(), nonzero);
  if (first != h.end()) {
    const auto last = std::find_if(h.rbegin(), h.rend(), nonzero);
    *first = 0.0;
    *last = 0.0;
  }
  return hist;
}

ChannelHistogram remove_shadow_peak(ChannelHistogram hist) noexcept {
  auto& h = hist.bins;
  const int peak = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
  if (peak < 2 || h[peak] <= 0.0) return hist;

  // Strongest local maximum left of the dominant peak.
  int shadow = -1;
  for (int i = 0; i < peak; ++i) {
    const bool rising = i == 0 || h[i] > h[i - 1];
    if (rising && h[i] >= h[i + 1] && h[i] >= 0.2 * h[peak] &&
        (shadow < 0 || h[i] > h[shadow])) {
      shadow = i;
    }
  }
  if (shadow < 0) return hist;

  const auto valley = std::min_element(h.begin() + shadow, h.begin() + peak);
  if (*valley > 0.5 * h[shadow]) return hist;
  std::fill(h.begin(), valley + 1, 0.0);
  return hist;
}

bool is_over_highlighted(const RawHistogram& raw_lightness, std::size_t n_pixels) noexcept {
  return static_cast<std::uint64_t>(raw_lightness[kRawBins - 1]) * 100 > n_pixels;
}

int BinaryHistogram::count() const noexcept { return std::popcount(bits); }

std::string BinaryHistogram::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[i] = kDigits[(bits >> (60 - 4 * i)) & 0xF];
  return out;
}

BinaryHistogram BinaryHistogram::from_hex(std::string_view hex, double threshold) {
  if (hex.size() != 16) throw std::invalid_argument("bitmask must have 16 hex digits");
  std::uint64_t value = 0;
  const auto [end, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
  if (ec != std::errc{} || end != hex.data() + hex.size()) {
    throw std::invalid_argument("invalid hex bitmask '" + std::string(hex) + "'");
  }
  return BinaryHistogram{value, threshold};
}

BinaryHistogram binarize(const ChannelHistogram& hist, double gain) noexcept {
  BinaryHistogram out;
  const double total = hist.total();
  if (total <= 0.0) return out;
  out.threshold = gain * total / kBins;
  for (int j = 0; j < kBins; ++j) {
    if (hist.bins[j] >= out.threshold) out.set(j);
  }
  return out;
}

LabMean lab_mean(std::span<const Lab8> pixels) {
  if (pixels.empty()) throw std::invalid_argument("Lab mean of an empty pixel set");
  std::uint64_t L = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  for (const Lab8& p : pixels) {
    L += p.L;
    a += p.a;
    b += p.b;
  }
  const auto n = static_cast<double>(pixels.size());
  return LabMean{static_cast<double>(L) / n, static_cast<double>(a) / n,
                 static_cast<double>(b) / n};
}

ColorFeatures extract_color(std::span<const Lab8> pixels, const ColorOptions& options) {
  if (pixels.empty()) throw std::invalid_argument("color features of an empty pixel set");

  std::array<RawHistogram, 3> raw{};
  for (const Lab8& p : pixels) {
    ++raw[0][p.L];
    ++raw[1][p.a];
    ++raw[2][p.b];
  }

  ColorFeatures out;
  out.over_highlighted = is_over_highlighted(raw[0], pixels.size());

  ChannelHistogram lightness = reduce_histogram(raw[0]);
  if (options.remove_shadow_peak) lightness = remove_shadow_peak(lightness);
  if (options.stretch_lightness) lightness = stretch_lightness(lightness);

  out.hists[0] = binarize(lightness, options.threshold_gain);
  out.hists[1] = binarize(reduce_histogram(raw[1]), options.threshold_gain);
  out.hists[2] = binarize(reduce_histogram(raw[2]), options.threshold_gain);
  out.mean = lab_mean(pixels);
  return out;
}

}  // namespace parseid
