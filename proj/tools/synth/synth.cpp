#include "synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "parseid/body_class.hpp"
#include "parseid/color_features.hpp"
#include "parseid/image_io.hpp"
#include "parseid/texture_features.hpp"

namespace parseid::synth {
namespace {

constexpr std::array<Rgb, 20> kUpper = {{
    {30, 40, 110},   {110, 160, 220}, {30, 100, 40},   {150, 210, 70},  {25, 25, 28},
    {235, 235, 230}, {200, 30, 35},   {120, 20, 25},   {235, 130, 30},  {235, 215, 50},
    {110, 40, 140},  {180, 150, 215}, {110, 70, 40},   {210, 190, 150}, {128, 128, 128},
    {235, 140, 170}, {20, 130, 130},  {120, 120, 40},  {190, 190, 190}, {70, 70, 72},
}};
constexpr std::array<Rgb, 6> kPants = {{
    {50, 60, 90}, {30, 30, 30}, {170, 150, 110}, {100, 100, 105}, {90, 65, 50}, {100, 130, 170},
}};
constexpr std::array<Rgb, 3> kSkin = {{{224, 180, 150}, {190, 140, 105}, {120, 85, 60}}};
constexpr std::array<Rgb, 4> kHair = {{{20, 18, 16}, {80, 50, 30}, {150, 110, 60}, {60, 60, 60}}};
constexpr std::array<Rgb, 3> kShoes = {{{20, 20, 20}, {230, 230, 230}, {100, 60, 40}}};

std::uint8_t clamp8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Rgb shift_lightness(Rgb c, double delta) {
  LabColor lab = srgb_to_lab(c);
  lab.L = std::clamp(lab.L + delta, 0.0, 100.0);
  return lab_to_srgb(lab);
}

struct Box {
  int x0, y0, x1, y1;  // half-open
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
};

bool in_ellipse(int x, int y, double cx, double cy, double rx, double ry) {
  const double u = (x + 0.5 - cx) / rx;
  const double v = (y + 0.5 - cy) / ry;
  return u * u + v * v <= 1.0;
}

bool pattern_on(Pattern p, int period, int u, int v) {
  const int half = std::max(1, period / 2);
  switch (p) {
    case Pattern::plain: return false;
    case Pattern::hstripes: return (v % period) < half / 2 + 1;
    case Pattern::vstripes: return (u % period) < half / 2 + 1;
    case Pattern::checker: return ((u / half) + (v / half)) % 2 == 0 && (u % half) < half / 2 + 1;
    case Pattern::dots: return (u % period) < 2 && (v % period) < 2;
    case Pattern::diagonal: return ((u + v) % period) < half / 2 + 1;
  }
  return false;
}

}  // namespace

std::vector<Identity> make_identities(int n) {
  std::vector<Identity> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const auto k = static_cast<std::size_t>(i - 1);
    Identity id;
    id.person_id = i;
    id.upper = kUpper[k % kUpper.size()];
    id.pants = kPants[(k * 5) % kPants.size()];
    id.skin = kSkin[k % kSkin.size()];
    id.hair = kHair[(k / 2) % kHair.size()];
    id.shoes = kShoes[(k / 3) % kShoes.size()];
    id.pattern = static_cast<Pattern>(k % 6);
    id.period = 4 + static_cast<int>(k % 4) * 2;
    id.hat = i % 5 == 0;
    id.hat_color = kPants[(k + 2) % kPants.size()];
    out.push_back(id);
  }
  return out;
}

RgbImage scale_lightness(const RgbImage& rgb, double factor) {
  RgbImage out(rgb.width(), rgb.height());
  for (std::size_t i = 0; i < rgb.data().size(); ++i) {
    LabColor lab = srgb_to_lab(rgb.data()[i]);
    lab.L = std::clamp(lab.L * factor, 0.0, 100.0);
    out.data()[i] = lab_to_srgb(lab);
  }
  return out;
}

SynthImage render_view(const Identity& id, int view, std::mt19937_64& rng, double l_scale,
                       double noise) {
  std::uniform_int_distribution<int> jitter(-3, 3);
  std::uniform_int_distribution<int> bg_level(90, 170);
  const int dx = jitter(rng);
  const int dy = jitter(rng);
  const int widen = jitter(rng) / 2;
  const bool mirror = view % 2 == 1;
  const Rgb stripe = shift_lightness(id.upper, srgb_to_lab(id.upper).L > 50 ? -22.0 : 22.0);

  LabelMask mask(kWidth, kHeight, 0);
  RgbImage rgb(kWidth, kHeight);
  const int bg = bg_level(rng);

  const Box torso{18 - widen + dx, 30 + dy, 46 + widen + dx, 72 + dy};
  const Box left_arm{10 - widen + dx, 32 + dy, 18 - widen + dx, 68 + dy};
  const Box right_arm{46 + widen + dx, 32 + dy, 54 + widen + dx, 68 + dy};
  const Box hips{20 + dx, 72 + dy, 44 + dx, 80 + dy};
  const Box left_leg{20 + dx, 80 + dy, 31 + dx, 112 + dy};
  const Box right_leg{33 + dx, 80 + dy, 44 + dx, 112 + dy};
  const Box left_shoe{19 + dx, 112 + dy, 31 + dx, 119 + dy};
  const Box right_shoe{33 + dx, 112 + dy, 45 + dx, 119 + dy};
  const double head_cx = 32.0 + dx;
  const double head_cy = 20.0 + dy;

  for (int y = 0; y < kHeight; ++y) {
    for (int x = 0; x < kWidth; ++x) {
      std::uint8_t label = 0;
      Rgb color{static_cast<std::uint8_t>(bg), static_cast<std::uint8_t>(bg),
                static_cast<std::uint8_t>(bg + 8 > 255 ? 255 : bg + 8)};
      if (torso.contains(x, y)) {
        label = label_of(BodyClass::upper_clothes);
        color = pattern_on(id.pattern, id.period, x - torso.x0, y - torso.y0) ? stripe : id.upper;
      } else if (left_arm.contains(x, y) || right_arm.contains(x, y)) {
        const bool left = left_arm.contains(x, y);
        label = label_of(left ? BodyClass::left_arm : BodyClass::right_arm);
        // Short sleeves in the clothing color.
        color = y < torso.y0 + 10 ? id.upper : id.skin;
        if (y < torso.y0 + 10) label = label_of(BodyClass::upper_clothes);
      } else if (hips.contains(x, y) || left_leg.contains(x, y) || right_leg.contains(x, y)) {
        label = label_of(BodyClass::pants);
        color = id.pants;
      } else if (left_shoe.contains(x, y)) {
        label = label_of(BodyClass::left_shoe);
        color = id.shoes;
      } else if (right_shoe.contains(x, y)) {
        label = label_of(BodyClass::right_shoe);
        color = id.shoes;
      } else if (id.hat && in_ellipse(x, y, head_cx, head_cy - 9.0, 10.0, 5.0)) {
        label = label_of(BodyClass::hat);
        color = id.hat_color;
      } else if (in_ellipse(x, y, head_cx, head_cy + 1.0, 7.0, 9.0)) {
        label = label_of(BodyClass::face);
        color = id.skin;
      } else if (in_ellipse(x, y, head_cx, head_cy - 3.0, 9.0, 9.0)) {
        label = label_of(BodyClass::hair);
        color = id.hair;
      } else if (y >= 28 + dy && y < 30 + dy && x >= 29 + dx && x < 35 + dx) {
        label = label_of(BodyClass::face);  // neck
        color = id.skin;
      }
      const int tx = mirror ? kWidth - 1 - x : x;
      mask.at(tx, y) = label;
      rgb.at(tx, y) = color;
    }
  }

  if (l_scale != 1.0) rgb = scale_lightness(rgb, l_scale);
  if (noise > 0.0) {
    std::normal_distribution<double> gauss(0.0, noise);
    for (Rgb& p : rgb.data()) {
      p = Rgb{clamp8(p.r + gauss(rng)), clamp8(p.g + gauss(rng)), clamp8(p.b + gauss(rng))};
    }
  }

  SynthImage out;
  out.person_id = id.person_id;
  out.camera_id = view + 1;
  out.l_scale = l_scale;
  out.stem = market_stem(id.person_id, out.camera_id, view);
  out.rgb = std::move(rgb);
  out.mask = std::move(mask);
  return out;
}

std::vector<SynthImage> make_dataset(const DatasetSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> scale(spec.l_scale_min, spec.l_scale_max);
  std::vector<SynthImage> out;
  for (const Identity& id : make_identities(spec.identities)) {
    for (int v = 0; v < spec.views; ++v) {
      double s = spec.l_scale_min;
      if (spec.l_scale_max != spec.l_scale_min) {
        if (spec.even_l_scale && spec.views > 1) {
          const int step = (v + id.person_id) % spec.views;
          s += (spec.l_scale_max - spec.l_scale_min) * step / (spec.views - 1);
        } else {
          s = scale(rng);
        }
      }
      out.push_back(render_view(id, v, rng, s, spec.noise));
    }
  }
  return out;
}

std::string market_stem(int person_id, int camera_id, int frame) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%04d_c%ds1_%06d_00", person_id, camera_id, frame * 100 + 1);
  return buf;
}

PersonImage to_person_image(const SynthImage& image) {
  return make_person_image(image.stem, image.rgb, image.mask, image.stem);
}

void write_dataset(const std::filesystem::path& dir, const std::vector<SynthImage>& images) {
  std::filesystem::create_directories(dir / "images");
  std::filesystem::create_directories(dir / "masks");
  for (const SynthImage& img : images) {
    write_rgb_png(dir / "images" / (img.stem + ".png"), img.rgb);
    write_label_png(dir / "masks" / (img.stem + ".png"), img.mask);
  }
}

FeatureRecord random_record(std::mt19937_64& rng, std::string image_id, const RecordShape& shape) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> bin(0, kBins - 1);
  std::uniform_int_distribution<int> run(1, 12);
  std::uniform_int_distribution<int> slot(0, kMinimalCodeCount - 1);
  std::uniform_int_distribution<int> n_slots(1, kMinimalCodeCount);

  auto random_bits = [&] {
    BinaryHistogram h;
    h.threshold = 1.0 + unit(rng) * 100.0;
    if (unit(rng) < shape.empty_hist_rate) return h;
    const int runs = 1 + static_cast<int>(unit(rng) * 3);
    for (int r = 0; r < runs; ++r) {
      const int start = bin(rng);
      const int len = run(rng);
      for (int i = start; i < std::min(kBins, start + len); ++i) h.set(i);
    }
    if (unit(rng) < 0.3) h.bits ^= rng();
    return h;
  };
  auto random_lbp = [&] {
    LbpHistogram h;
    if (unit(rng) < shape.empty_texture_rate) return h;
    const int k = n_slots(rng);
    for (int i = 0; i < k; ++i) h.slots[static_cast<std::size_t>(slot(rng))] += unit(rng) + 1e-3;
    const double sum = std::accumulate(h.slots.begin(), h.slots.end(), 0.0);
    for (double& v : h.slots) v /= sum;
    h.n_codes = 1 + static_cast<std::uint32_t>(unit(rng) * 4000);
    return h;
  };

  FeatureRecord rec;
  rec.image_id = std::move(image_id);
  rec.extractor_version = extractor_version();
  for (const BodyClass c : kBodyClasses) {
    if (unit(rng) >= shape.class_presence) continue;
    ClassFeatures f;
    f.body_class = c;
    f.n_pixels = 16 + static_cast<std::uint32_t>(unit(rng) * 2000);
    for (auto& h : f.color.hists) h = random_bits();
    f.color.mean = LabMean{unit(rng) * 255.0, 40.0 + unit(rng) * 176.0, 40.0 + unit(rng) * 176.0};
    f.color.over_highlighted = unit(rng) < shape.over_highlight_rate;
    f.contour = random_lbp();
    f.inner = random_lbp();
    rec.classes.push_back(f);
  }
  return rec;
}

}  // namespace parseid::synth

namespace parseid::synth {

Swatch make_swatch(std::string_view name) {
  constexpr int kSize = 64;
  constexpr int kFrame = 6;
  Swatch s{RgbImage(kSize, kSize, Rgb{128, 128, 128}), LabelMask(kSize, kSize, 0)};
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<int> jitter(-2, 2);
  for (int y = kFrame; y < kSize - kFrame; ++y) {
    for (int x = kFrame; x < kSize - kFrame; ++x) {
      int v = 0;
      if (name == "smooth") {
        v = 150 + (x + y) / 8;
      } else if (name == "fine_knit") {
        v = ((x + (y % 2)) % 2 == 0) ? 110 : 190;
      } else if (name == "coarse") {
        v = ((x / 6 + y / 6) % 2 == 0) ? 70 : 200;
      } else {
        throw std::invalid_argument("unknown swatch " + std::string(name));
      }
      const auto g = static_cast<std::uint8_t>(std::clamp(v + jitter(rng), 0, 255));
      s.rgb.at(x, y) = Rgb{g, g, g};
      s.mask.at(x, y) = label_of(BodyClass::upper_clothes);
    }
  }
  return s;
}

TexturePair preset_from_swatch(const RgbImage& rgb, const LabelMask& mask) {
  const PersonImage image = make_person_image("swatch", rgb, mask, "swatch");
  const auto sets = class_pixel_sets(image, kMinClassPixels);
  const auto it = sets.find(BodyClass::upper_clothes);
  if (it == sets.end()) throw std::invalid_argument("swatch has no labelled region");
  return lbp_histograms(grayscale(image.rgb), it->second, image.mask);
}

}  // namespace parseid::synth

namespace parseid::synth {

void write_market_dataset(const std::filesystem::path& dir, const std::vector<SynthImage>& images) {
  for (const char* sub : {"query", "bounding_box_test", "masks"}) {
    std::filesystem::create_directories(dir / sub);
  }
  for (const SynthImage& img : images) {
    const char* sub = img.camera_id == 1 ? "query" : "bounding_box_test";
    write_rgb_png(dir / sub / (img.stem + ".png"), img.rgb);
    write_label_png(dir / "masks" / (img.stem + ".png"), img.mask);
  }
}

}  // namespace parseid::synth
