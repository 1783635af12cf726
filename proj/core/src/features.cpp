#include "parseid/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "parseid/digest.hpp"
#include "parseid/error.hpp"
#include "parseid/scoring.hpp"

namespace parseid {

const ClassFeatures* FeatureRecord::find(BodyClass c) const noexcept {
  const auto it = std::lower_bound(
      classes.begin(), classes.end(), c,
      [](const ClassFeatures& f, BodyClass key) { return label_of(f.body_class) < label_of(key); });
  return it != classes.end() && it->body_class == c ? &*it : nullptr;
}

std::string extractor_version(const ExtractorOptions& options) {
  std::ostringstream canonical;
  canonical << "schema=1;lab=srgb-d65-8bit;bins=" << kBins << ";fold=sum"
            << ";k_inc=" << options.color.threshold_gain
            << ";over=" << kOverHighlightFraction
            << ";stretch=" << options.color.stretch_lightness
            << ";shadow=" << options.color.remove_shadow_peak
            << ";lbp=r1n8-rotmin-strict;contour=4n"
            << ";min_pixels=" << options.min_class_pixels
            << ";k_d=" << kDistanceScale;
  Fnv1a hash;
  hash.update(canonical.str());
  return "px1-" + hash.hex();
}

FeatureRecord extract_features(const PersonImage& image, const ExtractorOptions& options) {
  FeatureRecord record;
  record.image_id = image.image_id;
  record.extractor_version = extractor_version(options);

  const GrayImage gray = grayscale(image.rgb);
  std::vector<Lab8> lab;
  for (const auto& [body_class, pixels] : class_pixel_sets(image, options.min_class_pixels)) {
    lab.clear();
    lab.reserve(pixels.size());
    for (const Pixel p : pixels) lab.push_back(rgb_to_lab(image.rgb[p]));

    ClassFeatures features;
    features.body_class = body_class;
    features.n_pixels = static_cast<std::uint32_t>(pixels.size());
    features.color = extract_color(lab, options.color);
    TexturePair textures = lbp_histograms(gray, pixels, image.mask);
    features.contour = textures.contour;
    features.inner = textures.inner;
    record.classes.push_back(std::move(features));
  }
  return record;
}

void validate_lbp_histogram(const LbpHistogram& hist, std::string_view where) {
  double sum = 0.0;
  for (const double v : hist.slots) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw StoreError(std::string(where) + ": negative or non-finite LBP bin");
    }
    sum += v;
  }
  if (hist.n_codes == 0 ? sum != 0.0 : std::abs(sum - 1.0) > 1e-9) {
    throw StoreError(std::string(where) + ": LBP histogram is not normalized");
  }
}

void validate_record(const FeatureRecord& record) {
  for (std::size_t i = 0; i < record.classes.size(); ++i) {
    const ClassFeatures& f = record.classes[i];
    const std::string where = record.image_id + "/" + std::string(class_name(f.body_class));
    if (i > 0 && label_of(record.classes[i - 1].body_class) >= label_of(f.body_class)) {
      throw StoreError(record.image_id + ": classes must be sorted and unique");
    }
    for (const double v : {f.color.mean.L, f.color.mean.a, f.color.mean.b}) {
      if (!(v >= 0.0 && v <= 255.0)) throw StoreError(where + ": Lab mean outside [0, 255]");
    }
    validate_lbp_histogram(f.contour, where + "/contour");
    validate_lbp_histogram(f.inner, where + "/inner");
  }
}

}  // namespace parseid
