#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parseid/body_class.hpp"
#include "parseid/color_features.hpp"
#include "parseid/mask_ingest.hpp"
#include "parseid/texture_features.hpp"

namespace parseid {

struct ClassFeatures {
  BodyClass body_class = BodyClass::hat;
  std::uint32_t n_pixels = 0;
  ColorFeatures color;
  LbpHistogram contour;
  LbpHistogram inner;

  friend bool operator==(const ClassFeatures&, const ClassFeatures&) = default;
};

struct FeatureRecord {
  std::string image_id;
  std::optional<int> person_id;
  std::optional<int> camera_id;
  // Sorted by class, one entry per class.
  std::vector<ClassFeatures> classes;
  std::string extractor_version;
  std::string image_path;
  std::string mask_path;
  // Content digest of the source files; lets re-extraction skip unchanged pairs.
  std::string source_digest;

  const ClassFeatures* find(BodyClass c) const noexcept;
  friend bool operator==(const FeatureRecord&, const FeatureRecord&) = default;
};

struct ExtractorOptions {
  ColorOptions color;
  std::size_t min_class_pixels = kMinClassPixels;
};

// Stable tag derived from every algorithm constant that influences stored
// features or their comparison.
std::string extractor_version(const ExtractorOptions& options = {});

FeatureRecord extract_features(const PersonImage& image, const ExtractorOptions& options = {});

// Throws StoreError unless bins are non-negative, populated only at
// rotation-minimal codes, and sum to 1 (or are all zero with no codes).
void validate_lbp_histogram(const LbpHistogram& hist, std::string_view where);

// Throws StoreError describing the first violated record invariant.
void validate_record(const FeatureRecord& record);

}  // namespace parseid
