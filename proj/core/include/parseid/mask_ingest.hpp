#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "parseid/body_class.hpp"
#include "parseid/raster.hpp"

namespace parseid {

// Classes covering fewer pixels than this are dropped from the pixel sets.
inline constexpr std::size_t kMinClassPixels = 16;

// An RGB raster with its merged parsing mask. Mask values are merged class
// labels (see BodyClass) or 0 for background.
struct PersonImage {
  std::string image_id;
  RgbImage rgb;
  LabelMask mask;
};

// Remaps every raw LIP label through merge_lip_label. Throws IngestError
// (with `source`) on labels above 19.
LabelMask merge_labels(const LabelMask& raw, const std::filesystem::path& source = "<memory>");

// Validates dimensions and labels, merges classes and rejects masks with no
// person pixels.
PersonImage make_person_image(std::string image_id, RgbImage rgb, const LabelMask& raw_mask,
                              const std::filesystem::path& source = "<memory>");

// Image id is the image file stem.
PersonImage load_person_image(const std::filesystem::path& image_path,
                              const std::filesystem::path& mask_path);

// Default mask location: `<mask_dir>/<image stem>.png`.
std::filesystem::path mask_path_for(const std::filesystem::path& image_path,
                                    const std::filesystem::path& mask_dir);

using ClassPixelSets = std::map<BodyClass, std::vector<Pixel>>;

// Row-major pixel lists per class, omitting classes below `min_pixels`.
ClassPixelSets class_pixel_sets(const PersonImage& image,
                                std::size_t min_pixels = kMinClassPixels);

}  // namespace parseid
