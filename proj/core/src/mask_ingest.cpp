#include "parseid/mask_ingest.hpp"

#include <algorithm>
#include <string>

#include "parseid/error.hpp"
#include "parseid/image_io.hpp"

namespace parseid {

LabelMask merge_labels(const LabelMask& raw, const std::filesystem::path& source) {
  LabelMask merged(raw.width(), raw.height());
  auto out = merged.data().begin();
  for (const std::uint8_t label : raw.data()) {
    if (label > kMaxLipLabel) {
      throw IngestError(source, "unknown mask label " + std::to_string(label) +
                                    " (labels must be in [0, 19])");
    }
    *out++ = merge_lip_label(label);
  }
  return merged;
}

PersonImage make_person_image(std::string image_id, RgbImage rgb, const LabelMask& raw_mask,
                              const std::filesystem::path& source) {
  if (!rgb.same_shape(raw_mask)) {
    throw IngestError(source, "mask is " + std::to_string(raw_mask.width()) + "x" +
                                  std::to_string(raw_mask.height()) + " but image is " +
                                  std::to_string(rgb.width()) + "x" +
                                  std::to_string(rgb.height()));
  }
  LabelMask mask = merge_labels(raw_mask, source);
  const bool has_person = std::any_of(mask.data().begin(), mask.data().end(),
                                      [](std::uint8_t l) { return l != kBackgroundLabel; });
  if (!has_person) throw IngestError(source, "no person pixels in mask");
  return PersonImage{std::move(image_id), std::move(rgb), std::move(mask)};
}

PersonImage load_person_image(const std::filesystem::path& image_path,
                              const std::filesystem::path& mask_path) {
  RgbImage rgb = read_rgb(image_path);
  const LabelMask raw = read_label_png(mask_path);
  return make_person_image(image_path.stem().string(), std::move(rgb), raw, mask_path);
}

std::filesystem::path mask_path_for(const std::filesystem::path& image_path,
                                    const std::filesystem::path& mask_dir) {
  return mask_dir / (image_path.stem().string() + ".png");
}

ClassPixelSets class_pixel_sets(const PersonImage& image, std::size_t min_pixels) {
  ClassPixelSets sets;
  const LabelMask& mask = image.mask;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (const auto c = class_from_label(mask.at(x, y))) sets[*c].push_back(Pixel{x, y});
    }
  }
  std::erase_if(sets, [min_pixels](const auto& entry) { return entry.second.size() < min_pixels; });
  return sets;
}

}  // namespace parseid
