#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "parseid/raster.hpp"

namespace parseid {

// 8-bit RGB decode of any format OpenCV can read (PNG, JPEG, ...).
// Throws IngestError naming the path.
RgbImage read_rgb(const std::filesystem::path& path);
RgbImage decode_rgb(std::span<const std::byte> bytes, const std::string& source = "<memory>");
void write_rgb_png(const std::filesystem::path& path, const RgbImage& image);

// Single-channel 8-bit PNG label raster. Grayscale and palette-indexed PNGs
// are both accepted; for palette images the palette index is the label.
LabelMask read_label_png(const std::filesystem::path& path);
LabelMask decode_label_png(std::span<const std::byte> bytes, const std::string& source = "<memory>");
void write_label_png(const std::filesystem::path& path, const LabelMask& mask);
std::string encode_label_png(const LabelMask& mask);
std::string encode_rgb_png(const RgbImage& image);

}  // namespace parseid
