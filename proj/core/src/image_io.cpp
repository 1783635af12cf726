#include "parseid/image_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "parseid/error.hpp"

namespace parseid {
namespace {

RgbImage from_bgr(const cv::Mat& bgr) {
  RgbImage out(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      out.at(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
    }
  }
  return out;
}

cv::Mat to_bgr(const RgbImage& rgb) {
  cv::Mat bgr(rgb.height(), rgb.width(), CV_8UC3);
  for (int y = 0; y < rgb.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < rgb.width(); ++x) {
      const Rgb p = rgb.at(x, y);
      row[x] = cv::Vec3b(p.b, p.g, p.r);
    }
  }
  return bgr;
}

struct PngSource {
  const png_byte* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* src = static_cast<PngSource*>(png_get_io_ptr(png));
  if (src->offset + length > src->size) png_error(png, "truncated PNG data");
  std::memcpy(out, src->data + src->offset, length);
  src->offset += length;
}

void on_png_error(png_structp png, png_const_charp message) {
  auto* err = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(err, message, 255);
  err[255] = '\0';
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

// Decodes an 8-bit (or packed) grayscale or palette PNG to raw sample
// values. Kept free of objects with destructors in this frame because
// libpng reports errors with longjmp.
bool decode_indexed_png(const png_byte* data, std::size_t size, int* width, int* height,
                        std::vector<std::uint8_t>* pixels, char* error) {
  if (size < 8 || png_sig_cmp(data, 0, 8) != 0) {
    std::strcpy(error, "not a PNG file");
    return false;
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, error, on_png_error,
                                           on_png_warning);
  if (png == nullptr) {
    std::strcpy(error, "out of memory");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::strcpy(error, "out of memory");
    return false;
  }
  PngSource source{data, size, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &source, read_from_memory);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_PALETTE) {
    std::strcpy(error, "mask must be a single-channel grayscale or palette PNG");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (bit_depth > 8) {
    std::strcpy(error, "mask must have 8 bits per sample or fewer");
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (bit_depth < 8) png_set_packing(png);
  png_read_update_info(png, info);

  pixels->assign(static_cast<std::size_t>(w) * h, 0);
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, pixels->data() + static_cast<std::size_t>(y) * w, nullptr);
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  *width = static_cast<int>(w);
  *height = static_cast<int>(h);
  return true;
}

std::vector<std::byte> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path, "cannot open file");
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<std::byte> bytes(raw.size());
  std::memcpy(bytes.data(), raw.data(), raw.size());
  return bytes;
}

void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IngestError(path, "cannot open file for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IngestError(path, "write failed");
}

}  // namespace

RgbImage decode_rgb(std::span<const std::byte> bytes, const std::string& source) {
  if (bytes.empty()) throw IngestError(source, "empty image data");
  const cv::Mat buffer(1, static_cast<int>(bytes.size()), CV_8UC1,
                       const_cast<std::byte*>(bytes.data()));
  cv::Mat decoded;
  try {
    decoded = cv::imdecode(buffer, cv::IMREAD_COLOR);
  } catch (const cv::Exception& e) {
    throw IngestError(source, std::string("cannot decode image: ") + e.what());
  }
  if (decoded.empty() || decoded.type() != CV_8UC3) {
    throw IngestError(source, "cannot decode image");
  }
  return from_bgr(decoded);
}

RgbImage read_rgb(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_rgb(bytes, path.string());
}

std::string encode_rgb_png(const RgbImage& image) {
  std::vector<uchar> buffer;
  if (!cv::imencode(".png", to_bgr(image), buffer)) throw Error("PNG encoding failed");
  return {buffer.begin(), buffer.end()};
}

void write_rgb_png(const std::filesystem::path& path, const RgbImage& image) {
  write_bytes(path, encode_rgb_png(image));
}

LabelMask decode_label_png(std::span<const std::byte> bytes, const std::string& source) {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;
  char error[256] = {};
  if (!decode_indexed_png(reinterpret_cast<const png_byte*>(bytes.data()), bytes.size(), &width,
                          &height, &pixels, error)) {
    throw IngestError(source, std::string("cannot decode mask: ") + error);
  }
  LabelMask mask(width, height);
  mask.data() = std::move(pixels);
  return mask;
}

LabelMask read_label_png(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return decode_label_png(bytes, path.string());
}

std::string encode_label_png(const LabelMask& mask) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(mask.width());
  image.height = static_cast<png_uint_32>(mask.height());
  image.format = PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, mask.data().data(), 0, nullptr)) {
    throw Error(std::string("PNG encoding failed: ") + image.message);
  }
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, mask.data().data(), 0, nullptr)) {
    throw Error(std::string("PNG encoding failed: ") + image.message);
  }
  out.resize(size);
  return out;
}

void write_label_png(const std::filesystem::path& path, const LabelMask& mask) {
  write_bytes(path, encode_label_png(mask));
}

}  // namespace parseid
