#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace parseid {

// 64-bit FNV-1a. Stable across platforms; used for version tags and
// source-file digests, not for security.
class Fnv1a {
 public:
  void update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      hash_ ^= c;
      hash_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const noexcept { return hash_; }
  std::string hex() const;

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

// Digest of the concatenated contents of both files. Throws IngestError if
// either cannot be read.
std::string file_pair_digest(const std::filesystem::path& a, const std::filesystem::path& b);

std::string read_file(const std::filesystem::path& path);

}  // namespace parseid
