#include "parseid/digest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "parseid/error.hpp"

namespace parseid {

std::string Fnv1a::hex() const {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash_));
  return buffer;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(path, "cannot open file");
  std::ostringstream content;
  content << in.rdbuf();
  return std::move(content).str();
}

std::string file_pair_digest(const std::filesystem::path& a, const std::filesystem::path& b) {
  Fnv1a hash;
  const std::string first = read_file(a);
  hash.update(std::to_string(first.size()));
  hash.update(first);
  hash.update(read_file(b));
  return hash.hex();
}

}  // namespace parseid
