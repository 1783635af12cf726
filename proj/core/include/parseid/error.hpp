#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

namespace parseid {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised while decoding or validating an image/mask pair. The message
// always starts with the offending path.
class IngestError : public Error {
 public:
  IngestError(const std::filesystem::path& path, const std::string& what)
      : Error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

// A record was produced under a different extractor configuration than the
// one the store was opened with.
class VersionConflict : public StoreError {
 public:
  using StoreError::StoreError;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

}  // namespace parseid
