#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parseid/features.hpp"
#include "parseid/naming.hpp"

namespace parseid {

// Directory-backed record store:
//   <dir>/index.json   {"schema", "extractor_version",
//                       "records": {id: {"file", "digest"}}}
//   <dir>/records/<image_id>.json
// Any number of concurrent readers; writes must come from a single writer.
class FeatureStore {
 public:
  // Opens or creates a store for `extractor_version`. An existing store
  // built under another version raises VersionConflict.
  static FeatureStore open(const std::filesystem::path& dir, const std::string& extractor_version);
  // Opens an existing store, adopting its recorded version.
  static FeatureStore open_existing(const std::filesystem::path& dir);

  FeatureStore(FeatureStore&&) noexcept;
  FeatureStore& operator=(FeatureStore&&) noexcept;
  ~FeatureStore();

  const std::filesystem::path& directory() const noexcept;
  const std::string& version() const noexcept;

  // Writes (or replaces) the record durably. Throws VersionConflict when
  // the record's extractor version differs from the store's, StoreError on
  // I/O failure or an invalid record.
  void put(const FeatureRecord& record);
  std::optional<FeatureRecord> get(std::string_view image_id) const;
  // All records sorted by image id.
  std::vector<FeatureRecord> get_all() const;

  bool contains(std::string_view image_id) const;
  // Source digest recorded for the image, if stored.
  std::optional<std::string> source_digest(std::string_view image_id) const;
  std::size_t size() const;
  std::vector<std::string> ids() const;

  // Persists index.json. Also done on destruction.
  void flush();

 private:
  struct State;
  explicit FeatureStore(std::unique_ptr<State> state);

  std::unique_ptr<State> state_;
};

// Image ids become file names, so only [A-Za-z0-9._-] are allowed and the
// id may not start with '.'.
bool is_valid_image_id(std::string_view image_id) noexcept;

struct BuildOptions {
  std::size_t parallelism = 1;
  ExtractorOptions extractor;
  // Fills person/camera ids when the stem matches.
  std::optional<NamingRule> naming;
  // Skip pairs whose stored record has the same version and source digest.
  bool skip_unchanged = true;
};

struct BuildSummary {
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<std::string, std::string>> failures;  // path, reason
};

// Extracts every image in `image_dir` (png/jpg/jpeg/bmp) paired with
// `<mask_dir>/<stem>.png`. Pairs that fail are counted and skipped. The
// resulting store content does not depend on `parallelism`.
BuildSummary build_from_dataset(const std::filesystem::path& image_dir,
                                const std::filesystem::path& mask_dir, FeatureStore& store,
                                const BuildOptions& options = {});

// Sorted image files of a directory. Throws StoreError if it is unreadable.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

}  // namespace parseid
