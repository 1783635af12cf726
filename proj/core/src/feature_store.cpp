#include "parseid/feature_store.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <variant>

#include <nlohmann/json.hpp>

#include "parseid/digest.hpp"
#include "parseid/error.hpp"
#include "parseid/parallel.hpp"
#include "parseid/record_json.hpp"

namespace parseid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kIndexSchema = "parseid.store_index/1";
constexpr const char* kIndexFile = "index.json";
constexpr const char* kRecordDir = "records";

struct IndexEntry {
  std::string file;
  std::string digest;
};

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw StoreError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw StoreError(path.string() + ": " + e.what());
  }
}

// Write-then-rename so readers never observe a partial file.
void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError(tmp.string() + ": cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw StoreError(tmp.string() + ": write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StoreError(path.string() + ": " + ec.message());
}

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

}  // namespace

struct FeatureStore::State {
  fs::path dir;
  std::string version;
  mutable std::shared_mutex mutex;
  std::map<std::string, IndexEntry, std::less<>> index;
  bool dirty = false;

  fs::path record_path(std::string_view id) const {
    return dir / kRecordDir / (std::string(id) + ".json");
  }

  void write_index() {
    json records = json::object();
    for (const auto& [id, entry] : index) {
      records[id] = json{{"file", entry.file}, {"digest", entry.digest}};
    }
    const json j{{"schema", kIndexSchema}, {"extractor_version", version}, {"records", records}};
    write_atomically(dir / kIndexFile, j.dump(1) + "\n");
    dirty = false;
  }

  void load_index() {
    const json j = read_json(dir / kIndexFile);
    try {
      if (j.at("schema").get<std::string>() != kIndexSchema) {
        throw StoreError((dir / kIndexFile).string() + ": unsupported index schema");
      }
      version = j.at("extractor_version").get<std::string>();
      for (const auto& [id, entry] : j.at("records").items()) {
        index[id] = IndexEntry{entry.at("file").get<std::string>(),
                               entry.at("digest").get<std::string>()};
      }
    } catch (const json::exception& e) {
      throw StoreError((dir / kIndexFile).string() + ": " + e.what());
    }
  }
};

bool is_valid_image_id(std::string_view image_id) noexcept {
  if (image_id.empty() || image_id.front() == '.') return false;
  return std::all_of(image_id.begin(), image_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '.' || c == '_' || c == '-';
  });
}

FeatureStore::FeatureStore(std::unique_ptr<State> state) : state_(std::move(state)) {}
FeatureStore::FeatureStore(FeatureStore&&) noexcept = default;
FeatureStore& FeatureStore::operator=(FeatureStore&&) noexcept = default;

FeatureStore::~FeatureStore() {
  if (!state_) return;
  try {
    flush();
  } catch (...) {
  }
}

FeatureStore FeatureStore::open(const fs::path& dir, const std::string& extractor_version) {
  auto state = std::make_unique<State>();
  state->dir = dir;
  state->version = extractor_version;
  std::error_code ec;
  fs::create_directories(dir / kRecordDir, ec);
  if (ec) throw StoreError(dir.string() + ": " + ec.message());

  if (fs::exists(dir / kIndexFile)) {
    state->load_index();
    if (state->version != extractor_version) {
      throw VersionConflict(dir.string() + ": store was built with extractor " + state->version +
                            ", expected " + extractor_version);
    }
  } else {
    state->write_index();
  }
  return FeatureStore(std::move(state));
}

FeatureStore FeatureStore::open_existing(const fs::path& dir) {
  if (!fs::exists(dir / kIndexFile)) {
    throw StoreError(dir.string() + ": not a feature store (missing " + kIndexFile + ")");
  }
  auto state = std::make_unique<State>();
  state->dir = dir;
  state->load_index();
  return FeatureStore(std::move(state));
}

const fs::path& FeatureStore::directory() const noexcept { return state_->dir; }
const std::string& FeatureStore::version() const noexcept { return state_->version; }

void FeatureStore::put(const FeatureRecord& record) {
  if (!is_valid_image_id(record.image_id)) {
    throw StoreError("invalid image id '" + record.image_id + "'");
  }
  if (record.extractor_version != state_->version) {
    throw VersionConflict("record " + record.image_id + " was extracted with " +
                          record.extractor_version + " but the store holds " + state_->version);
  }
  validate_record(record);
  const std::string content = record_to_json(record).dump(1) + "\n";

  std::unique_lock lock(state_->mutex);
  write_atomically(state_->record_path(record.image_id), content);
  state_->index[record.image_id] =
      IndexEntry{std::string(kRecordDir) + "/" + record.image_id + ".json", record.source_digest};
  state_->dirty = true;
}

std::optional<FeatureRecord> FeatureStore::get(std::string_view image_id) const {
  fs::path path;
  {
    std::shared_lock lock(state_->mutex);
    const auto it = state_->index.find(image_id);
    if (it == state_->index.end()) return std::nullopt;
    path = state_->dir / it->second.file;
  }
  FeatureRecord record = record_from_json(read_json(path));
  if (record.image_id != image_id) {
    throw StoreError(path.string() + ": holds record " + record.image_id);
  }
  return record;
}

std::vector<FeatureRecord> FeatureStore::get_all() const {
  const std::vector<std::string> all = ids();
  std::vector<FeatureRecord> records;
  records.reserve(all.size());
  for (const auto& id : all) {
    if (auto record = get(id)) records.push_back(std::move(*record));
  }
  return records;
}

bool FeatureStore::contains(std::string_view image_id) const {
  std::shared_lock lock(state_->mutex);
  return state_->index.find(image_id) != state_->index.end();
}

std::optional<std::string> FeatureStore::source_digest(std::string_view image_id) const {
  std::shared_lock lock(state_->mutex);
  const auto it = state_->index.find(image_id);
  if (it == state_->index.end()) return std::nullopt;
  return it->second.digest;
}

std::size_t FeatureStore::size() const {
  std::shared_lock lock(state_->mutex);
  return state_->index.size();
}

std::vector<std::string> FeatureStore::ids() const {
  std::shared_lock lock(state_->mutex);
  std::vector<std::string> out;
  out.reserve(state_->index.size());
  for (const auto& [id, entry] : state_->index) out.push_back(id);
  return out;
}

void FeatureStore::flush() {
  std::unique_lock lock(state_->mutex);
  if (state_->dirty) state_->write_index();
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw StoreError(dir.string() + ": not a readable directory");
  std::vector<fs::path> images;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
  }
  if (ec) throw StoreError(dir.string() + ": " + ec.message());
  std::sort(images.begin(), images.end());
  return images;
}

BuildSummary build_from_dataset(const fs::path& image_dir, const fs::path& mask_dir,
                                FeatureStore& store, const BuildOptions& options) {
  const std::vector<fs::path> images = list_images(image_dir);
  std::error_code ec;
  if (!fs::is_directory(mask_dir, ec)) {
    throw StoreError(mask_dir.string() + ": not a readable directory");
  }

  struct Skipped {};
  struct Failed {
    std::string reason;
  };
  using Outcome = std::variant<FeatureRecord, Skipped, Failed>;
  std::vector<Outcome> outcomes(images.size(), Skipped{});

  const std::string version = extractor_version(options.extractor);
  if (version != store.version()) {
    throw VersionConflict("extractor configuration " + version + " does not match store version " +
                          store.version());
  }

  parallel_for(images.size(), options.parallelism, [&](std::size_t i) {
    const fs::path& image_path = images[i];
    const fs::path mask_path = mask_path_for(image_path, mask_dir);
    try {
      const std::string image_id = image_path.stem().string();
      if (!is_valid_image_id(image_id)) {
        outcomes[i] = Failed{"invalid image id '" + image_id + "'"};
        return;
      }
      std::string digest = file_pair_digest(image_path, mask_path);
      if (options.skip_unchanged && store.source_digest(image_id) == digest) {
        outcomes[i] = Skipped{};
        return;
      }
      FeatureRecord record =
          extract_features(load_person_image(image_path, mask_path), options.extractor);
      if (options.naming) {
        if (const auto identity = options.naming->parse(image_id)) {
          record.person_id = identity->person_id;
          record.camera_id = identity->camera_id;
        }
      }
      record.image_path = image_path.string();
      record.mask_path = mask_path.string();
      record.source_digest = std::move(digest);
      outcomes[i] = std::move(record);
    } catch (const std::exception& e) {
      outcomes[i] = Failed{e.what()};
    }
  });

  BuildSummary summary;
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (auto* record = std::get_if<FeatureRecord>(&outcomes[i])) {
      try {
        store.put(*record);
        ++summary.ok;
      } catch (const StoreError& e) {
        ++summary.failed;
        summary.failures.emplace_back(images[i].string(), e.what());
      }
    } else if (auto* failure = std::get_if<Failed>(&outcomes[i])) {
      ++summary.failed;
      summary.failures.emplace_back(images[i].string(), failure->reason);
    } else {
      ++summary.skipped;
    }
  }
  store.flush();
  return summary;
}

}  // namespace parseid
