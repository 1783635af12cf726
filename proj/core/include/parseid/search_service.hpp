#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "parseid/evaluation.hpp"
#include "parseid/feature_store.hpp"
#include "parseid/features.hpp"
#include "parseid/query_builder.hpp"
#include "parseid/scoring.hpp"

namespace parseid {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path store;
  std::optional<std::filesystem::path> weights;
  std::optional<std::filesystem::path> static_dir;
  std::optional<std::filesystem::path> presets;
  std::size_t max_k = 100;
  std::size_t workers = 1;

  // Throws ConfigError.
  void validate() const;
};

struct Response {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

// JSON body shared by the search endpoints:
// {"query_id", "results": [{"image_id", "score", "score_normalized",
//   "person_id", "camera_id", "classes": [...]}]}
nlohmann::json search_response_json(const FeatureRecord& query, const RankingResult& ranking,
                                    std::span<const FeatureRecord> gallery,
                                    const ScoringConfig& config);

// HTTP facade over a feature store. Every handler is also callable
// directly, which is what the HTTP layer does.
class SearchService {
 public:
  SearchService(FeatureStore store, ScoringConfig scoring, TexturePresetTable presets,
                std::size_t max_k = 100, ExtractorOptions extractor = {}, std::size_t workers = 1);
  ~SearchService();

  SearchService(const SearchService&) = delete;
  SearchService& operator=(const SearchService&) = delete;

  // POST /api/images (multipart: image, mask, optional image_id)
  Response upload(std::string_view image_bytes, std::string_view mask_bytes,
                  std::optional<std::string> image_id, std::string_view image_filename = {});
  // GET /api/search?image_id=&k=
  Response search(std::string_view image_id, std::optional<std::string_view> k) const;
  // POST /api/search/attributes
  Response search_attributes(std::string_view body) const;
  // GET /api/images/{id}/features
  Response features(std::string_view image_id) const;
  // GET /api/presets
  Response presets() const;

  // Registers routes and binds. `port` 0 picks a free port. Returns the
  // bound port, or -1 on failure.
  int bind(const std::string& host, int port,
           const std::optional<std::filesystem::path>& static_dir = std::nullopt);
  // Serves on the bound socket until stop().
  bool serve();
  // bind + serve.
  bool listen(const std::string& host, int port,
              const std::optional<std::filesystem::path>& static_dir = std::nullopt);
  void stop();
  int bound_port() const noexcept { return bound_port_.load(); }
  bool is_running() const;
  void wait_until_ready() const;

 private:
  struct Gallery;

  FeatureStore store_;
  ScoringConfig scoring_;
  TexturePresetTable presets_;
  std::size_t max_k_;
  ExtractorOptions extractor_;
  std::size_t workers_;

  // Searches hold a shared lock for their whole duration; ingestion takes
  // the exclusive lock only to append.
  mutable std::shared_mutex gallery_mutex_;
  std::unique_ptr<Gallery> gallery_;
  std::mutex write_mutex_;

  struct Http;
  std::unique_ptr<Http> http_;
  std::atomic<int> bound_port_{0};
};

}  // namespace parseid
