#include "parseid/search_service.hpp"

#include <charconv>
#include <map>

#include <httplib.h>

#include "parseid/digest.hpp"
#include "parseid/error.hpp"
#include "parseid/image_io.hpp"
#include "parseid/mask_ingest.hpp"
#include "parseid/record_json.hpp"

namespace parseid {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) {
  return Response{status, body.dump(), "application/json"};
}

Response error_response(int status, const std::string& message) {
  return json_response(status, json{{"error", message}});
}

std::span<const std::byte> as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

std::optional<std::size_t> parse_count(std::string_view text) {
  std::size_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size()) return std::nullopt;
  return value;
}

AttributeQuery query_from_json(const json& body) {
  AttributeQuery query;
  if (!body.contains("entries") || !body.at("entries").is_array()) {
    throw QueryError("body must contain an 'entries' array");
  }
  for (const json& e : body.at("entries")) {
    AttributeEntry entry;
    const auto name = e.at("class").get<std::string>();
    const auto c = class_from_name(name);
    if (!c) throw QueryError("unknown class '" + name + "'");
    entry.body_class = *c;

    const json& rgb = e.at("rgb");
    if (rgb.is_string()) {
      const auto color = parse_hex_color(rgb.get<std::string>());
      if (!color) throw QueryError("invalid color '" + rgb.get<std::string>() + "'");
      entry.color = *color;
    } else if (rgb.is_array() && rgb.size() == 3) {
      std::array<std::uint8_t, 3> v{};
      for (std::size_t i = 0; i < 3; ++i) {
        const int x = rgb[i].get<int>();
        if (x < 0 || x > 255) throw QueryError("rgb components must be in [0, 255]");
        v[i] = static_cast<std::uint8_t>(x);
      }
      entry.color = Rgb{v[0], v[1], v[2]};
    } else {
      throw QueryError("rgb must be \"#rrggbb\" or [r, g, b]");
    }
    if (e.contains("texture_preset") && !e.at("texture_preset").is_null()) {
      entry.texture_preset = e.at("texture_preset").get<std::string>();
    }
    query.entries.push_back(std::move(entry));
  }
  return query;
}

}  // namespace

void ServiceConfig::validate() const {
  if (max_k < 1) throw ConfigError("max k must be at least 1");
  if (workers < 1) throw ConfigError("worker count must be at least 1");
  if (store.empty() || !std::filesystem::is_directory(store)) {
    throw ConfigError("store path '" + store.string() + "' does not exist");
  }
}

json search_response_json(const FeatureRecord& query, const RankingResult& ranking,
                          std::span<const FeatureRecord> gallery, const ScoringConfig& config) {
  json results = json::array();
  std::size_t position = 0;
  for (const RankedItem& item : ranking.ranked) {
    const SimilarityReport report = pair_score(query, gallery[item.gallery_index], config);
    json classes = json::array();
    for (const ClassReport& c : report.classes) classes.push_back(class_report_to_json(c));
    results.push_back(json{
        {"rank", ++position},
        {"image_id", item.image_id},
        {"score", item.score},
        {"score_normalized", report.normalized},
        {"person_id", item.person_id ? json(*item.person_id) : json(nullptr)},
        {"camera_id", item.camera_id ? json(*item.camera_id) : json(nullptr)},
        {"classes", std::move(classes)},
    });
  }
  return json{{"query_id", ranking.query_id}, {"results", std::move(results)}};
}

struct SearchService::Gallery {
  std::vector<FeatureRecord> records;
  std::map<std::string, std::size_t, std::less<>> by_id;

  const FeatureRecord* find(std::string_view id) const {
    const auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : &records[it->second];
  }
};

struct SearchService::Http {
  httplib::Server server;
};

SearchService::SearchService(FeatureStore store, ScoringConfig scoring, TexturePresetTable presets,
                             std::size_t max_k, ExtractorOptions extractor, std::size_t workers)
    : store_(std::move(store)),
      scoring_(scoring),
      presets_(std::move(presets)),
      max_k_(std::max<std::size_t>(1, max_k)),
      extractor_(extractor),
      workers_(std::max<std::size_t>(1, workers)),
      gallery_(std::make_unique<Gallery>()) {
  gallery_->records = store_.get_all();
  for (std::size_t i = 0; i < gallery_->records.size(); ++i) {
    gallery_->by_id.emplace(gallery_->records[i].image_id, i);
  }
}

SearchService::~SearchService() { stop(); }

Response SearchService::upload(std::string_view image_bytes, std::string_view mask_bytes,
                               std::optional<std::string> image_id,
                               std::string_view image_filename) {
  if (image_bytes.empty()) return error_response(400, "missing 'image' part");
  if (mask_bytes.empty()) return error_response(400, "missing 'mask' part");

  Fnv1a digest;
  digest.update(std::to_string(image_bytes.size()));
  digest.update(image_bytes);
  digest.update(mask_bytes);
  if (!image_id || image_id->empty()) {
    const std::string stem = std::filesystem::path(image_filename).stem().string();
    image_id = stem.empty() ? "upload-" + digest.hex() : stem;
  }
  if (!is_valid_image_id(*image_id)) {
    return error_response(400, "invalid image id '" + *image_id + "'");
  }

  FeatureRecord record;
  try {
    const std::string source = image_filename.empty() ? *image_id : std::string(image_filename);
    RgbImage rgb = decode_rgb(as_bytes(image_bytes), source);
    const LabelMask mask = decode_label_png(as_bytes(mask_bytes), source + " (mask)");
    record = extract_features(make_person_image(*image_id, std::move(rgb), mask, source),
                              extractor_);
  } catch (const IngestError& e) {
    return error_response(400, e.what());
  }
  record.image_path = "upload:" + std::string(image_filename);
  record.mask_path = "upload";
  record.source_digest = digest.hex();

  std::lock_guard writer(write_mutex_);
  {
    std::shared_lock read(gallery_mutex_);
    if (gallery_->find(*image_id) != nullptr) {
      return error_response(409, "image id '" + *image_id + "' already exists");
    }
  }
  try {
    store_.put(record);
    store_.flush();
  } catch (const StoreError& e) {
    return error_response(500, e.what());
  }
  {
    std::unique_lock write(gallery_mutex_);
    gallery_->by_id.emplace(record.image_id, gallery_->records.size());
    gallery_->records.push_back(record);
  }
  return json_response(200, json{{"image_id", record.image_id}});
}

Response SearchService::search(std::string_view image_id, std::optional<std::string_view> k) const {
  std::size_t count = 10;
  if (k) {
    const auto parsed = parse_count(*k);
    if (!parsed) return error_response(400, "k must be a positive integer");
    count = *parsed;
  }
  if (count == 0) return error_response(400, "k must be at least 1");
  count = std::min(count, max_k_);

  std::shared_lock read(gallery_mutex_);
  const FeatureRecord* query = gallery_->find(image_id);
  if (query == nullptr) return error_response(404, "unknown image id '" + std::string(image_id) + "'");

  RankOptions options;
  options.cross_camera = false;
  options.exclude_query_image = true;
  RankingResult ranking = rank_query(*query, gallery_->records, scoring_, options, workers_);
  if (ranking.ranked.size() > count) ranking.ranked.resize(count);
  return json_response(200, search_response_json(*query, ranking, gallery_->records, scoring_));
}

Response SearchService::search_attributes(std::string_view body) const {
  AttributeQuery query;
  std::size_t count = 10;
  int spread = kDefaultSpread;
  try {
    const json j = json::parse(body);
    query = query_from_json(j);
    if (j.contains("k")) {
      const auto k = j.at("k").get<long long>();
      if (k < 1) return error_response(400, "k must be at least 1");
      count = static_cast<std::size_t>(k);
    }
    if (j.contains("spread")) spread = j.at("spread").get<int>();
  } catch (const json::exception& e) {
    return error_response(400, std::string("malformed request: ") + e.what());
  } catch (const QueryError& e) {
    return error_response(400, e.what());
  }
  count = std::min(count, max_k_);

  FeatureRecord synthesized;
  try {
    synthesized = synthesize_record(query, presets_, spread);
  } catch (const QueryError& e) {
    json body_json{{"error", e.what()}, {"available_presets", presets_.names()}};
    return json_response(400, body_json);
  }

  std::shared_lock read(gallery_mutex_);
  RankingResult ranking =
      search_by_attributes(query, gallery_->records, count, presets_, scoring_, spread, workers_);
  json response = search_response_json(synthesized, ranking, gallery_->records, scoring_);
  response["query"] = record_to_json(synthesized);
  return json_response(200, response);
}

Response SearchService::features(std::string_view image_id) const {
  std::shared_lock read(gallery_mutex_);
  const FeatureRecord* record = gallery_->find(image_id);
  if (record == nullptr) return error_response(404, "unknown image id '" + std::string(image_id) + "'");
  return json_response(200, record_to_json(*record));
}

Response SearchService::presets() const {
  return json_response(200, json{{"presets", presets_.names()}});
}

int SearchService::bind(const std::string& host, int port,
                        const std::optional<std::filesystem::path>& static_dir) {
  http_ = std::make_unique<Http>();
  httplib::Server& server = http_->server;
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };

  server.Post("/api/images", [this, reply](const httplib::Request& req, httplib::Response& res) {
    if (!req.is_multipart_form_data()) {
      reply(res, error_response(400, "expected multipart/form-data with image and mask parts"));
      return;
    }
    const auto image = req.get_file_value("image");
    const auto mask = req.get_file_value("mask");
    std::optional<std::string> id;
    if (req.has_file("image_id")) id = req.get_file_value("image_id").content;
    if (req.has_param("image_id")) id = req.get_param_value("image_id");
    reply(res, upload(image.content, mask.content, id, image.filename));
  });
  server.Get("/api/search", [this, reply](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("image_id")) {
      reply(res, error_response(400, "missing image_id"));
      return;
    }
    std::optional<std::string> k;
    if (req.has_param("k")) k = req.get_param_value("k");
    reply(res, search(req.get_param_value("image_id"),
                      k ? std::optional<std::string_view>(*k) : std::nullopt));
  });
  server.Post("/api/search/attributes",
              [this, reply](const httplib::Request& req, httplib::Response& res) {
                reply(res, search_attributes(req.body));
              });
  server.Get(R"(/api/images/([^/]+)/features)",
             [this, reply](const httplib::Request& req, httplib::Response& res) {
               reply(res, features(req.matches[1].str()));
             });
  server.Get("/api/presets", [this, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, presets());
  });
  if (static_dir && !server.set_mount_point("/", static_dir->string())) return -1;

  if (port == 0) {
    port = server.bind_to_any_port(host);
    if (port <= 0) return -1;
  } else if (!server.bind_to_port(host, port)) {
    return -1;
  }
  bound_port_ = port;
  return port;
}

bool SearchService::serve() { return http_ && http_->server.listen_after_bind(); }

bool SearchService::listen(const std::string& host, int port,
                           const std::optional<std::filesystem::path>& static_dir) {
  return bind(host, port, static_dir) > 0 && serve();
}

void SearchService::stop() {
  if (http_) http_->server.stop();
}

bool SearchService::is_running() const { return http_ && http_->server.is_running(); }

void SearchService::wait_until_ready() const {
  if (http_) http_->server.wait_until_ready();
}

}  // namespace parseid
