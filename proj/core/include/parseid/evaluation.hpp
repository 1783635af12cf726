#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parseid/features.hpp"
#include "parseid/naming.hpp"
#include "parseid/scoring.hpp"

namespace parseid {

struct ImageRef {
  std::string image_id;
  std::filesystem::path path;
  std::optional<int> person_id;
  std::optional<int> camera_id;
};

struct Split {
  std::vector<ImageRef> queries;
  std::vector<ImageRef> gallery;
  // Queries removed by the exclusion list.
  std::size_t excluded_queries = 0;
};

// Reads one id (or file name) per line; blank lines and '#' comments are
// ignored. Entries are reduced to their stem.
std::vector<std::string> read_id_list(const std::filesystem::path& path);

// Lists query and test images and parses their ids. Queries named in
// `query_exclusions` are dropped (the gallery is never filtered). With
// `strict`, an unparsable file name raises ConfigError; otherwise the image
// is kept without ids.
Split load_split(const std::filesystem::path& test_dir, const std::filesystem::path& query_dir,
                 const NamingRule& naming,
                 const std::optional<std::filesystem::path>& query_exclusions = std::nullopt,
                 bool strict = false);

struct RankedItem {
  std::string image_id;
  double score = 0.0;
  std::optional<int> person_id;
  std::optional<int> camera_id;
  // Position of the item in the gallery span that was ranked.
  std::size_t gallery_index = 0;
};

struct RankingResult {
  std::string query_id;
  std::optional<int> person_id;
  std::optional<int> camera_id;
  // Score descending, ties by ascending image id.
  std::vector<RankedItem> ranked;
  // Gallery ids removed by the protocol, sorted.
  std::vector<std::string> excluded;
};

struct RankOptions {
  // Drop gallery items sharing both person and camera id with the query.
  bool cross_camera = true;
  // Drop the gallery item whose id equals the query id.
  bool exclude_query_image = false;
};

RankingResult rank_query(const FeatureRecord& query, std::span<const FeatureRecord> gallery,
                         const ScoringConfig& config, const RankOptions& options = {},
                         std::size_t workers = 1);

// Sorts by score descending then image id ascending.
void sort_ranking(std::vector<RankedItem>& items);

using MatchPredicate = std::function<bool(const RankingResult&, const RankedItem&)>;

// True match: same person id, and that id is positive (0 and -1 mark
// distractors and junk).
bool same_identity(const RankingResult& result, const RankedItem& item) noexcept;

// 1 when a true match is among the first r items, else 0.
int rank_r(const RankingResult& result, std::size_t r, const MatchPredicate& truth = same_identity);

// 1-based position of the first true match.
std::optional<std::size_t> first_match_rank(const RankingResult& result,
                                            const MatchPredicate& truth = same_identity);

// Mean over true-match positions j of (matches within the first j) / j.
// nullopt when the ranking holds no true match.
std::optional<double> average_precision(const RankingResult& result,
                                        const MatchPredicate& truth = same_identity);

// Mean AP over queries with at least one true match; 0 if there are none.
double mean_average_precision(std::span<const RankingResult> results,
                              const MatchPredicate& truth = same_identity);

struct QueryOutcome {
  std::string query_id;
  std::optional<std::size_t> best_match_rank;
  std::optional<double> average_precision;
};

struct EvalConfig {
  ScoringConfig scoring;
  RankOptions rank;
  std::vector<std::size_t> ranks = {1, 5, 10};
  std::size_t workers = 1;
};

struct EvalSummary {
  std::vector<std::size_t> ranks;
  std::vector<double> rank_accuracy;  // percent, aligned with `ranks`
  double mean_ap = 0.0;               // percent
  std::size_t n_queries = 0;          // queries with at least one true match
  std::size_t n_dropped = 0;          // queries without any true match
  std::vector<QueryOutcome> per_query;

  // Percent accuracy at rank r; throws std::out_of_range if not evaluated.
  double rank_at(std::size_t r) const;
};

EvalSummary evaluate(std::span<const FeatureRecord> queries,
                     std::span<const FeatureRecord> gallery, const EvalConfig& config);

// Header `query_id,best_match_rank,AP`; empty fields for dropped queries.
void write_per_query_csv(std::ostream& out, const EvalSummary& summary);
nlohmann::json summary_to_json(const EvalSummary& summary);

}  // namespace parseid
