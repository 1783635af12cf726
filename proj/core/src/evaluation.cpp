#include "parseid/evaluation.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "parseid/error.hpp"
#include "parseid/feature_store.hpp"
#include "parseid/parallel.hpp"

namespace parseid {

namespace fs = std::filesystem;

namespace {

std::vector<ImageRef> list_refs(const fs::path& dir, const NamingRule& naming, bool strict) {
  std::vector<ImageRef> refs;
  for (const fs::path& path : list_images(dir)) {
    ImageRef ref{path.stem().string(), path, std::nullopt, std::nullopt};
    if (const auto identity = naming.parse(ref.image_id)) {
      ref.person_id = identity->person_id;
      ref.camera_id = identity->camera_id;
    } else if (strict) {
      throw ConfigError(path.string() + ": file name does not match naming rule '" +
                        naming.pattern() + "'");
    }
    refs.push_back(std::move(ref));
  }
  return refs;
}

bool same_person_and_camera(const FeatureRecord& query, const FeatureRecord& item) {
  return query.person_id && query.camera_id && item.person_id && item.camera_id &&
         *query.person_id == *item.person_id && *query.camera_id == *item.camera_id;
}

}  // namespace

std::vector<std::string> read_id_list(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open id list");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    ids.push_back(fs::path(line.substr(begin, end - begin + 1)).stem().string());
  }
  return ids;
}

Split load_split(const fs::path& test_dir, const fs::path& query_dir, const NamingRule& naming,
                 const std::optional<fs::path>& query_exclusions, bool strict) {
  Split split;
  split.gallery = list_refs(test_dir, naming, strict);
  split.queries = list_refs(query_dir, naming, strict);
  if (query_exclusions) {
    const auto listed = read_id_list(*query_exclusions);
    const std::set<std::string, std::less<>> excluded(listed.begin(), listed.end());
    const auto before = split.queries.size();
    std::erase_if(split.queries,
                  [&](const ImageRef& ref) { return excluded.contains(ref.image_id); });
    split.excluded_queries = before - split.queries.size();
  }
  return split;
}

void sort_ranking(std::vector<RankedItem>& items) {
  std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.image_id < b.image_id;
  });
}

RankingResult rank_query(const FeatureRecord& query, std::span<const FeatureRecord> gallery,
                         const ScoringConfig& config, const RankOptions& options,
                         std::size_t workers) {
  RankingResult result;
  result.query_id = query.image_id;
  result.person_id = query.person_id;
  result.camera_id = query.camera_id;

  std::vector<char> excluded(gallery.size(), 0);
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const FeatureRecord& item = gallery[i];
    if ((options.exclude_query_image && item.image_id == query.image_id) ||
        (options.cross_camera && same_person_and_camera(query, item))) {
      excluded[i] = 1;
      result.excluded.push_back(item.image_id);
    }
  }
  std::sort(result.excluded.begin(), result.excluded.end());

  std::vector<double> scores(gallery.size(), 0.0);
  parallel_for(gallery.size(), workers, [&](std::size_t i) {
    if (!excluded[i]) scores[i] = pair_score_value(query, gallery[i], config);
  });

  result.ranked.reserve(gallery.size() - result.excluded.size());
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    if (excluded[i]) continue;
    const FeatureRecord& item = gallery[i];
    result.ranked.push_back(
        RankedItem{item.image_id, scores[i], item.person_id, item.camera_id, i});
  }
  sort_ranking(result.ranked);
  return result;
}

bool same_identity(const RankingResult& result, const RankedItem& item) noexcept {
  return result.person_id && item.person_id && *result.person_id > 0 &&
         *item.person_id == *result.person_id;
}

int rank_r(const RankingResult& result, std::size_t r, const MatchPredicate& truth) {
  const std::size_t n = std::min(r, result.ranked.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (truth(result, result.ranked[j])) return 1;
  }
  return 0;
}

std::optional<std::size_t> first_match_rank(const RankingResult& result,
                                            const MatchPredicate& truth) {
  for (std::size_t j = 0; j < result.ranked.size(); ++j) {
    if (truth(result, result.ranked[j])) return j + 1;
  }
  return std::nullopt;
}

std::optional<double> average_precision(const RankingResult& result, const MatchPredicate& truth) {
  std::size_t hits = 0;
  double precision_sum = 0.0;
  for (std::size_t j = 0; j < result.ranked.size(); ++j) {
    if (!truth(result, result.ranked[j])) continue;
    ++hits;
    precision_sum += static_cast<double>(hits) / static_cast<double>(j + 1);
  }
  if (hits == 0) return std::nullopt;
  return precision_sum / static_cast<double>(hits);
}

double mean_average_precision(std::span<const RankingResult> results,
                              const MatchPredicate& truth) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const RankingResult& result : results) {
    if (const auto ap = average_precision(result, truth)) {
      sum += *ap;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double EvalSummary::rank_at(std::size_t r) const {
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] == r) return rank_accuracy[i];
  }
  throw std::out_of_range("rank " + std::to_string(r) + " was not evaluated");
}

EvalSummary evaluate(std::span<const FeatureRecord> queries,
                     std::span<const FeatureRecord> gallery, const EvalConfig& config) {
  struct PerQuery {
    QueryOutcome outcome;
    std::vector<int> hits;
  };
  std::vector<PerQuery> per_query(queries.size());

  parallel_for(queries.size(), config.workers, [&](std::size_t q) {
    const RankingResult result = rank_query(queries[q], gallery, config.scoring, config.rank);
    PerQuery& out = per_query[q];
    out.outcome.query_id = queries[q].image_id;
    out.outcome.best_match_rank = first_match_rank(result);
    out.outcome.average_precision = average_precision(result);
    out.hits.reserve(config.ranks.size());
    for (const std::size_t r : config.ranks) out.hits.push_back(rank_r(result, r));
  });

  EvalSummary summary;
  summary.ranks = config.ranks;
  std::vector<std::size_t> hit_counts(config.ranks.size(), 0);
  double ap_sum = 0.0;
  for (PerQuery& q : per_query) {
    if (q.outcome.average_precision) {
      ++summary.n_queries;
      ap_sum += *q.outcome.average_precision;
      for (std::size_t i = 0; i < q.hits.size(); ++i) hit_counts[i] += q.hits[i];
    } else {
      ++summary.n_dropped;
    }
    summary.per_query.push_back(std::move(q.outcome));
  }
  const double n = static_cast<double>(summary.n_queries);
  for (const std::size_t hits : hit_counts) {
    summary.rank_accuracy.push_back(summary.n_queries == 0 ? 0.0 : 100.0 * hits / n);
  }
  summary.mean_ap = summary.n_queries == 0 ? 0.0 : 100.0 * ap_sum / n;
  return summary;
}

void write_per_query_csv(std::ostream& out, const EvalSummary& summary) {
  out << "query_id,best_match_rank,AP\n";
  for (const QueryOutcome& q : summary.per_query) {
    out << q.query_id << ',';
    if (q.best_match_rank) out << *q.best_match_rank;
    out << ',';
    if (q.average_precision) out << *q.average_precision;
    out << '\n';
  }
}

nlohmann::json summary_to_json(const EvalSummary& summary) {
  nlohmann::json j;
  for (std::size_t i = 0; i < summary.ranks.size(); ++i) {
    j["rank_" + std::to_string(summary.ranks[i])] = summary.rank_accuracy[i];
  }
  j["mAP"] = summary.mean_ap;
  j["n_queries"] = summary.n_queries;
  j["n_dropped"] = summary.n_dropped;
  return j;
}

}  // namespace parseid
