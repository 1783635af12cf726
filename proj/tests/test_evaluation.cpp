#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "parseid/error.hpp"
#include "parseid/evaluation.hpp"
#include "parseid/feature_store.hpp"
#include "synth.hpp"
#include "test_support.hpp"

namespace parseid {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

RankedItem item(std::string id, double score, std::optional<int> pid, int cam = 2) {
  return RankedItem{std::move(id), score, pid, cam, 0};
}

RankingResult ranking(std::optional<int> pid, std::vector<RankedItem> items, int cam = 1) {
  RankingResult r;
  r.query_id = "q";
  r.person_id = pid;
  r.camera_id = cam;
  r.ranked = std::move(items);
  sort_ranking(r.ranked);
  return r;
}

// Random gallery with ids g000..; person ids assigned afterwards.
std::vector<FeatureRecord> random_gallery(std::mt19937_64& rng, int n) {
  std::vector<FeatureRecord> g;
  for (int i = 0; i < n; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "g%03d", i);
    auto r = synth::random_record(rng, id);
    r.person_id = 1000 + i;
    r.camera_id = 2;
    g.push_back(std::move(r));
  }
  return g;
}

// Gives the gallery items at the 1-based `positions` of the query's ranking
// the query's person id.
void plant_matches(const FeatureRecord& query, std::vector<FeatureRecord>& gallery,
                   std::initializer_list<std::size_t> positions) {
  const auto result = rank_query(query, gallery, ScoringConfig{});
  for (const std::size_t p : positions) {
    gallery[result.ranked.at(p - 1).gallery_index].person_id = query.person_id;
  }
}

// Brute-force AP over a 0/1 relevance list.
double reference_ap(const std::vector<int>& rel) {
  double sum = 0;
  int hits = 0;
  for (std::size_t j = 0; j < rel.size(); ++j) {
    if (!rel[j]) continue;
    ++hits;
    double prec = 0;
    for (std::size_t i = 0; i <= j; ++i) prec += rel[i];
    sum += prec / static_cast<double>(j + 1);
  }
  return hits ? sum / hits : -1;
}

TEST(Naming, MarketStems) {
  const auto rule = NamingRule::market1501();
  const auto a = rule.parse("0002_c1s1_000451_03");
  ASSERT_TRUE(a);
  EXPECT_EQ(a->person_id, 2);
  EXPECT_EQ(a->camera_id, 1);
  const auto junk = rule.parse("-1_c3s2_000101_00");
  ASSERT_TRUE(junk);
  EXPECT_EQ(junk->person_id, -1);
  EXPECT_EQ(junk->camera_id, 3);
  EXPECT_FALSE(rule.parse("photo"));
  EXPECT_THROW(NamingRule::from_pattern("(unclosed"), ConfigError);
  const auto custom = NamingRule::from_pattern(R"(^p(\d+)-v(\d+)$)").parse("p12-v3");
  ASSERT_TRUE(custom);
  EXPECT_EQ(custom->person_id, 12);
  EXPECT_EQ(custom->camera_id, 3);
}

TEST(Metrics, ApFixture) {
  // Matches at positions 1 and 3: (1 + 2/3) / 2.
  const auto r = ranking(5, {item("a", 0.9, 5), item("b", 0.8, 7), item("c", 0.7, 5),
                             item("d", 0.1, 8)});
  ASSERT_TRUE(average_precision(r));
  EXPECT_NEAR(*average_precision(r), 0.8333, 1e-4);
  EXPECT_EQ(first_match_rank(r), 1u);
  EXPECT_EQ(rank_r(r, 1), 1);
}

TEST(Metrics, RankR) {
  const auto r = ranking(5, {item("a", 0.9, 1), item("b", 0.8, 5), item("c", 0.7, 2)});
  EXPECT_EQ(rank_r(r, 1), 0);
  EXPECT_EQ(rank_r(r, 2), 1);
  EXPECT_EQ(rank_r(r, 100), 1);
  EXPECT_EQ(first_match_rank(r), 2u);
  EXPECT_DOUBLE_EQ(*average_precision(r), 0.5);
}

TEST(Metrics, NoMatchDropsQuery) {
  const auto r = ranking(5, {item("a", 0.9, 1), item("b", 0.8, 2)});
  EXPECT_FALSE(average_precision(r));
  EXPECT_FALSE(first_match_rank(r));
  EXPECT_EQ(rank_r(r, 10), 0);
  const std::vector<RankingResult> only{r};
  EXPECT_EQ(mean_average_precision(only), 0.0);
}

TEST(Metrics, JunkAndDistractorIdsNeverMatch) {
  for (const int pid : {-1, 0}) {
    const auto r = ranking(pid, {item("a", 0.9, pid), item("b", 0.8, pid)});
    EXPECT_FALSE(average_precision(r)) << pid;
    EXPECT_EQ(rank_r(r, 5), 0) << pid;
  }
  const auto unknown = ranking(std::nullopt, {item("a", 0.9, std::nullopt)});
  EXPECT_FALSE(average_precision(unknown));
}

TEST(Metrics, TiesBreakByAscendingId) {
  std::vector<RankedItem> items{item("c", 0.5, 1), item("a", 0.5, 1), item("b", 0.7, 1),
                                item("d", 0.5, 1)};
  sort_ranking(items);
  ASSERT_EQ(items.size(), 4u);
  EXPECT_EQ(items[0].image_id, "b");
  EXPECT_EQ(items[1].image_id, "a");
  EXPECT_EQ(items[2].image_id, "c");
  EXPECT_EQ(items[3].image_id, "d");
}

TEST(Metrics, ApMatchesBruteForce) {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution coin(0.2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    RankingResult r;
    r.person_id = 1;
    std::vector<int> rel;
    for (int j = 0; j < 50; ++j) {
      const bool m = coin(rng);
      rel.push_back(m);
      r.ranked.push_back(item("x" + std::to_string(j), 1.0 - j * 0.01, m ? 1 : 2));
    }
    const double expect = reference_ap(rel);
    if (expect < 0) {
      EXPECT_FALSE(average_precision(r));
    } else {
      EXPECT_NEAR(*average_precision(r), expect, 1e-12);
    }
  }
}

TEST(Metrics, InvariantUnderMonotoneScoreTransform) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution coin(0.15);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankedItem> items;
    for (int j = 0; j < 40; ++j) {
      items.push_back(item("i" + std::to_string(j), u(rng), coin(rng) ? 3 : 4));
    }
    auto transformed = items;
    for (auto& it : transformed) it.score = std::exp(3.0 * it.score) - 7.0;
    const auto a = ranking(3, items);
    const auto b = ranking(3, transformed);
    EXPECT_EQ(average_precision(a), average_precision(b));
    for (std::size_t r : {1u, 5u, 10u}) EXPECT_EQ(rank_r(a, r), rank_r(b, r));
  }
}

TEST(Metrics, RankAccuracyMonotoneInR) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<RankedItem> items;
    for (int j = 0; j < 30; ++j) items.push_back(item("i" + std::to_string(j), u(rng), j % 11));
    const auto r = ranking(5, items);
    int prev = 0;
    for (std::size_t k = 1; k <= 30; ++k) {
      EXPECT_GE(rank_r(r, k), prev);
      prev = rank_r(r, k);
    }
  }
}

TEST(RankQuery, SelfMatchRanksFirst) {
  std::mt19937_64 rng(24);
  auto gallery = random_gallery(rng, 30);
  for (const auto& q : gallery) {
    // Skip records with nothing comparable (all classes over-highlighted).
    if (pair_score_value(q, q, ScoringConfig{}) == 0.0) continue;
    RankOptions opts;
    opts.cross_camera = false;
    const auto r = rank_query(q, gallery, ScoringConfig{}, opts);
    ASSERT_FALSE(r.ranked.empty());
    EXPECT_GE(r.ranked.front().score, pair_score_value(q, q, ScoringConfig{}) - 1e-12);
    const auto self = std::find_if(r.ranked.begin(), r.ranked.end(),
                                   [&](const RankedItem& it) { return it.image_id == q.image_id; });
    ASSERT_NE(self, r.ranked.end());
    EXPECT_DOUBLE_EQ(self->score, r.ranked.front().score);
  }
}

TEST(RankQuery, CrossCameraExclusion) {
  std::mt19937_64 rng(25);
  auto gallery = random_gallery(rng, 6);
  auto query = synth::random_record(rng, "q");
  query.person_id = 7;
  query.camera_id = 1;
  gallery[0].person_id = 7;
  gallery[0].camera_id = 1;  // same camera: excluded
  gallery[1].person_id = 7;
  gallery[1].camera_id = 3;  // other camera: kept
  gallery[2].person_id = 8;
  gallery[2].camera_id = 1;  // other person: kept

  const auto r = rank_query(query, gallery, ScoringConfig{});
  EXPECT_EQ(r.ranked.size(), 5u);
  EXPECT_EQ(r.excluded, std::vector<std::string>{"g000"});

  RankOptions off;
  off.cross_camera = false;
  EXPECT_EQ(rank_query(query, gallery, ScoringConfig{}, off).ranked.size(), 6u);

  RankOptions self;
  self.exclude_query_image = true;
  gallery[3].image_id = "q";
  const auto r2 = rank_query(query, gallery, ScoringConfig{}, self);
  EXPECT_EQ(r2.ranked.size(), 4u);
}

TEST(RankQuery, WorkersDoNotChangeResult) {
  std::mt19937_64 rng(26);
  const auto gallery = random_gallery(rng, 200);
  const auto query = synth::random_record(rng, "q");
  const auto a = rank_query(query, gallery, ScoringConfig{}, {}, 1);
  const auto b = rank_query(query, gallery, ScoringConfig{}, {}, 4);
  ASSERT_EQ(a.ranked.size(), b.ranked.size());
  for (std::size_t i = 0; i < a.ranked.size(); ++i) {
    EXPECT_EQ(a.ranked[i].image_id, b.ranked[i].image_id);
    EXPECT_EQ(a.ranked[i].score, b.ranked[i].score);
  }
}

TEST(Evaluate, SingleQueryAtRankOne) {
  std::mt19937_64 rng(27);
  auto gallery = random_gallery(rng, 20);
  auto q = synth::random_record(rng, "q");
  q.person_id = 1;
  q.camera_id = 1;
  plant_matches(q, gallery, {1});
  const std::vector<FeatureRecord> queries{q};
  const auto s = evaluate(queries, gallery, EvalConfig{});
  EXPECT_EQ(s.n_queries, 1u);
  EXPECT_DOUBLE_EQ(s.rank_at(1), 100.0);
  EXPECT_DOUBLE_EQ(s.mean_ap, 100.0);
}

TEST(Evaluate, TwoQueriesHalfAtRankOne) {
  std::mt19937_64 rng(28);
  auto gallery = random_gallery(rng, 20);
  auto q1 = synth::random_record(rng, "q1");
  q1.person_id = 1;
  q1.camera_id = 1;
  auto q2 = synth::random_record(rng, "q2");
  q2.person_id = 2;
  q2.camera_id = 1;
  plant_matches(q1, gallery, {1});
  plant_matches(q2, gallery, {2});
  // Planting q2 may have overwritten q1's match; check before relying on it.
  ASSERT_EQ(first_match_rank(rank_query(q1, gallery, ScoringConfig{})), 1u);

  EvalConfig config;
  config.ranks = {1, 2};
  const std::vector<FeatureRecord> queries{q1, q2};
  const auto s = evaluate(queries, gallery, config);
  EXPECT_DOUBLE_EQ(s.rank_at(1), 50.0);
  EXPECT_DOUBLE_EQ(s.rank_at(2), 100.0);
  EXPECT_DOUBLE_EQ(s.mean_ap, 75.0);
  EXPECT_THROW(s.rank_at(5), std::out_of_range);

  const auto j = summary_to_json(s);
  EXPECT_EQ(j.at("rank_1"), 50.0);
  EXPECT_EQ(j.at("rank_2"), 100.0);
  EXPECT_EQ(j.at("mAP"), 75.0);
  EXPECT_EQ(j.at("n_queries"), 2);
  EXPECT_EQ(j.at("n_dropped"), 0);
}

TEST(Evaluate, QueriesWithoutMatchAreDropped) {
  std::mt19937_64 rng(29);
  auto gallery = random_gallery(rng, 10);
  auto q1 = synth::random_record(rng, "q1");
  q1.person_id = 1;
  q1.camera_id = 1;
  auto q2 = synth::random_record(rng, "q2");
  q2.person_id = 99;
  q2.camera_id = 1;
  plant_matches(q1, gallery, {3});
  const std::vector<FeatureRecord> queries{q1, q2};
  const auto s = evaluate(queries, gallery, EvalConfig{});
  EXPECT_EQ(s.n_queries, 1u);
  EXPECT_EQ(s.n_dropped, 1u);
  EXPECT_DOUBLE_EQ(s.rank_at(1), 0.0);
  EXPECT_DOUBLE_EQ(s.rank_at(5), 100.0);
  EXPECT_NEAR(s.mean_ap, 100.0 / 3.0, 1e-12);

  std::ostringstream csv;
  write_per_query_csv(csv, s);
  EXPECT_EQ(csv.str(), "query_id,best_match_rank,AP\nq1,3,0.333333\nq2,,\n");
}

TEST(Evaluate, EmptyQuerySetIsZero) {
  std::mt19937_64 rng(30);
  const auto gallery = random_gallery(rng, 5);
  const auto s = evaluate({}, gallery, EvalConfig{});
  EXPECT_EQ(s.n_queries, 0u);
  EXPECT_EQ(s.mean_ap, 0.0);
  EXPECT_EQ(s.rank_at(1), 0.0);
}

TEST(Evaluate, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(31);
  auto gallery = random_gallery(rng, 120);
  std::vector<FeatureRecord> queries;
  std::uniform_int_distribution<int> pid(1000, 1119);
  for (int i = 0; i < 25; ++i) {
    auto q = synth::random_record(rng, "q" + std::to_string(i));
    q.person_id = pid(rng);
    q.camera_id = 1;
    queries.push_back(std::move(q));
  }
  EvalConfig c1;
  EvalConfig c4;
  c4.workers = 4;
  const auto a = evaluate(queries, gallery, c1);
  const auto b = evaluate(queries, gallery, c4);
  EXPECT_EQ(a.rank_accuracy, b.rank_accuracy);
  EXPECT_EQ(a.mean_ap, b.mean_ap);
  std::ostringstream ca, cb;
  write_per_query_csv(ca, a);
  write_per_query_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
}

TEST(Split, LoadsAndExcludesQueries) {
  TempDir dir("split");
  fs::create_directories(dir / "query");
  fs::create_directories(dir / "test");
  for (const char* n : {"0001_c1s1_000001_00", "0002_c1s1_000001_00", "0003_c1s1_000001_00"}) {
    testing::spit(dir / "query" / (std::string(n) + ".jpg"), "");
  }
  for (const char* n : {"0001_c2s1_000001_00", "-1_c3s1_000001_00", "notes"}) {
    testing::spit(dir / "test" / (std::string(n) + ".png"), "");
  }
  testing::spit(dir / "test" / "readme.txt", "");
  testing::spit(dir / "exclude.txt", "# cleared\n0002_c1s1_000001_00.jpg\n\n  0003_c1s1_000001_00  \n");

  const auto rule = NamingRule::market1501();
  const auto split = load_split(dir / "test", dir / "query", rule, dir / "exclude.txt");
  ASSERT_EQ(split.queries.size(), 1u);
  EXPECT_EQ(split.queries[0].image_id, "0001_c1s1_000001_00");
  EXPECT_EQ(split.excluded_queries, 2u);
  ASSERT_EQ(split.gallery.size(), 3u);
  EXPECT_EQ(split.gallery[0].person_id, -1);
  EXPECT_FALSE(split.gallery[2].person_id);

  EXPECT_THROW(load_split(dir / "test", dir / "query", rule, std::nullopt, true), ConfigError);
  EXPECT_THROW(read_id_list(dir / "missing.txt"), ConfigError);
}

}  // namespace
}  // namespace parseid
