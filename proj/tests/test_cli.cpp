#include <gtest/gtest.h>

#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "parseid/feature_store.hpp"
#include "synth.hpp"
#include "test_support.hpp"

namespace parseid {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run parseid(std::vector<std::string> args) {
  args.insert(args.begin(), "parseid");
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

// Market-style dataset extracted into one store, shared by the tests.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli");
    synth::DatasetSpec spec;
    spec.identities = 6;
    spec.views = 3;
    synth::write_market_dataset(dir_->path(), synth::make_dataset(spec));
    for (const char* sub : {"query", "bounding_box_test"}) {
      const auto r = parseid({"extract", "--images", (dir_->path() / sub).string(), "--masks",
                              (dir_->path() / "masks").string(), "--store", store().string()});
      ASSERT_EQ(r.code, 0) << r.err;
    }
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }

  static fs::path root() { return dir_->path(); }
  static fs::path store() { return dir_->path() / "store"; }
  static std::vector<std::string> eval_args() {
    return {"evaluate", "--test", (root() / "bounding_box_test").string(), "--query",
            (root() / "query").string(), "--store", store().string()};
  }

  static TempDir* dir_;
};

TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, ExtractIsIdempotent) {
  const auto r = parseid({"extract", "--images", (root() / "query").string(), "--store",
                          store().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("ok"), 0);
  EXPECT_EQ(j.at("skipped"), 6);
  EXPECT_EQ(j.at("failed"), 0);
  EXPECT_EQ(j.at("store_size"), 18);
  EXPECT_EQ(j.at("extractor_version"), extractor_version());
}

TEST_F(CliTest, ExtractMissingMaskDirectory) {
  TempDir d("cli-nomask");
  fs::create_directories(d / "images");
  const auto r = parseid({"extract", "--images", (d / "images").string(), "--store",
                          (d / "store").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("mask directory"), std::string::npos);
  const auto missing = parseid({"extract", "--images", (d / "nope").string(), "--store",
                                (d / "store").string()});
  EXPECT_NE(missing.code, 0);
}

TEST_F(CliTest, ExtractVersionConflict) {
  const auto r = parseid({"extract", "--images", (root() / "query").string(), "--masks",
                          (root() / "masks").string(), "--store", store().string(),
                          "--no-stretch"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, EvaluateReport) {
  TempDir out("cli-eval");
  auto args = eval_args();
  args.insert(args.end(), {"--ranks", "1,2,5", "--out", (out / "r.json").string(), "--csv",
                           (out / "q.csv").string()});
  const auto r = parseid(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  for (const char* key : {"rank_1", "rank_2", "rank_5", "mAP", "n_queries", "n_dropped",
                          "n_excluded_queries", "cross_camera", "gallery_size"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(j.at("n_queries"), 6);
  EXPECT_EQ(j.at("gallery_size"), 12);
  EXPECT_EQ(j.at("cross_camera"), true);
  EXPECT_EQ(j.at("rank_1"), 100.0);
  EXPECT_EQ(json::parse(testing::slurp(out / "r.json")), j);
  const std::string csv = testing::slurp(out / "q.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "query_id,best_match_rank,AP");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
}

TEST_F(CliTest, EvaluateClearQueries) {
  TempDir out("cli-clear");
  const auto queries = list_images(root() / "query");
  testing::spit(out / "clear.txt",
                queries[0].filename().string() + "\n" + queries[1].stem().string() + "\n");
  auto args = eval_args();
  args.insert(args.end(), {"--clear-queries", (out / "clear.txt").string()});
  const auto r = parseid(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("n_queries"), 4);
  EXPECT_EQ(j.at("n_excluded_queries"), 2);
}

TEST_F(CliTest, EvaluateNoCrossCamera) {
  auto args = eval_args();
  args.push_back("--no-cross-camera");
  const auto r = parseid(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out).at("cross_camera"), false);
}

TEST_F(CliTest, EvaluateMissingRecords) {
  TempDir d("cli-missing");
  const auto r = parseid({"extract", "--images", (root() / "query").string(), "--masks",
                          (root() / "masks").string(), "--store", (d / "store").string()});
  ASSERT_EQ(r.code, 0);
  const auto e = parseid({"evaluate", "--test", (root() / "bounding_box_test").string(),
                          "--query", (root() / "query").string(), "--store",
                          (d / "store").string()});
  EXPECT_EQ(e.code, 1);
  EXPECT_NE(e.err.find("no stored features"), std::string::npos);
}

TEST_F(CliTest, SearchByAttribute) {
  const auto r = parseid({"search", "--store", store().string(), "--attr",
                          "upper_clothes=#c81e23", "-k", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j.at("results").size(), 3u);
  EXPECT_TRUE(j.contains("query"));
  EXPECT_EQ(j.at("query_id"), "attribute-query");
  // No red identity in this set; only the ordering is checked.
  EXPECT_GE(j.at("results")[0].at("score").get<double>(),
            j.at("results")[2].at("score").get<double>());
}

TEST_F(CliTest, SearchErrors) {
  EXPECT_EQ(parseid({"search", "--store", store().string(), "--attr", "cape=#000000"}).code, 1);
  EXPECT_EQ(parseid({"search", "--store", store().string(), "--attr", "pants=#000000", "-k", "0"})
                .code,
            1);
  const auto r = parseid({"search", "--store", store().string(), "--attr", "pants=#000000:velvet"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("smooth"), std::string::npos);
}

TEST_F(CliTest, Inspect) {
  const auto id = list_images(root() / "query")[0].stem().string();
  const auto r = parseid({"inspect", store().string(), id});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("upper_clothes"), std::string::npos);
  EXPECT_NE(r.out.find("Lab mean"), std::string::npos);
  const auto j = parseid({"inspect", store().string(), id, "--json"});
  ASSERT_EQ(j.code, 0);
  EXPECT_EQ(json::parse(j.out).at("image_id"), id);
  EXPECT_EQ(parseid({"inspect", store().string(), "unknown"}).code, 1);
}

TEST(Cli, UsageErrors) {
  EXPECT_NE(parseid({}).code, 0);
  EXPECT_NE(parseid({"frobnicate"}).code, 0);
  EXPECT_NE(parseid({"extract"}).code, 0);
  EXPECT_EQ(parseid({"--help"}).code, 0);
}

}  // namespace
}  // namespace parseid
