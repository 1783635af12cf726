#include <gtest/gtest.h>

#include <random>

#include "parseid/error.hpp"
#include "parseid/scoring.hpp"
#include "synth.hpp"

namespace parseid {
namespace {

BinaryHistogram bits_of(std::initializer_list<int> set_bins) {
  BinaryHistogram b;
  for (int i : set_bins) b.set(i);
  return b;
}

LbpHistogram lbp_one(int code) {
  LbpHistogram h;
  h.set_bin(code, 1.0);
  h.n_codes = 1;
  return h;
}

// A class whose channel similarities against `full_match` are all 1.
ClassFeatures plain_class(BodyClass c) {
  ClassFeatures f;
  f.body_class = c;
  f.n_pixels = 100;
  for (auto& h : f.color.hists) h = bits_of({10, 11});
  f.color.mean = LabMean{100, 128, 128};
  f.inner = lbp_one(0);
  f.contour = lbp_one(7);
  return f;
}

FeatureRecord record_with(std::initializer_list<ClassFeatures> classes) {
  FeatureRecord r;
  r.image_id = "r";
  r.classes = classes;
  std::sort(r.classes.begin(), r.classes.end(), [](const auto& a, const auto& b) {
    return label_of(a.body_class) < label_of(b.body_class);
  });
  return r;
}

TEST(Weights, Defaults) {
  const FeatureWeights fw;
  EXPECT_DOUBLE_EQ(fw[FeatureChannel::L], 0.13);
  EXPECT_DOUBLE_EQ(fw[FeatureChannel::distance], 0.31);
  EXPECT_DOUBLE_EQ(fw[FeatureChannel::inner], 0.15);
  EXPECT_NEAR(fw.sum(), 1.0, 1e-12);
  EXPECT_NO_THROW(fw.validate());

  const ClassWeights cw;
  EXPECT_EQ(cw.total(), 34.0);
  EXPECT_EQ(cw[BodyClass::upper_clothes], 8.0);
  EXPECT_EQ(cw[BodyClass::pants], 6.0);
  EXPECT_EQ(cw[BodyClass::scarf], 3.0);
  for (BodyClass c : {BodyClass::hat, BodyClass::glove, BodyClass::sunglasses, BodyClass::left_shoe,
                      BodyClass::right_shoe}) {
    EXPECT_EQ(cw[c], 2.0) << class_name(c);
  }
  for (BodyClass c : {BodyClass::hair, BodyClass::socks, BodyClass::face, BodyClass::left_leg,
                      BodyClass::right_leg, BodyClass::left_arm, BodyClass::right_arm}) {
    EXPECT_EQ(cw[c], 1.0) << class_name(c);
  }
}

TEST(Weights, ParseOverrides) {
  const ScoringConfig c = parse_weights(
      "# tuned\nfeature.L = 0.2\nfeature.d=0.24\n\nclass.upper_clothes = 10  # more\n");
  EXPECT_DOUBLE_EQ(c.features[FeatureChannel::L], 0.2);
  EXPECT_DOUBLE_EQ(c.features[FeatureChannel::distance], 0.24);
  EXPECT_DOUBLE_EQ(c.classes[BodyClass::upper_clothes], 10.0);
  EXPECT_DOUBLE_EQ(c.classes[BodyClass::pants], 6.0);
}

TEST(Weights, RejectsBadSum) {
  EXPECT_THROW(parse_weights("feature.L = 0.5\n"), ConfigError);
}

TEST(Weights, RejectsUnknownKeyAndGarbage) {
  EXPECT_THROW(parse_weights("feature.x = 0.1\n"), ConfigError);
  EXPECT_THROW(parse_weights("class.dress = 1\n"), ConfigError);
  EXPECT_THROW(parse_weights("feature.L 0.1\n"), ConfigError);
  EXPECT_THROW(parse_weights("class.hat = two\n"), ConfigError);
  EXPECT_THROW(parse_weights("class.hat = -1\n"), ConfigError);
  try {
    parse_weights("\n\nfeature.zz = 1\n");
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Weights, FormatRoundTrips) {
  ScoringConfig c;
  c.classes[BodyClass::hat] = 2.5;
  c.features[FeatureChannel::L] = 0.1;
  c.features[FeatureChannel::a] = 0.16;
  const ScoringConfig back = parse_weights(format_weights(c));
  EXPECT_EQ(back.features.w, c.features.w);
  EXPECT_EQ(back.classes.w, c.classes.w);
}

TEST(BinaryHistSimilarity, Identical) {
  const BinaryHistogram b = bits_of({3, 4, 5, 40});
  EXPECT_DOUBLE_EQ(*binary_hist_similarity(b, b), 1.0);
}

TEST(BinaryHistSimilarity, HandCase) {
  // [1,1,0,0] + [1,0,1,0] = [2,1,1,0] -> one 2, two 1s.
  EXPECT_DOUBLE_EQ(*binary_hist_similarity(bits_of({0, 1}), bits_of({0, 2})), 1.0 / 3.0);
}

TEST(BinaryHistSimilarity, Disjoint) {
  EXPECT_EQ(*binary_hist_similarity(bits_of({0, 1}), bits_of({5, 6})), 0.0);
}

TEST(BinaryHistSimilarity, BothEmptyIsAbsent) {
  EXPECT_FALSE(binary_hist_similarity(BinaryHistogram{}, BinaryHistogram{}).has_value());
  EXPECT_EQ(*binary_hist_similarity(BinaryHistogram{}, bits_of({1})), 0.0);
}

TEST(DistanceSimilarity, Cases) {
  const LabMean base{50 * 2.55, 128, 128};
  EXPECT_DOUBLE_EQ(distance_similarity(base, base), 1.0);
  EXPECT_NEAR(distance_similarity(base, LabMean{50 * 2.55, 128 + 21, 128 + 28}), 0.0, 1e-12);
  EXPECT_NEAR(distance_similarity(base, LabMean{50 * 2.55, 128 + 3, 128 + 4}), 6.0 / 7.0, 1e-12);
  EXPECT_EQ(distance_similarity(base, LabMean{255, 0, 0}), 0.0);
}

TEST(DistanceSimilarity, LightnessInNativeUnits) {
  // 25.5 encoded lightness units is 10 native units.
  EXPECT_NEAR(lab_distance(LabMean{100, 128, 128}, LabMean{125.5, 128, 128}), 10.0, 1e-12);
}

TEST(ClassSimilarity, AllOnes) {
  const ClassFeatures f = plain_class(BodyClass::pants);
  EXPECT_DOUBLE_EQ(*class_similarity(f, f, FeatureWeights{}), 1.0);
}

TEST(ClassSimilarity, AllZeros) {
  ClassFeatures f = plain_class(BodyClass::pants);
  ClassFeatures g = f;
  for (auto& h : g.color.hists) h = bits_of({50});
  g.color.mean = LabMean{255, 255, 255};
  g.inner = lbp_one(255);
  g.contour = lbp_one(1);
  EXPECT_DOUBLE_EQ(*class_similarity(f, g, FeatureWeights{}), 0.0);
}

TEST(ClassSimilarity, AbsentTexturesRenormalize) {
  ClassFeatures f = plain_class(BodyClass::pants);
  f.inner = {};
  f.contour = {};
  EXPECT_DOUBLE_EQ(*class_similarity(f, f, FeatureWeights{}), 1.0);

  // Mixed values: weights renormalized over {L, a, b, d}.
  ChannelScores s{};
  s[0] = 1.0;
  s[1] = 0.5;
  s[2] = 0.0;
  s[3] = 0.25;
  const double expected = (0.13 * 1.0 + 0.13 * 0.5 + 0.31 * 0.25) / (0.13 * 3 + 0.31);
  EXPECT_NEAR(*combine_channels(s, FeatureWeights{}), expected, 1e-15);
  EXPECT_FALSE(combine_channels(ChannelScores{}, FeatureWeights{}).has_value());
}

TEST(ClassSimilarity, OverHighlightedIsAbsent) {
  ClassFeatures f = plain_class(BodyClass::face);
  ClassFeatures g = f;
  g.color.over_highlighted = true;
  EXPECT_FALSE(class_similarity(f, g, FeatureWeights{}).has_value());
  EXPECT_FALSE(class_similarity(g, f, FeatureWeights{}).has_value());
}

TEST(PairScore, SelfScoreIsOne) {
  std::mt19937_64 rng(20);
  synth::RecordShape shape;
  shape.over_highlight_rate = 0.0;
  for (int i = 0; i < 50; ++i) {
    const FeatureRecord r = synth::random_record(rng, "a", shape);
    const SimilarityReport rep = pair_score(r, r, ScoringConfig{});
    if (rep.no_shared_classes()) continue;
    EXPECT_NEAR(rep.normalized, 1.0, 1e-12);
    for (const ClassReport& c : rep.classes) EXPECT_NEAR(c.similarity, 1.0, 1e-12);
  }
}

TEST(PairScore, AllFifteenClassesSumTo34) {
  FeatureRecord r;
  for (BodyClass c : kBodyClasses) r.classes.push_back(plain_class(c));
  std::sort(r.classes.begin(), r.classes.end(), [](const auto& a, const auto& b) {
    return label_of(a.body_class) < label_of(b.body_class);
  });
  const SimilarityReport rep = pair_score(r, r, ScoringConfig{});
  EXPECT_DOUBLE_EQ(rep.score, 34.0);
  EXPECT_DOUBLE_EQ(rep.normalized, 1.0);
  EXPECT_EQ(rep.classes.size(), 15u);
}

TEST(PairScore, PantsAndFaceHandCase) {
  // pants S_c = 0.5: L, a, b, d, inner, contour all 0.5.
  ClassFeatures p1 = plain_class(BodyClass::pants);
  ClassFeatures p2 = p1;
  for (auto& h : p1.color.hists) h = bits_of({1, 2});
  for (auto& h : p2.color.hists) h = bits_of({1, 2, 3, 4});  // 2 twos / 4 set -> 0.5
  p2.color.mean = LabMean{100, 128 + 17.5, 128};              // d = 17.5 -> 0.5
  p1.inner.slots = {};
  p1.inner.set_bin(0, 0.5);
  p1.inner.set_bin(1, 0.5);
  p2.inner.slots = {};
  p2.inner.set_bin(0, 0.5);
  p2.inner.set_bin(3, 0.5);
  p1.contour = p1.inner;
  p2.contour = p2.inner;
  ASSERT_NEAR(*class_similarity(p1, p2, FeatureWeights{}), 0.5, 1e-12);

  const FeatureRecord a = record_with({p1, plain_class(BodyClass::face), plain_class(BodyClass::hat)});
  const FeatureRecord b = record_with({p2, plain_class(BodyClass::face), plain_class(BodyClass::scarf)});
  const SimilarityReport rep = pair_score(a, b, ScoringConfig{});
  EXPECT_NEAR(rep.score, 4.0, 1e-12);
  EXPECT_NEAR(rep.normalized, 4.0 / 7.0, 1e-12);
  ASSERT_EQ(rep.classes.size(), 2u);
  EXPECT_EQ(rep.classes[0].body_class, BodyClass::pants);
  EXPECT_EQ(rep.classes[1].body_class, BodyClass::face);
  EXPECT_DOUBLE_EQ(pair_score_value(a, b, ScoringConfig{}), rep.score);
}

TEST(PairScore, NoSharedClasses) {
  const FeatureRecord a = record_with({plain_class(BodyClass::hat)});
  const FeatureRecord b = record_with({plain_class(BodyClass::pants)});
  const SimilarityReport rep = pair_score(a, b, ScoringConfig{});
  EXPECT_TRUE(rep.no_shared_classes());
  EXPECT_EQ(rep.score, 0.0);
  EXPECT_EQ(rep.normalized, 0.0);
}

TEST(PairScore, OverHighlightedClassLeavesScore) {
  ClassFeatures bright = plain_class(BodyClass::upper_clothes);
  bright.color.over_highlighted = true;
  const FeatureRecord a = record_with({bright, plain_class(BodyClass::pants)});
  const FeatureRecord b = record_with({plain_class(BodyClass::upper_clothes), plain_class(BodyClass::pants)});
  const SimilarityReport rep = pair_score(a, b, ScoringConfig{});
  EXPECT_DOUBLE_EQ(rep.score, 6.0);
  ASSERT_EQ(rep.classes.size(), 1u);
  EXPECT_EQ(rep.classes[0].body_class, BodyClass::pants);
}

TEST(PairScore, RankingUsesUnnormalizedScore) {
  // Face only, S_c = 1, versus upper clothes and pants at S_c = 0.9.
  const FeatureRecord q = record_with({plain_class(BodyClass::face),
                                       plain_class(BodyClass::upper_clothes),
                                       plain_class(BodyClass::pants)});
  const FeatureRecord face_only = record_with({plain_class(BodyClass::face)});
  ScoringConfig config;
  // Only the distance channel carries weight so S_c = S_d can be dialled.
  config.features.w = {0, 0, 0, 1, 0, 0};
  ClassFeatures u = plain_class(BodyClass::upper_clothes);
  ClassFeatures p = plain_class(BodyClass::pants);
  u.color.mean.a += 3.5;  // d = 3.5 -> 0.9
  p.color.mean.a += 3.5;
  const FeatureRecord clothes = record_with({u, p});

  const SimilarityReport a = pair_score(q, face_only, config);
  const SimilarityReport b = pair_score(q, clothes, config);
  EXPECT_DOUBLE_EQ(a.normalized, 1.0);
  EXPECT_DOUBLE_EQ(a.score, 1.0);
  EXPECT_NEAR(b.score, 12.6, 1e-12);
  EXPECT_NEAR(b.normalized, 0.9, 1e-12);
  EXPECT_GT(b.score, a.score);
  EXPECT_GT(a.normalized, b.normalized);
}

TEST(PairScore, MonotoneInChannelScore) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const FeatureWeights w;
  for (int t = 0; t < 2000; ++t) {
    ChannelScores s;
    for (auto& v : s) {
      if (u(rng) < 0.8) v = u(rng);
    }
    const auto base = combine_channels(s, w);
    const std::size_t f = static_cast<std::size_t>(u(rng) * kFeatureChannelCount);
    if (!s[f]) continue;
    ChannelScores raised = s;
    raised[f] = std::min(1.0, *s[f] + u(rng) * 0.5);
    EXPECT_GE(*combine_channels(raised, w), *base - 1e-15);
  }
}

TEST(PairScore, SymmetricAndBounded) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 500; ++i) {
    const FeatureRecord a = synth::random_record(rng, "a");
    const FeatureRecord b = synth::random_record(rng, "b");
    const SimilarityReport ab = pair_score(a, b, ScoringConfig{});
    const SimilarityReport ba = pair_score(b, a, ScoringConfig{});
    EXPECT_EQ(ab.score, ba.score);
    EXPECT_EQ(ab.normalized, ba.normalized);
    ASSERT_EQ(ab.classes.size(), ba.classes.size());
    for (std::size_t k = 0; k < ab.classes.size(); ++k) {
      EXPECT_EQ(ab.classes[k].channels, ba.classes[k].channels);
      EXPECT_EQ(ab.classes[k].similarity, ba.classes[k].similarity);
    }
    EXPECT_GE(ab.score, 0.0);
    EXPECT_LE(ab.score, 34.0 + 1e-12);
    EXPECT_GE(ab.normalized, 0.0);
    EXPECT_LE(ab.normalized, 1.0 + 1e-12);
  }
}

}  // namespace
}  // namespace parseid
