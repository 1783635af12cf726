#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parseid/body_class.hpp"
#include "parseid/color_features.hpp"
#include "parseid/features.hpp"

namespace parseid {

// Lab distance at which color similarity reaches zero.
inline constexpr double kDistanceScale = 35.0;

enum class FeatureChannel : std::uint8_t { L = 0, a, b, distance, inner, contour };
inline constexpr std::size_t kFeatureChannelCount = 6;
inline constexpr std::array<std::string_view, kFeatureChannelCount> kFeatureChannelNames = {
    "L", "a", "b", "d", "t_in", "t_co"};

struct FeatureWeights {
  std::array<double, kFeatureChannelCount> w = {0.13, 0.13, 0.13, 0.31, 0.15, 0.15};

  double operator[](FeatureChannel c) const noexcept { return w[static_cast<std::size_t>(c)]; }
  double& operator[](FeatureChannel c) noexcept { return w[static_cast<std::size_t>(c)]; }
  double sum() const noexcept;
  // Throws ConfigError unless weights are non-negative and sum to 1.
  void validate() const;
};

// Class order follows kBodyClasses: hat, hair, glove, sunglasses,
// upper_clothes, socks, pants, scarf, face, left/right arm, left/right leg,
// left/right shoe.
inline constexpr std::array<double, kBodyClassCount> kDefaultClassWeights = {
    2, 1, 2, 2, 8, 1, 6, 3, 1, 1, 1, 1, 1, 2, 2};

struct ClassWeights {
  std::array<double, kBodyClassCount> w = kDefaultClassWeights;

  double operator[](BodyClass c) const noexcept { return w[class_index(c)]; }
  double& operator[](BodyClass c) noexcept { return w[class_index(c)]; }
  double total() const noexcept;
  void validate() const;
};

struct ScoringConfig {
  FeatureWeights features;
  ClassWeights classes;
};

// Key-value weights: `feature.L = 0.13`, `class.upper_clothes = 8`, '#'
// comments. Unlisted keys keep their defaults; the result is validated.
ScoringConfig parse_weights(std::string_view text);
ScoringConfig load_weights(const std::filesystem::path& path);
std::string format_weights(const ScoringConfig& config);

// Per-channel similarities; nullopt marks a channel that is absent.
using ChannelScores = std::array<std::optional<double>, kFeatureChannelCount>;

// s2 / (s1 + s2) over the element-wise sum of the two bit vectors, where
// s1 and s2 count positions equal to 1 and 2. Absent when no bit is set.
std::optional<double> binary_hist_similarity(const BinaryHistogram& b1,
                                             const BinaryHistogram& b2) noexcept;

// Euclidean distance of the means in native CIELAB units, mapped to
// max(0, 1 - d / 35).
double lab_distance(const LabMean& m1, const LabMean& m2) noexcept;
double distance_similarity(const LabMean& m1, const LabMean& m2) noexcept;

ChannelScores channel_similarities(const ClassFeatures& f1, const ClassFeatures& f2) noexcept;

// Weighted sum over present channels with the weights renormalized over
// those channels. Absent when no channel is present.
std::optional<double> combine_channels(const ChannelScores& scores,
                                       const FeatureWeights& weights) noexcept;

// Absent when either class is over-highlighted.
std::optional<double> class_similarity(const ClassFeatures& f1, const ClassFeatures& f2,
                                       const FeatureWeights& weights) noexcept;

struct ClassReport {
  BodyClass body_class = BodyClass::hat;
  ChannelScores channels{};
  double similarity = 0.0;
};

struct SimilarityReport {
  std::vector<ClassReport> classes;  // shared, comparable classes in class order
  double score = 0.0;                // weighted sum, used for ranking
  double normalized = 0.0;           // score / sum of shared class weights

  bool no_shared_classes() const noexcept { return classes.empty(); }
};

SimilarityReport pair_score(const FeatureRecord& r1, const FeatureRecord& r2,
                            const ScoringConfig& config);
// Same arithmetic as pair_score(...).score without building the report.
double pair_score_value(const FeatureRecord& r1, const FeatureRecord& r2,
                        const ScoringConfig& config) noexcept;

}  // namespace parseid
