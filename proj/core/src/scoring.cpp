#include "parseid/scoring.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "parseid/error.hpp"

namespace parseid {
namespace {

std::string_view trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string format_double(double v) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, end);
}

// Walks the classes present in both records in class order, calling
// visit(class, S_c) for every comparable pair, and returns the weighted
// score together with the shared class weight total.
template <typename Visit>
std::pair<double, double> accumulate_pair(const FeatureRecord& r1, const FeatureRecord& r2,
                                          const ScoringConfig& config, Visit&& visit) {
  double score = 0.0;
  double weight_total = 0.0;
  auto it1 = r1.classes.begin();
  auto it2 = r2.classes.begin();
  while (it1 != r1.classes.end() && it2 != r2.classes.end()) {
    const auto l1 = label_of(it1->body_class);
    const auto l2 = label_of(it2->body_class);
    if (l1 < l2) {
      ++it1;
    } else if (l2 < l1) {
      ++it2;
    } else {
      if (!it1->color.over_highlighted && !it2->color.over_highlighted) {
        const ChannelScores channels = channel_similarities(*it1, *it2);
        if (const auto similarity = combine_channels(channels, config.features)) {
          const double w = config.classes[it1->body_class];
          score += w * *similarity;
          weight_total += w;
          visit(it1->body_class, channels, *similarity);
        }
      }
      ++it1;
      ++it2;
    }
  }
  return {score, weight_total};
}

}  // namespace

double FeatureWeights::sum() const noexcept { return std::accumulate(w.begin(), w.end(), 0.0); }

void FeatureWeights::validate() const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0) {
      throw ConfigError("feature weight " + std::string(kFeatureChannelNames[i]) +
                        " must be a non-negative number");
    }
  }
  if (std::abs(sum() - 1.0) > 1e-9) {
    throw ConfigError("feature weights must sum to 1 (got " + format_double(sum()) + ")");
  }
}

double ClassWeights::total() const noexcept { return std::accumulate(w.begin(), w.end(), 0.0); }

void ClassWeights::validate() const {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || w[i] < 0.0) {
      throw ConfigError("class weight " + std::string(class_name(kBodyClasses[i])) +
                        " must be a non-negative number");
    }
  }
}

ScoringConfig parse_weights(std::string_view text) {
  ScoringConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const auto where = "weights line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view raw = trim(line.substr(eq + 1));

    double value = 0.0;
    const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc{} || end != raw.data() + raw.size()) {
      throw ConfigError(where + ": '" + std::string(raw) + "' is not a number");
    }

    bool known = false;
    if (key.starts_with("feature.")) {
      const auto name = key.substr(8);
      for (std::size_t i = 0; i < kFeatureChannelCount; ++i) {
        if (kFeatureChannelNames[i] == name) {
          config.features.w[i] = value;
          known = true;
        }
      }
    } else if (key.starts_with("class.")) {
      if (const auto c = class_from_name(key.substr(6))) {
        config.classes[*c] = value;
        known = true;
      }
    }
    if (!known) throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
  }
  config.features.validate();
  config.classes.validate();
  return config;
}

ScoringConfig load_weights(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open weights file");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_weights(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_weights(const ScoringConfig& config) {
  std::ostringstream out;
  for (std::size_t i = 0; i < kFeatureChannelCount; ++i) {
    out << "feature." << kFeatureChannelNames[i] << " = " << format_double(config.features.w[i])
        << '\n';
  }
  for (const BodyClass c : kBodyClasses) {
    out << "class." << class_name(c) << " = " << format_double(config.classes[c]) << '\n';
  }
  return out.str();
}

std::optional<double> binary_hist_similarity(const BinaryHistogram& b1,
                                             const BinaryHistogram& b2) noexcept {
  const int twos = std::popcount(b1.bits & b2.bits);
  const int ones = std::popcount(b1.bits ^ b2.bits);
  if (ones + twos == 0) return std::nullopt;
  return static_cast<double>(twos) / static_cast<double>(ones + twos);
}

double lab_distance(const LabMean& m1, const LabMean& m2) noexcept {
  const double dL = (m1.L - m2.L) * (100.0 / 255.0);
  const double da = m1.a - m2.a;
  const double db = m1.b - m2.b;
  return std::sqrt(dL * dL + da * da + db * db);
}

double distance_similarity(const LabMean& m1, const LabMean& m2) noexcept {
  const double d = lab_distance(m1, m2);
  return d < kDistanceScale ? 1.0 - d / kDistanceScale : 0.0;
}

ChannelScores channel_similarities(const ClassFeatures& f1, const ClassFeatures& f2) noexcept {
  ChannelScores s;
  s[0] = binary_hist_similarity(f1.color.hists[0], f2.color.hists[0]);
  s[1] = binary_hist_similarity(f1.color.hists[1], f2.color.hists[1]);
  s[2] = binary_hist_similarity(f1.color.hists[2], f2.color.hists[2]);
  s[3] = distance_similarity(f1.color.mean, f2.color.mean);
  s[4] = texture_similarity(f1.inner, f2.inner);
  s[5] = texture_similarity(f1.contour, f2.contour);
  return s;
}

std::optional<double> combine_channels(const ChannelScores& scores,
                                       const FeatureWeights& weights) noexcept {
  double weighted = 0.0;
  double present = 0.0;
  for (std::size_t f = 0; f < kFeatureChannelCount; ++f) {
    if (!scores[f]) continue;
    weighted += weights.w[f] * *scores[f];
    present += weights.w[f];
  }
  if (present <= 0.0) return std::nullopt;
  return weighted / present;
}

std::optional<double> class_similarity(const ClassFeatures& f1, const ClassFeatures& f2,
                                       const FeatureWeights& weights) noexcept {
  if (f1.color.over_highlighted || f2.color.over_highlighted) return std::nullopt;
  return combine_channels(channel_similarities(f1, f2), weights);
}

SimilarityReport pair_score(const FeatureRecord& r1, const FeatureRecord& r2,
                            const ScoringConfig& config) {
  SimilarityReport report;
  const auto [score, weight_total] = accumulate_pair(
      r1, r2, config, [&](BodyClass c, const ChannelScores& channels, double similarity) {
        report.classes.push_back(ClassReport{c, channels, similarity});
      });
  report.score = score;
  report.normalized = weight_total > 0.0 ? score / weight_total : 0.0;
  return report;
}

double pair_score_value(const FeatureRecord& r1, const FeatureRecord& r2,
                        const ScoringConfig& config) noexcept {
  return accumulate_pair(r1, r2, config, [](BodyClass, const ChannelScores&, double) {}).first;
}

}  // namespace parseid
