#include "parseid/record_json.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "parseid/error.hpp"

namespace parseid {

using nlohmann::json;

json lbp_to_json(const LbpHistogram& hist) {
  json bins = json::object();
  for (const std::uint8_t code : minimal_codes()) {
    if (const double v = hist.bin(code); v != 0.0) bins[std::to_string(code)] = v;
  }
  return json{{"n_codes", hist.n_codes}, {"bins", std::move(bins)}};
}

LbpHistogram lbp_from_json(const json& j) {
  LbpHistogram hist;
  hist.n_codes = j.at("n_codes").get<std::uint32_t>();
  for (const auto& [key, value] : j.at("bins").items()) {
    int code = -1;
    const auto [end, ec] = std::from_chars(key.data(), key.data() + key.size(), code);
    if (ec != std::errc{} || end != key.data() + key.size() || code < 0 || code >= kLbpBins) {
      throw StoreError("invalid LBP bin index '" + key + "'");
    }
    hist.set_bin(code, value.get<double>());
  }
  return hist;
}

json class_features_to_json(const ClassFeatures& f) {
  json bits = json::object();
  json thresholds = json::object();
  for (std::size_t c = 0; c < 3; ++c) {
    bits[kChannelNames[c]] = f.color.hists[c].to_hex();
    thresholds[kChannelNames[c]] = f.color.hists[c].threshold;
  }
  return json{
      {"n_pixels", f.n_pixels},
      {"over_highlighted", f.color.over_highlighted},
      {"lab_mean", {f.color.mean.L, f.color.mean.a, f.color.mean.b}},
      {"bits", std::move(bits)},
      {"thresholds", std::move(thresholds)},
      {"lbp", {{"contour", lbp_to_json(f.contour)}, {"inner", lbp_to_json(f.inner)}}},
  };
}

ClassFeatures class_features_from_json(BodyClass body_class, const json& j) {
  ClassFeatures f;
  f.body_class = body_class;
  f.n_pixels = j.at("n_pixels").get<std::uint32_t>();
  f.color.over_highlighted = j.at("over_highlighted").get<bool>();
  const auto& mean = j.at("lab_mean");
  if (!mean.is_array() || mean.size() != 3) throw StoreError("lab_mean must hold 3 numbers");
  f.color.mean = LabMean{mean[0].get<double>(), mean[1].get<double>(), mean[2].get<double>()};
  for (std::size_t c = 0; c < 3; ++c) {
    const double threshold = j.at("thresholds").at(kChannelNames[c]).get<double>();
    f.color.hists[c] =
        BinaryHistogram::from_hex(j.at("bits").at(kChannelNames[c]).get<std::string>(), threshold);
  }
  f.contour = lbp_from_json(j.at("lbp").at("contour"));
  f.inner = lbp_from_json(j.at("lbp").at("inner"));
  return f;
}

json record_to_json(const FeatureRecord& record) {
  json classes = json::object();
  for (const ClassFeatures& f : record.classes) {
    classes[std::string(class_name(f.body_class))] = class_features_to_json(f);
  }
  json j{
      {"schema", kRecordSchema},
      {"image_id", record.image_id},
      {"extractor_version", record.extractor_version},
      {"source",
       {{"image", record.image_path}, {"mask", record.mask_path}, {"digest", record.source_digest}}},
      {"classes", std::move(classes)},
  };
  if (record.person_id) j["person_id"] = *record.person_id;
  if (record.camera_id) j["camera_id"] = *record.camera_id;
  return j;
}

FeatureRecord record_from_json(const json& j) {
  try {
    if (j.at("schema").get<std::string>() != kRecordSchema) {
      throw StoreError("unsupported record schema '" + j.at("schema").get<std::string>() + "'");
    }
    FeatureRecord record;
    record.image_id = j.at("image_id").get<std::string>();
    record.extractor_version = j.at("extractor_version").get<std::string>();
    if (j.contains("person_id")) record.person_id = j.at("person_id").get<int>();
    if (j.contains("camera_id")) record.camera_id = j.at("camera_id").get<int>();
    const auto& source = j.at("source");
    record.image_path = source.at("image").get<std::string>();
    record.mask_path = source.at("mask").get<std::string>();
    record.source_digest = source.at("digest").get<std::string>();
    for (const auto& [name, value] : j.at("classes").items()) {
      const auto c = class_from_name(name);
      if (!c) throw StoreError("unknown class '" + name + "'");
      record.classes.push_back(class_features_from_json(*c, value));
    }
    std::sort(record.classes.begin(), record.classes.end(),
              [](const ClassFeatures& a, const ClassFeatures& b) {
                return label_of(a.body_class) < label_of(b.body_class);
              });
    return record;
  } catch (const json::exception& e) {
    throw StoreError(std::string("malformed feature record: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw StoreError(std::string("malformed feature record: ") + e.what());
  }
}

json class_report_to_json(const ClassReport& report) {
  json j{{"class", class_name(report.body_class)}};
  static constexpr std::array<const char*, kFeatureChannelCount> kKeys = {
      "S_L", "S_a", "S_b", "S_d", "S_in", "S_co"};
  for (std::size_t f = 0; f < kFeatureChannelCount; ++f) {
    j[kKeys[f]] = report.channels[f] ? json(*report.channels[f]) : json(nullptr);
  }
  j["S_c"] = report.similarity;
  return j;
}

json similarity_report_to_json(const SimilarityReport& report) {
  json classes = json::array();
  for (const ClassReport& c : report.classes) classes.push_back(class_report_to_json(c));
  return json{{"S_sim", report.score},
              {"S_simn", report.normalized},
              {"no_shared_classes", report.no_shared_classes()},
              {"classes", std::move(classes)}};
}

}  // namespace parseid
