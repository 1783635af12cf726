#pragma once

#include <nlohmann/json.hpp>

#include "parseid/features.hpp"
#include "parseid/scoring.hpp"

namespace parseid {

inline constexpr const char* kRecordSchema = "parseid.feature_record/1";

// Record layout:
//   {"schema", "image_id", "person_id"?, "camera_id"?, "extractor_version",
//    "source": {"image", "mask", "digest"},
//    "classes": {"<class name>": {
//        "n_pixels", "over_highlighted", "lab_mean": [L, a, b],
//        "bits": {"L": "<16 hex>", "a": ..., "b": ...},
//        "thresholds": {"L": t, "a": t, "b": t},
//        "lbp": {"contour": {"n_codes": n, "bins": {"<code>": p, ...}},
//                "inner": {...}}}}}
nlohmann::json lbp_to_json(const LbpHistogram& hist);
LbpHistogram lbp_from_json(const nlohmann::json& j);

nlohmann::json class_features_to_json(const ClassFeatures& features);
ClassFeatures class_features_from_json(BodyClass body_class, const nlohmann::json& j);

nlohmann::json record_to_json(const FeatureRecord& record);
// Throws StoreError on schema violations.
FeatureRecord record_from_json(const nlohmann::json& j);

// {"class", "S_L", "S_a", "S_b", "S_d", "S_in", "S_co", "S_c"}; absent
// channels are null.
nlohmann::json class_report_to_json(const ClassReport& report);
nlohmann::json similarity_report_to_json(const SimilarityReport& report);

}  // namespace parseid
