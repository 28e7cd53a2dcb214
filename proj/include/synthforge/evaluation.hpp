#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthforge/annotation.hpp"

namespace synthforge {

struct PredictionEntry {
    int class_id = 0;
    double confidence = 0.0;
    std::optional<BoundingBox> bbox;
};

/// All detections reported for one image, in any order; metrics rank them by
/// descending confidence, ties broken by ascending class_id.
struct PredictionRecord {
    std::string image_id;
    std::vector<PredictionEntry> entries;
};

struct EvalReport {
    double accuracy = 0.0;
    std::vector<double> per_class_precision;  // NaN where the column is empty
    std::vector<double> per_class_recall;     // NaN where the class has no truth
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    std::vector<std::vector<std::int64_t>> confusion;
    std::optional<double> dac;
    int dac_k = 3;
    std::size_t n_images = 0;
    std::size_t n_missing_predictions = 0;
    std::size_t n_scored = 0;                 // images entering the confusion matrix
    std::optional<double> mean_iou;           // diagnostic only; never gates DAC
};

/// One JSON object per line:
///   {"image_id": "...", "entries": [{"class_id": 0, "confidence": 0.9,
///                                    "bbox": [x, y, w, h]}, ...]}
std::vector<PredictionRecord> load_predictions_jsonl(const std::filesystem::path& path);

/// image_id -> class_id, keyed by each sample's image path.
std::map<std::string, int> truth_from_manifest(const DatasetManifest& manifest);

/// Detection-as-classification: the fraction of images whose top-k
/// confidence-ranked entries contain the true class. Images with no
/// prediction record count as misses.
double dac_accuracy(const std::vector<PredictionRecord>& predictions,
                    const std::map<std::string, int>& truth, int k = 3,
                    std::size_t* n_missing = nullptr);

/// Top-1 confusion counts: entry (i, j) = truth-i images predicted j.
/// Images with no record or no entries are excluded (and counted separately).
std::vector<std::vector<std::int64_t>> confusion_matrix(
    const std::vector<PredictionRecord>& predictions, const std::map<std::string, int>& truth,
    std::size_t num_classes, std::size_t* n_unscored = nullptr);

/// Per-class precision/recall plus macro averages over classes where the
/// value is defined (NaN marks undefined entries) and overall accuracy.
struct PrecisionRecall {
    std::vector<double> precision;
    std::vector<double> recall;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double accuracy = 0.0;
};
PrecisionRecall precision_recall(const std::vector<std::vector<std::int64_t>>& confusion);

/// Full scoring pass over a manifest + prediction file.
EvalReport evaluate(const DatasetManifest& manifest,
                    const std::vector<PredictionRecord>& predictions, int dac_k = 3);

void write_report(const EvalReport& report, const std::vector<std::string>& class_names,
                  const std::filesystem::path& path);

/// Intersection-over-union of inclusive pixel boxes.
double bbox_iou(const BoundingBox& a, const BoundingBox& b);

}  // namespace synthforge
