#include "synthforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_map>

#include <json.hpp>

#include "synthforge/errors.hpp"

namespace synthforge {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Ranking rule shared by every metric: confidence descending, then class id
/// ascending on ties.
bool ranks_before(const PredictionEntry& a, const PredictionEntry& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.class_id < b.class_id;
}

std::vector<PredictionEntry> ranked_entries(const PredictionRecord& rec) {
    std::vector<PredictionEntry> entries = rec.entries;
    std::sort(entries.begin(), entries.end(), ranks_before);
    return entries;
}

std::unordered_map<std::string, const PredictionRecord*> index_predictions(
    const std::vector<PredictionRecord>& predictions) {
    std::unordered_map<std::string, const PredictionRecord*> by_id;
    for (const PredictionRecord& rec : predictions) by_id[rec.image_id] = &rec;
    return by_id;
}

}  // namespace

std::vector<PredictionRecord> load_predictions_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open predictions: " + path.string());
    std::vector<PredictionRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw io_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        try {
            PredictionRecord rec;
            rec.image_id = j.at("image_id").get<std::string>();
            for (const json& ej : j.at("entries")) {
                PredictionEntry entry;
                entry.class_id = ej.at("class_id").get<int>();
                entry.confidence = ej.at("confidence").get<double>();
                if (!(entry.confidence >= 0.0 && entry.confidence <= 1.0))
                    throw io_error(path.string() + ":" + std::to_string(line_no) +
                                   ": confidence outside [0,1]");
                if (ej.contains("bbox")) {
                    const json& bb = ej.at("bbox");
                    BoundingBox box;
                    box.x_min = bb.at(0).get<int>();
                    box.y_min = bb.at(1).get<int>();
                    box.x_max = box.x_min + bb.at(2).get<int>() - 1;
                    box.y_max = box.y_min + bb.at(3).get<int>() - 1;
                    entry.bbox = box;
                }
                rec.entries.push_back(entry);
            }
            records.push_back(std::move(rec));
        } catch (const json::exception& e) {
            throw io_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

std::map<std::string, int> truth_from_manifest(const DatasetManifest& manifest) {
    std::map<std::string, int> truth;
    for (const AnnotatedSample& s : manifest.samples) truth[s.image_path] = s.class_id;
    return truth;
}

double dac_accuracy(const std::vector<PredictionRecord>& predictions,
                    const std::map<std::string, int>& truth, int k, std::size_t* n_missing) {
    if (k < 1) throw std::invalid_argument("dac_accuracy: k must be >= 1");
    if (truth.empty()) throw std::invalid_argument("dac_accuracy: empty truth set");

    const auto by_id = index_predictions(predictions);
    std::size_t missing = 0;
    std::size_t true_positives = 0;
    for (const auto& [image_id, true_class] : truth) {
        const auto it = by_id.find(image_id);
        if (it == by_id.end()) {
            ++missing;  // scored as a miss, not an error
            continue;
        }
        const auto entries = ranked_entries(*it->second);
        const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(k), entries.size());
        for (std::size_t i = 0; i < top; ++i) {
            if (entries[i].class_id == true_class) {
                ++true_positives;
                break;
            }
        }
    }
    if (n_missing) *n_missing = missing;
    return static_cast<double>(true_positives) / static_cast<double>(truth.size());
}

std::vector<std::vector<std::int64_t>> confusion_matrix(
    const std::vector<PredictionRecord>& predictions, const std::map<std::string, int>& truth,
    std::size_t num_classes, std::size_t* n_unscored) {
    std::vector<std::vector<std::int64_t>> matrix(num_classes,
                                                  std::vector<std::int64_t>(num_classes, 0));
    const auto by_id = index_predictions(predictions);
    std::size_t unscored = 0;
    for (const auto& [image_id, true_class] : truth) {
        if (true_class < 0 || static_cast<std::size_t>(true_class) >= num_classes)
            throw std::invalid_argument("confusion_matrix: truth class id out of range");
        const auto it = by_id.find(image_id);
        if (it == by_id.end() || it->second->entries.empty()) {
            ++unscored;
            continue;
        }
        const PredictionEntry top =
            *std::min_element(it->second->entries.begin(), it->second->entries.end(), ranks_before);
        if (top.class_id < 0 || static_cast<std::size_t>(top.class_id) >= num_classes)
            throw std::invalid_argument("confusion_matrix: predicted class id out of range");
        matrix[static_cast<std::size_t>(true_class)][static_cast<std::size_t>(top.class_id)] += 1;
    }
    if (n_unscored) *n_unscored = unscored;
    return matrix;
}

PrecisionRecall precision_recall(const std::vector<std::vector<std::int64_t>>& confusion) {
    const std::size_t n = confusion.size();
    if (n == 0) throw std::invalid_argument("precision_recall: empty matrix");
    std::int64_t total = 0;
    std::int64_t diagonal = 0;
    std::vector<std::int64_t> row_sums(n, 0), col_sums(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (confusion[i].size() != n)
            throw std::invalid_argument("precision_recall: matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            const std::int64_t c = confusion[i][j];
            if (c < 0) throw std::invalid_argument("precision_recall: negative count");
            row_sums[i] += c;
            col_sums[j] += c;
            total += c;
        }
        diagonal += confusion[i][i];
    }
    if (total == 0) throw std::invalid_argument("precision_recall: all-zero matrix");

    PrecisionRecall pr;
    pr.precision.assign(n, kNaN);
    pr.recall.assign(n, kNaN);
    double prec_sum = 0.0, rec_sum = 0.0;
    std::size_t prec_n = 0, rec_n = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (col_sums[i] > 0) {
            pr.precision[i] = static_cast<double>(confusion[i][i]) / static_cast<double>(col_sums[i]);
            prec_sum += pr.precision[i];
            ++prec_n;
        }
        if (row_sums[i] > 0) {
            pr.recall[i] = static_cast<double>(confusion[i][i]) / static_cast<double>(row_sums[i]);
            rec_sum += pr.recall[i];
            ++rec_n;
        }
    }
    pr.macro_precision = prec_n > 0 ? prec_sum / static_cast<double>(prec_n) : kNaN;
    pr.macro_recall = rec_n > 0 ? rec_sum / static_cast<double>(rec_n) : kNaN;
    pr.accuracy = static_cast<double>(diagonal) / static_cast<double>(total);
    return pr;
}

double bbox_iou(const BoundingBox& a, const BoundingBox& b) {
    const int ix_min = std::max(a.x_min, b.x_min);
    const int iy_min = std::max(a.y_min, b.y_min);
    const int ix_max = std::min(a.x_max, b.x_max);
    const int iy_max = std::min(a.y_max, b.y_max);
    const std::int64_t iw = std::max(0, ix_max - ix_min + 1);
    const std::int64_t ih = std::max(0, iy_max - iy_min + 1);
    const std::int64_t inter = iw * ih;
    const std::int64_t area_a = static_cast<std::int64_t>(a.width()) * a.height();
    const std::int64_t area_b = static_cast<std::int64_t>(b.width()) * b.height();
    const std::int64_t uni = area_a + area_b - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

EvalReport evaluate(const DatasetManifest& manifest,
                    const std::vector<PredictionRecord>& predictions, int dac_k) {
    const auto truth = truth_from_manifest(manifest);
    EvalReport report;
    report.dac_k = dac_k;
    report.n_images = truth.size();
    report.dac = dac_accuracy(predictions, truth, dac_k, &report.n_missing_predictions);

    std::size_t unscored = 0;
    report.confusion = confusion_matrix(predictions, truth, manifest.classes.size(), &unscored);
    report.n_scored = truth.size() - unscored;
    const PrecisionRecall pr = precision_recall(report.confusion);
    report.accuracy = pr.accuracy;
    report.per_class_precision = pr.precision;
    report.per_class_recall = pr.recall;
    report.macro_precision = pr.macro_precision;
    report.macro_recall = pr.macro_recall;

    // IoU between each image's truth box and its top-1 predicted box
    const auto by_id = index_predictions(predictions);
    double iou_sum = 0.0;
    std::size_t iou_n = 0;
    for (const AnnotatedSample& s : manifest.samples) {
        const auto it = by_id.find(s.image_path);
        if (it == by_id.end() || it->second->entries.empty()) continue;
        const PredictionEntry top =
            *std::min_element(it->second->entries.begin(), it->second->entries.end(), ranks_before);
        if (!top.bbox) continue;
        iou_sum += bbox_iou(s.bbox, *top.bbox);
        ++iou_n;
    }
    if (iou_n > 0) report.mean_iou = iou_sum / static_cast<double>(iou_n);
    return report;
}

void write_report(const EvalReport& report, const std::vector<std::string>& class_names,
                  const std::filesystem::path& path) {
    auto nan_to_null = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
    json per_class = json::array();
    for (std::size_t i = 0; i < report.per_class_precision.size(); ++i) {
        per_class.push_back({{"class_id", i},
                             {"name", i < class_names.size() ? class_names[i] : ""},
                             {"precision", nan_to_null(report.per_class_precision[i])},
                             {"recall", nan_to_null(report.per_class_recall[i])}});
    }
    json doc = {{"accuracy", report.accuracy},
                {"macro_precision", nan_to_null(report.macro_precision)},
                {"macro_recall", nan_to_null(report.macro_recall)},
                {"per_class", per_class},
                {"confusion", report.confusion},
                {"dac", report.dac ? json(*report.dac) : json(nullptr)},
                {"dac_k", report.dac_k},
                {"n_images", report.n_images},
                {"n_scored", report.n_scored},
                {"n_missing_predictions", report.n_missing_predictions},
                {"mean_iou", report.mean_iou ? json(*report.mean_iou) : json(nullptr)}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write report: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw io_error("report write failed: " + path.string());
}

}  // namespace synthforge
