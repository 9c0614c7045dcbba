#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blursynth/image.hpp"

namespace blursynth {

/// Area under the ROC curve by mid-rank statistics (ties count 1/2).
/// Throws ArgumentError on length mismatch or empty input and
/// UndefinedMetricError when only one class is present.
double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Non-interpolated AP: sum over descending score thresholds of
/// (R_n - R_{n-1}) * P_n, tied scores forming one threshold.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);

struct CurvePoint {
    double threshold;
    double x;  // FPR for ROC, recall for PR
    double y;  // TPR for ROC, precision for PR
};

/// Operating points per descending unique threshold, ROC starting at (0,0).
std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

enum class BlurType { defocus, motion, unknown };
std::string_view to_string(BlurType type) noexcept;
BlurType parse_blur_type(std::string_view text);

struct EvalRecord {
    std::string id;
    BlurType blur_type = BlurType::unknown;
    double auc = 0.0;
    double ap = 0.0;
};

struct MetricMeans {
    std::size_t count = 0;
    double auc = 0.0;
    double ap = 0.0;
};

struct EvalSummary {
    std::vector<EvalRecord> records;            // scored images, sorted by id
    std::map<BlurType, MetricMeans> per_type;   // only types that occur
    MetricMeans overall;
    std::optional<double> flattened_auc;
    std::optional<double> flattened_ap;
    std::vector<std::string> missing;           // gt ids without a prediction
    std::vector<std::string> undefined;         // single-class gt, skipped
};

/// Upscale a single-channel prediction to the ground-truth size (bilinear)
/// when the sizes differ. Values are not rescaled.
Image match_prediction_size(const Image& pred, int width, int height);

/// Per-image AUC and AP of a 1-channel prediction against the mask.
EvalRecord evaluate_image(const Image& pred, const BinaryMask& gt, std::string id = {},
                          BlurType type = BlurType::unknown);

/// Means of the records, per type and overall.
EvalSummary summarize(std::vector<EvalRecord> records);

struct EvalOptions {
    bool flattened = false;
    int workers = 1;
    std::optional<std::filesystem::path> curves_dir;  // flattened ROC/PR CSV dumps
};

/// Matches `{id}.png` in pred_dir to every mask in gt_dir. The type map
/// (id -> blur type) defaults every image to unknown.
EvalSummary evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                             const std::map<std::string, BlurType>& type_map = {}, const EvalOptions& options = {});

/// CSV with a header line and `id,blur_type` rows.
std::map<std::string, BlurType> load_type_map(const std::filesystem::path& path);

/// Defocus / Motion / All x AUC / AP table.
std::string format_summary(const EvalSummary& summary);
void write_records_csv(const EvalSummary& summary, const std::filesystem::path& path);
void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path);

using Predictor = std::function<Image(const Image&)>;

/// 0.5 * (f(img) + hflip(f(hflip(img)))).
Image tta_average(const Predictor& predict, const Image& img);

}  // namespace blursynth
