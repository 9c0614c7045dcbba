#include "blursynth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <utility>

#include "blursynth/error.hpp"
#include "blursynth/resample.hpp"
#include "parallel.hpp"

namespace blursynth {

namespace {

struct ClassCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

ClassCounts check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    if (scores.size() != labels.size())
        throw ArgumentError("scores and labels differ in length");
    if (scores.empty())
        throw ArgumentError("metric of an empty score list");
    ClassCounts c;
    for (auto l : labels)
        (l ? c.positives : c.negatives) += 1;
    if (c.positives == 0 || c.negatives == 0)
        throw UndefinedMetricError("metric undefined: ground truth holds a single class");
    return c;
}

std::vector<std::size_t> descending_order(std::span<const double> scores)
{
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    return order;
}

// Walks tie groups from the highest score down, calling step(threshold, tp, fp).
template <class Step>
void sweep(std::span<const double> scores, std::span<const std::uint8_t> labels, Step step)
{
    const auto order = descending_order(scores);
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double threshold = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == threshold; ++i)
            (labels[order[i]] ? tp : fp) += 1;
        step(threshold, tp, fp);
    }
}

}  // namespace

double roc_auc(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    const auto counts = check_inputs(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // sum of 1-based mid-ranks over the positives
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        std::size_t pos = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            pos += labels[order[j]] ? 1 : 0;
            ++j;
        }
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);
        rank_sum += mid_rank * static_cast<double>(pos);
        i = j;
    }
    const auto p = static_cast<double>(counts.positives);
    const auto n = static_cast<double>(counts.negatives);
    const double auc = (rank_sum - p * (p + 1.0) / 2.0) / (p * n);
    return std::clamp(auc, 0.0, 1.0);
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    const auto counts = check_inputs(scores, labels);
    const auto total_pos = static_cast<double>(counts.positives);
    double ap = 0.0;
    double prev_recall = 0.0;
    sweep(scores, labels, [&](double, std::size_t tp, std::size_t fp) {
        const double recall = static_cast<double>(tp) / total_pos;
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    });
    return std::clamp(ap, 0.0, 1.0);
}

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    const auto counts = check_inputs(scores, labels);
    std::vector<CurvePoint> curve{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
    sweep(scores, labels, [&](double t, std::size_t tp, std::size_t fp) {
        curve.push_back({t, static_cast<double>(fp) / static_cast<double>(counts.negatives),
                         static_cast<double>(tp) / static_cast<double>(counts.positives)});
    });
    return curve;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const std::uint8_t> labels)
{
    const auto counts = check_inputs(scores, labels);
    std::vector<CurvePoint> curve;
    sweep(scores, labels, [&](double t, std::size_t tp, std::size_t fp) {
        curve.push_back({t, static_cast<double>(tp) / static_cast<double>(counts.positives),
                         static_cast<double>(tp) / static_cast<double>(tp + fp)});
    });
    return curve;
}

std::string_view to_string(BlurType type) noexcept
{
    switch (type) {
    case BlurType::defocus:
        return "defocus";
    case BlurType::motion:
        return "motion";
    default:
        return "unknown";
    }
}

BlurType parse_blur_type(std::string_view text)
{
    if (text == "defocus")
        return BlurType::defocus;
    if (text == "motion")
        return BlurType::motion;
    if (text == "unknown")
        return BlurType::unknown;
    throw FormatError("unknown blur type '" + std::string(text) + "'");
}

Image match_prediction_size(const Image& pred, int width, int height)
{
    if (pred.channels() != 1)
        throw ArgumentError("predictions must be single-channel");
    return resize_bilinear(pred, width, height);
}

EvalRecord evaluate_image(const Image& pred, const BinaryMask& gt, std::string id, BlurType type)
{
    const Image scores = match_prediction_size(pred, gt.width(), gt.height());
    EvalRecord rec;
    rec.id = std::move(id);
    rec.blur_type = type;
    rec.auc = roc_auc(scores.data(), gt.data());
    rec.ap = average_precision(scores.data(), gt.data());
    return rec;
}

EvalSummary summarize(std::vector<EvalRecord> records)
{
    EvalSummary s;
    std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& r : records) {
        auto& t = s.per_type[r.blur_type];
        ++t.count;
        t.auc += r.auc;
        t.ap += r.ap;
        ++s.overall.count;
        s.overall.auc += r.auc;
        s.overall.ap += r.ap;
    }
    for (auto& [type, m] : s.per_type) {
        m.auc /= static_cast<double>(m.count);
        m.ap /= static_cast<double>(m.count);
    }
    if (s.overall.count > 0) {
        s.overall.auc /= static_cast<double>(s.overall.count);
        s.overall.ap /= static_cast<double>(s.overall.count);
    }
    s.records = std::move(records);
    return s;
}

EvalSummary evaluate_dataset(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                             const std::map<std::string, BlurType>& type_map, const EvalOptions& options)
{
    std::vector<std::string> ids;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(gt_dir, ec))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            ids.push_back(entry.path().stem().string());
    if (ec)
        throw DecodeError("cannot list ground-truth directory " + gt_dir.string());
    std::sort(ids.begin(), ids.end());

    enum class Outcome { scored, missing, undefined };
    struct Slot {
        Outcome outcome = Outcome::missing;
        EvalRecord record;
        std::vector<double> scores;
        std::vector<std::uint8_t> labels;
    };
    std::vector<Slot> slots(ids.size());

    detail::parallel_for(ids.size(), options.workers, [&](std::size_t i) {
        const auto pred_path = pred_dir / (ids[i] + ".png");
        Slot& slot = slots[i];
        if (!std::filesystem::exists(pred_path))
            return;
        const BinaryMask gt = load_mask(gt_dir / (ids[i] + ".png"));
        const Image pred = match_prediction_size(load_image(pred_path).luma(), gt.width(), gt.height());
        const auto it = type_map.find(ids[i]);
        const BlurType type = it == type_map.end() ? BlurType::unknown : it->second;
        try {
            slot.record = evaluate_image(pred, gt, ids[i], type);
            slot.outcome = Outcome::scored;
        } catch (const UndefinedMetricError&) {
            slot.outcome = Outcome::undefined;
        }
        if (options.flattened) {
            slot.scores.assign(pred.data().begin(), pred.data().end());
            slot.labels.assign(gt.data().begin(), gt.data().end());
        }
    });

    std::vector<EvalRecord> records;
    std::vector<double> all_scores;
    std::vector<std::uint8_t> all_labels;
    std::vector<std::string> missing, undefined;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        auto& slot = slots[i];
        switch (slot.outcome) {
        case Outcome::missing:
            missing.push_back(ids[i]);
            continue;
        case Outcome::undefined:
            undefined.push_back(ids[i]);
            break;
        case Outcome::scored:
            records.push_back(std::move(slot.record));
            break;
        }
        all_scores.insert(all_scores.end(), slot.scores.begin(), slot.scores.end());
        all_labels.insert(all_labels.end(), slot.labels.begin(), slot.labels.end());
    }

    EvalSummary summary = summarize(std::move(records));
    summary.missing = std::move(missing);
    summary.undefined = std::move(undefined);
    if (options.flattened && !all_scores.empty()) {
        try {
            summary.flattened_auc = roc_auc(all_scores, all_labels);
            summary.flattened_ap = average_precision(all_scores, all_labels);
            if (options.curves_dir) {
                std::filesystem::create_directories(*options.curves_dir);
                write_curve_csv(roc_curve(all_scores, all_labels), *options.curves_dir / "roc.csv");
                write_curve_csv(pr_curve(all_scores, all_labels), *options.curves_dir / "pr.csv");
            }
        } catch (const UndefinedMetricError&) {
            // every pixel of the whole set in one class: no flattened numbers
        }
    }
    return summary;
}

std::map<std::string, BlurType> load_type_map(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DecodeError("cannot read type map " + path.string());
    std::map<std::string, BlurType> map;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("type map line without comma: '" + line + "'");
        const std::string id = line.substr(0, comma);
        const std::string type = line.substr(comma + 1);
        if (first && id == "id") {
            first = false;
            continue;
        }
        first = false;
        map[id] = parse_blur_type(type);
    }
    return map;
}

std::string format_summary(const EvalSummary& s)
{
    std::ostringstream out;
    out << std::fixed << std::setprecision(4);
    out << std::left << std::setw(10) << "subset" << std::right << std::setw(8) << "images" << std::setw(9) << "AUC"
        << std::setw(9) << "AP" << '\n';
    auto row = [&](std::string_view name, const MetricMeans& m) {
        out << std::left << std::setw(10) << name << std::right << std::setw(8) << m.count << std::setw(9) << m.auc
            << std::setw(9) << m.ap << '\n';
    };
    constexpr std::pair<BlurType, std::string_view> rows[] = {
        {BlurType::defocus, "Defocus"}, {BlurType::motion, "Motion"}, {BlurType::unknown, "Unknown"}};
    for (const auto& [t, name] : rows) {
        const auto it = s.per_type.find(t);
        if (it != s.per_type.end())
            row(name, it->second);
    }
    row("All", s.overall);
    if (s.flattened_ap)
        out << "flattened  AUC " << *s.flattened_auc << "  AP " << *s.flattened_ap << '\n';
    if (!s.undefined.empty())
        out << "skipped (single-class ground truth): " << s.undefined.size() << '\n';
    if (!s.missing.empty()) {
        out << "missing predictions: " << s.missing.size() << '\n';
        for (const auto& id : s.missing)
            out << "  " << id << '\n';
    }
    return out.str();
}

void write_records_csv(const EvalSummary& summary, const std::filesystem::path& path)
{
    std::ofstream out(path);
    out << "id,blur_type,auc,ap\n" << std::setprecision(17);
    for (const auto& r : summary.records)
        out << r.id << ',' << to_string(r.blur_type) << ',' << r.auc << ',' << r.ap << '\n';
    if (!out)
        throw WriteError("cannot write " + path.string());
}

void write_curve_csv(const std::vector<CurvePoint>& curve, const std::filesystem::path& path)
{
    std::ofstream out(path);
    out << "threshold,x,y\n" << std::setprecision(17);
    for (const auto& p : curve)
        out << p.threshold << ',' << p.x << ',' << p.y << '\n';
    if (!out)
        throw WriteError("cannot write " + path.string());
}

Image tta_average(const Predictor& predict, const Image& img)
{
    const Image a = predict(img);
    const Image b = hflip(predict(hflip(img)));
    if (!a.same_size(b) || a.channels() != b.channels())
        throw ArgumentError("predictor returned maps of differing shape");
    Image out = a;
    for (std::size_t i = 0; i < out.data().size(); ++i)
        out.data()[i] = 0.5 * (a.data()[i] + b.data()[i]);
    return out;
}

}  // namespace blursynth
