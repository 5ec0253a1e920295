#include "roadcross/eval.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "roadcross/rng.hpp"

namespace roadcross::eval {

VideoSplits split_videos(const std::vector<int>& video_ids, const SplitSpec& spec)
{
    const int total = static_cast<int>(video_ids.size());
    const int validation =
        spec.mode == SplitMode::three_way ? spec.validation_count : 0;
    if (spec.train_count < 1 || spec.test_count < 1 ||
        (spec.mode == SplitMode::three_way && validation < 1))
        throw std::invalid_argument("split_videos: every split needs >= 1 video");
    if (spec.train_count + spec.test_count + validation != total)
        throw std::invalid_argument(
            "split_videos: counts sum to " +
            std::to_string(spec.train_count + spec.test_count + validation) +
            " but there are " + std::to_string(total) + " videos");

    std::vector<int> ids = video_ids;
    Rng rng(spec.rng_seed);
    for (std::size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.index(i)]);

    VideoSplits splits;
    auto it = ids.begin();
    splits.train.assign(it, it + spec.train_count);
    it += spec.train_count;
    splits.test.assign(it, it + spec.test_count);
    it += spec.test_count;
    splits.validation.assign(it, it + validation);
    return splits;
}

Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& truths)
{
    if (predictions.size() != truths.size())
        throw std::invalid_argument("compute_metrics: length mismatch");
    if (predictions.empty())
        throw std::invalid_argument("compute_metrics: empty input");
    Metrics m;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred = predictions[i] == 1;
        const bool truth = truths[i] == 1;
        if (pred && truth)
            ++m.true_positives;
        else if (pred && !truth)
            ++m.false_positives;
        else if (!pred && truth)
            ++m.false_negatives;
        else
            ++m.true_negatives;
    }
    if (m.true_positives + m.false_positives > 0)
        m.precision = static_cast<double>(m.true_positives) /
                      static_cast<double>(m.true_positives + m.false_positives);
    if (m.true_positives + m.false_negatives > 0)
        m.recall = static_cast<double>(m.true_positives) /
                   static_cast<double>(m.true_positives + m.false_negatives);
    return m;
}

std::vector<PrPoint> pr_curve(const std::vector<double>& scores,
                              const std::vector<int>& truths,
                              const std::vector<double>& thresholds)
{
    if (scores.size() != truths.size())
        throw std::invalid_argument("pr_curve: length mismatch");
    std::vector<PrPoint> points;
    points.reserve(thresholds.size());
    for (double t : thresholds) {
        std::vector<int> preds(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            preds[i] = scores[i] > t ? 1 : 0;
        const Metrics m = compute_metrics(preds, truths);
        points.push_back({t, m.precision, m.recall});
    }
    return points;
}

namespace {

std::string metric_cell(const std::optional<double>& value)
{
    if (!value)
        return "undefined";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *value);
    return buf;
}

} // namespace

void write_report_csv(const std::vector<MethodResult>& results,
                      const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "method,precision,recall,throughput_fps\n";
    for (const MethodResult& r : results) {
        out << r.method << ',' << metric_cell(r.precision) << ','
            << metric_cell(r.recall) << ',';
        if (r.throughput_fps) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.3f", *r.throughput_fps);
            out << buf;
        }
        out << '\n';
    }
}

std::string format_report_table(const std::vector<MethodResult>& results)
{
    std::size_t name_width = 6; // "method"
    for (const MethodResult& r : results)
        name_width = std::max(name_width, r.method.size());

    std::ostringstream out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%-*s  %9s  %9s  %14s\n",
                  static_cast<int>(name_width), "method", "precision", "recall",
                  "throughput_fps");
    out << buf;
    for (const MethodResult& r : results) {
        const std::string thr =
            r.throughput_fps ? metric_cell(r.throughput_fps) : "-";
        std::snprintf(buf, sizeof(buf), "%-*s  %9s  %9s  %14s\n",
                      static_cast<int>(name_width), r.method.c_str(),
                      metric_cell(r.precision).c_str(),
                      metric_cell(r.recall).c_str(), thr.c_str());
        out << buf;
    }
    out << "throughput_fps is local wall clock; not comparable across machines\n";
    return out.str();
}

} // namespace roadcross::eval
