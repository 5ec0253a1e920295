#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace roadcross::eval {

enum class SplitMode { two_way, three_way };

struct SplitSpec {
    SplitMode mode = SplitMode::two_way;
    int train_count = 0;
    int test_count = 0;
    int validation_count = 0; // three_way only
    std::uint64_t rng_seed = 0;
};

struct VideoSplits {
    std::vector<int> train;
    std::vector<int> test;
    std::vector<int> validation;
};

// Seeded Fisher-Yates shuffle, then partition in train/test/validation order.
// Counts must sum to the id count and each used count must be >= 1.
VideoSplits split_videos(const std::vector<int>& video_ids, const SplitSpec& spec);

struct Metrics {
    long long true_positives = 0;
    long long false_positives = 0;
    long long true_negatives = 0;
    long long false_negatives = 0;
    // Unset when the denominator is zero (distinct from 0.0).
    std::optional<double> precision;
    std::optional<double> recall;
};

// Positive class is "safe" (label 1). Throws on length mismatch or empty input.
Metrics compute_metrics(const std::vector<int>& predictions,
                        const std::vector<int>& truths);

struct PrPoint {
    double threshold = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

// Metrics at each threshold with the strict rule predict = (score > t).
std::vector<PrPoint> pr_curve(const std::vector<double>& scores,
                              const std::vector<int>& truths,
                              const std::vector<double>& thresholds);

inline std::vector<double> uniform_thresholds(int count)
{
    std::vector<double> t(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        t[static_cast<std::size_t>(i)] = static_cast<double>(i) / (count - 1);
    return t;
}

struct MethodResult {
    std::string method;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> throughput_fps; // local wall clock, machine-dependent
};

// report.csv: method,precision,recall,throughput_fps with stable column
// order; undefined metrics render as "undefined", absent throughput as empty.
void write_report_csv(const std::vector<MethodResult>& results,
                      const std::filesystem::path& path);
// Fixed-width text table of the same rows, with a note that throughput is
// local wall clock and not comparable across machines.
std::string format_report_table(const std::vector<MethodResult>& results);

} // namespace roadcross::eval
