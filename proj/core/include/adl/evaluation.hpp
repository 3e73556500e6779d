#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace adl {

struct ConfusionCounts {
    long tp = 0;
    long fp = 0;
    long tn = 0;
    long fn = 0;

    long total() const { return tp + fp + tn + fn; }
};

// A metric is empty (n/a) when its denominator is zero.
struct Metrics {
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f_score;
    std::optional<double> accuracy;
};

// One-vs-rest confusion over per-observation labels for the given activity.
// Throws RangeMismatch when pred and truth cover different ranges.
ConfusionCounts confusion(std::span<const std::string> pred,
                          std::span<const std::string> truth,
                          const std::string& activity);

// F-score is computed as printed in the source protocol,
// 1/(1/precision + 1/recall) = p*r/(p+r); it lies in [0, 1/2].
// Pass f1_conventional to double it into the usual F1.
Metrics metrics(const ConfusionCounts& c, bool f1_conventional = false);

// Multi-class exact-match rate.
double global_accuracy(std::span<const std::string> pred,
                       std::span<const std::string> truth);

struct ActivityMetrics {
    std::string activity;
    Metrics metrics;
};

struct EvalReport {
    int fold = 0;
    std::string held_out_video;
    double global_accuracy = 0.0;
    // Sorted by decreasing precision; undefined precision sorts last.
    std::vector<ActivityMetrics> per_activity;
};

EvalReport evaluate_timelines(std::span<const std::string> pred,
                              std::span<const std::string> truth,
                              std::span<const std::string> activities,
                              bool f1_conventional = false);

double median(std::vector<double> values);

}  // namespace adl
