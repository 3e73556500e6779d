#include "adl/evaluation.hpp"

#include <algorithm>

#include "adl/errors.hpp"

namespace adl {

ConfusionCounts confusion(std::span<const std::string> pred,
                          std::span<const std::string> truth,
                          const std::string& activity) {
    if (pred.size() != truth.size()) {
        throw RangeMismatch("pred covers " + std::to_string(pred.size()) +
                            " observations, truth covers " + std::to_string(truth.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] == activity;
        const bool t = truth[i] == activity;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

Metrics metrics(const ConfusionCounts& c, bool f1_conventional) {
    Metrics m;
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (c.total() > 0) {
        m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    }
    if (m.precision && m.recall) {
        const double p = *m.precision;
        const double r = *m.recall;
        // 1/(1/p + 1/r); the p = r = 0 limit is 0.
        double f = (p + r) > 0.0 ? p * r / (p + r) : 0.0;
        if (f1_conventional) f *= 2.0;
        m.f_score = f;
    }
    return m;
}

double global_accuracy(std::span<const std::string> pred,
                       std::span<const std::string> truth) {
    if (pred.size() != truth.size()) {
        throw RangeMismatch("pred covers " + std::to_string(pred.size()) +
                            " observations, truth covers " + std::to_string(truth.size()));
    }
    if (pred.empty()) {
        throw RangeMismatch("empty timelines");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == truth[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

EvalReport evaluate_timelines(std::span<const std::string> pred,
                              std::span<const std::string> truth,
                              std::span<const std::string> activities,
                              bool f1_conventional) {
    EvalReport report;
    report.global_accuracy = global_accuracy(pred, truth);
    for (const std::string& activity : activities) {
        report.per_activity.push_back(
            {activity, metrics(confusion(pred, truth, activity), f1_conventional)});
    }
    std::stable_sort(report.per_activity.begin(), report.per_activity.end(),
                     [](const ActivityMetrics& a, const ActivityMetrics& b) {
                         if (a.metrics.precision && b.metrics.precision) {
                             return *a.metrics.precision > *b.metrics.precision;
                         }
                         // Defined precision sorts before n/a.
                         return a.metrics.precision.has_value() &&
                                !b.metrics.precision.has_value();
                     });
    return report;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw InsufficientCorpus("median of an empty set");
    }
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace adl
