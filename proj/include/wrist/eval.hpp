#pragma once

#include <string>
#include <vector>

namespace wrist {

inline constexpr double kDecisionThreshold = 0.5;

struct RocPoint {
    double fpr = 0, tpr = 0;
    double threshold = 0;  // scores >= threshold are called positive; +inf at the origin
};

// Vertices at distinct scores, descending, from (0,0) to (1,1).
std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

// Trapezoidal area under roc_curve.
double auroc(const std::vector<double>& scores, const std::vector<int>& labels);

// Table layout: rows are the actual digit, columns the predicted digit.
struct ConfusionMatrix {
    long tp0 = 0;   // actual 0, predicted 0
    long fn01 = 0;  // actual 0, predicted 1
    long fp10 = 0;  // actual 1, predicted 0
    long tn1 = 0;   // actual 1, predicted 1

    long total() const { return tp0 + fn01 + fp10 + tn1; }
    bool operator==(const ConfusionMatrix&) const = default;
};

// Predicted digit is 1 when p >= threshold.
ConfusionMatrix confusion(const std::vector<double>& probabilities, const std::vector<int>& labels,
                          double threshold = kDecisionThreshold);

struct MetricsReport {
    double accuracy = 0;
    double precision0 = 0, recall0 = 0, f1_0 = 0;
    double precision1 = 0, recall1 = 0, f1_1 = 0;
    std::vector<std::string> flags;  // metrics whose denominator was zero
};

MetricsReport classification_metrics(const ConfusionMatrix& cm);

}  // namespace wrist
