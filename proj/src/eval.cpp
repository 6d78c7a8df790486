#include "wrist/eval.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "wrist/core.hpp"

namespace wrist {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DomainError("roc: scores and labels differ in length");
    bool has0 = false, has1 = false;
    for (int y : labels) {
        if (y != 0 && y != 1) throw DomainError("roc: labels must be 0 or 1");
        (y == 1 ? has1 : has0) = true;
    }
    if (!has0 || !has1) throw DomainError("roc: both classes must be present");
}

// Cumulative (fp, tp) counts at each distinct score, highest score first.
struct Sweep {
    std::vector<double> thresholds;
    std::vector<double> fp, tp;
    double P = 0, N = 0;
};

Sweep sweep(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    Sweep s;
    for (int y : labels) (y == 1 ? s.P : s.N) += 1;
    double fp = 0, tp = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        (labels[order[k]] == 1 ? tp : fp) += 1;
        bool last_of_group = k + 1 == order.size() || scores[order[k + 1]] != scores[order[k]];
        if (last_of_group) {
            s.thresholds.push_back(scores[order[k]]);
            s.fp.push_back(fp);
            s.tp.push_back(tp);
        }
    }
    return s;
}

double ratio(double num, double den, const char* name, std::vector<std::string>& flags) {
    if (den == 0) {
        flags.emplace_back(name);
        return 0.0;
    }
    return num / den;
}

}  // namespace

std::vector<RocPoint> roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
    Sweep s = sweep(scores, labels);
    std::vector<RocPoint> out;
    out.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i < s.thresholds.size(); ++i)
        out.push_back({s.fp[i] / s.N, s.tp[i] / s.P, s.thresholds[i]});
    if (out.back().fpr != 1.0 || out.back().tpr != 1.0)
        out.push_back({1.0, 1.0, -std::numeric_limits<double>::infinity()});
    return out;
}

double auroc(const std::vector<double>& scores, const std::vector<int>& labels) {
    Sweep s = sweep(scores, labels);
    // integer counts keep the trapezoid sum exact until the final division
    double area2 = 0, fp_prev = 0, tp_prev = 0;
    for (std::size_t i = 0; i < s.thresholds.size(); ++i) {
        area2 += (s.fp[i] - fp_prev) * (s.tp[i] + tp_prev);
        fp_prev = s.fp[i];
        tp_prev = s.tp[i];
    }
    return area2 / (2.0 * s.P * s.N);
}

ConfusionMatrix confusion(const std::vector<double>& probabilities, const std::vector<int>& labels,
                          double threshold) {
    if (probabilities.size() != labels.size())
        throw DomainError("confusion: probabilities and labels differ in length");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int pred = probabilities[i] >= threshold ? 1 : 0;
        if (labels[i] == 0) {
            (pred == 0 ? cm.tp0 : cm.fn01) += 1;
        } else if (labels[i] == 1) {
            (pred == 1 ? cm.tn1 : cm.fp10) += 1;
        } else {
            throw DomainError("confusion: labels must be 0 or 1");
        }
    }
    return cm;
}

MetricsReport classification_metrics(const ConfusionMatrix& cm) {
    if (cm.tp0 < 0 || cm.fn01 < 0 || cm.fp10 < 0 || cm.tn1 < 0)
        throw DomainError("classification_metrics: negative count");
    if (cm.total() == 0) throw DomainError("classification_metrics: empty confusion matrix");
    MetricsReport r;
    const double tp0 = static_cast<double>(cm.tp0), fn01 = static_cast<double>(cm.fn01);
    const double fp10 = static_cast<double>(cm.fp10), tn1 = static_cast<double>(cm.tn1);
    r.accuracy = (tp0 + tn1) / static_cast<double>(cm.total());
    r.precision0 = ratio(tp0, tp0 + fp10, "precision0", r.flags);
    r.recall0 = ratio(tp0, tp0 + fn01, "recall0", r.flags);
    r.f1_0 = ratio(2 * r.precision0 * r.recall0, r.precision0 + r.recall0, "f1_0", r.flags);
    r.precision1 = ratio(tn1, tn1 + fn01, "precision1", r.flags);
    r.recall1 = ratio(tn1, tn1 + fp10, "recall1", r.flags);
    r.f1_1 = ratio(2 * r.precision1 * r.recall1, r.precision1 + r.recall1, "f1_1", r.flags);
    return r;
}

}  // namespace wrist
