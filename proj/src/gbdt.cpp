#include "wrist/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wrist/features.hpp"

namespace wrist {

std::string to_string(TreeAlgorithm a) { return a == TreeAlgorithm::hist ? "hist" : "exact"; }

TreeAlgorithm parse_tree_algorithm(std::string_view s) {
    if (s == "hist") return TreeAlgorithm::hist;
    if (s == "exact") return TreeAlgorithm::exact;
    throw DomainError("unknown tree_algorithm '" + std::string(s) + "' (expected exact or hist)");
}

void TrainConfig::validate() const {
    if (n_estimators < 1) throw DomainError("n_estimators must be >= 1");
    if (!(learning_rate > 0 && learning_rate <= 1)) throw DomainError("learning_rate must be in (0, 1]");
    if (max_depth < 1 || max_depth > 32) throw DomainError("max_depth must be in [1, 32]");
    if (!(lambda >= 0)) throw DomainError("lambda must be >= 0");
    if (n_bins < 2) throw DomainError("n_bins must be >= 2");
    if (!(min_child_weight >= 0)) throw DomainError("min_child_weight must be >= 0");
}

double Tree::predict(std::span<const double> row) const {
    int i = 0;
    while (!nodes[i].is_leaf()) {
        const auto& n = nodes[i];
        i = row[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[i].weight;
}

namespace {

int depth_of(const Tree& t, int i) {
    const auto& n = t.nodes[i];
    if (n.is_leaf()) return 0;
    return 1 + std::max(depth_of(t, n.left), depth_of(t, n.right));
}

}  // namespace

int Tree::depth() const { return nodes.empty() ? 0 : depth_of(*this, 0); }

std::size_t Tree::leaves() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

BinnedFeatures bin_features(const Matrix& X, int n_bins) {
    BinnedFeatures b;
    b.rows = X.rows;
    b.cols = X.cols;
    b.edges.resize(X.cols);
    b.lower.resize(X.cols);
    b.upper.resize(X.cols);
    b.bins.assign(X.rows * X.cols, 0);
    std::vector<double> col(X.rows);
    for (std::size_t j = 0; j < X.cols; ++j) {
        for (std::size_t i = 0; i < X.rows; ++i) col[i] = X(i, j);
        std::vector<double> sorted = col;
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> distinct = sorted;
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

        auto& edges = b.edges[j];
        if (n_bins <= 0 || distinct.size() <= static_cast<std::size_t>(n_bins)) {
            edges.assign(distinct.begin() + (distinct.empty() ? 0 : 1), distinct.end());
        } else {
            // bin k starts at the value of rank floor(k n / n_bins)
            const std::size_t n = sorted.size();
            for (int k = 1; k < n_bins; ++k) {
                double e = sorted[static_cast<std::size_t>(k) * n / static_cast<std::size_t>(n_bins)];
                if (e > sorted.front() && (edges.empty() || e > edges.back())) edges.push_back(e);
            }
        }
        const std::size_t nb = edges.size() + 1;
        b.lower[j].assign(nb, 0.0);
        b.upper[j].assign(nb, 0.0);
        std::vector<bool> seen(nb, false);
        for (std::size_t i = 0; i < X.rows; ++i) {
            auto bin = static_cast<std::uint32_t>(std::upper_bound(edges.begin(), edges.end(), col[i]) -
                                                  edges.begin());
            b.bins[i * X.cols + j] = bin;
            if (!seen[bin]) {
                seen[bin] = true;
                b.lower[j][bin] = b.upper[j][bin] = col[i];
            } else {
                b.lower[j][bin] = std::min(b.lower[j][bin], col[i]);
                b.upper[j][bin] = std::max(b.upper[j][bin], col[i]);
            }
        }
    }
    return b;
}

double sigmoid(double margin) {
    double p;
    if (margin >= 0) {
        p = 1.0 / (1.0 + std::exp(-margin));
    } else {
        double e = std::exp(margin);
        p = e / (1.0 + e);
    }
    // keep the open interval (0, 1) under saturation
    constexpr double kHi = 1.0 - 0x1.0p-53;
    constexpr double kLo = 0x1.0p-1074;
    return std::clamp(p, kLo, kHi);
}

namespace {

constexpr double kHessFloor = 1e-16;

struct Split {
    double gain = 0;
    int feature = -1;
    std::uint32_t left_bin = 0;   // last occupied bin routed left
    std::uint32_t right_bin = 0;  // first occupied bin routed right
};

class TreeBuilder {
public:
    TreeBuilder(const BinnedFeatures& bins, const std::vector<double>& g, const std::vector<double>& h,
                const TrainConfig& cfg)
        : bins_(bins), g_(g), h_(h), cfg_(cfg) {
        std::size_t widest = 0;
        for (std::size_t j = 0; j < bins.cols; ++j) widest = std::max(widest, bins.n_bins(j));
        hg_.assign(widest, 0.0);
        hh_.assign(widest, 0.0);
        hc_.assign(widest, 0);
    }

    // node_of receives, per sample, the leaf index it lands in.
    Tree build(std::vector<int>& node_of) {
        Tree tree;
        std::vector<std::uint32_t> all(bins_.rows);
        std::iota(all.begin(), all.end(), 0u);
        node_of.assign(bins_.rows, 0);
        grow(tree, all, 0, node_of);
        return tree;
    }

private:
    double score(double G, double H) const { return G * G / (H + cfg_.lambda); }

    int grow(Tree& tree, const std::vector<std::uint32_t>& idx, int depth, std::vector<int>& node_of) {
        // sums in ascending sample order, the same order used by every histogram
        double G = 0, H = 0;
        for (auto i : idx) {
            G += g_[i];
            H += h_[i];
        }
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        // Both children need min_child_weight and HR is computed as H - HL, so
        // below this bound no candidate can pass; the slack covers one rounding.
        const bool splittable = H >= 2 * cfg_.min_child_weight * (1 - 1e-12);
        Split best;
        if (depth < cfg_.max_depth && idx.size() >= 2 && splittable) best = find_split(idx, G, H);
        if (best.feature < 0) {
            tree.nodes[id].weight = -G / (H + cfg_.lambda);
            for (auto i : idx) node_of[i] = id;
            return id;
        }

        const auto f = static_cast<std::size_t>(best.feature);
        std::vector<std::uint32_t> left, right;
        for (auto i : idx) (bins_.bin(i, f) <= best.left_bin ? left : right).push_back(i);

        double lo = bins_.upper[f][best.left_bin];
        double hi = bins_.lower[f][best.right_bin];
        double thr = lo + (hi - lo) / 2;
        if (!(thr < hi)) thr = lo;  // adjacent doubles: the midpoint rounds up to hi

        int l = grow(tree, left, depth + 1, node_of);
        int r = grow(tree, right, depth + 1, node_of);
        auto& node = tree.nodes[id];
        node.feature = best.feature;
        node.threshold = thr;
        node.left = l;
        node.right = r;
        return id;
    }

    Split find_split(const std::vector<std::uint32_t>& idx, double G, double H) {
        Split best;
        const double parent = score(G, H);
        for (std::size_t f = 0; f < bins_.cols; ++f) {
            const std::size_t nb = bins_.n_bins(f);
            if (nb < 2) continue;
            touched_.clear();
            for (auto i : idx) {
                auto b = bins_.bin(i, f);
                if (hc_[b]++ == 0) touched_.push_back(b);
                hg_[b] += g_[i];
                hh_[b] += h_[i];
            }
            std::sort(touched_.begin(), touched_.end());

            double GL = 0, HL = 0;
            for (std::size_t k = 0; k + 1 < touched_.size(); ++k) {
                auto b = touched_[k];
                GL += hg_[b];
                HL += hh_[b];
                double GR = G - GL, HR = H - HL;
                if (HL < cfg_.min_child_weight || HR < cfg_.min_child_weight) continue;
                double gain = 0.5 * (score(GL, HL) + score(GR, HR) - parent);
                if (gain > best.gain) {
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.left_bin = b;
                    best.right_bin = touched_[k + 1];
                }
            }
            for (auto b : touched_) {
                hg_[b] = 0;
                hh_[b] = 0;
                hc_[b] = 0;
            }
        }
        return best;
    }

    const BinnedFeatures& bins_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    const TrainConfig& cfg_;
    std::vector<double> hg_, hh_;
    std::vector<std::uint32_t> hc_;
    std::vector<std::uint32_t> touched_;
};

}  // namespace

GbdtModel fit(const Matrix& X, const std::vector<int>& y, const TrainConfig& config,
              std::vector<std::string> names) {
    config.validate();
    const std::size_t n = X.rows;
    if (y.size() != n) throw DomainError("fit: label count does not match rows");
    if (n < 2) throw TrainingError("fit: need at least 2 samples");
    if (X.cols == 0) throw DomainError("fit: no feature columns");
    for (double v : X.data)
        if (!std::isfinite(v)) throw DomainError("fit: non-finite feature value");
    bool has0 = false, has1 = false;
    for (int v : y) {
        if (v != 0 && v != 1) throw DomainError("fit: labels must be 0 or 1");
        (v == 0 ? has0 : has1) = true;
    }
    if (!has0 || !has1) throw TrainingError("fit: labels contain a single class");
    if (names.empty()) {
        if (X.cols == kFeatureCount) {
            names = feature_names();
        } else {
            for (std::size_t j = 0; j < X.cols; ++j) names.push_back("f" + std::to_string(j));
        }
    }
    if (names.size() != X.cols) throw DomainError("fit: feature name count does not match columns");

    GbdtModel model;
    model.learning_rate = config.learning_rate;
    model.base_margin = 0.0;
    model.feature_names = std::move(names);
    model.config = config;

    const BinnedFeatures bins =
        bin_features(X, config.tree_algorithm == TreeAlgorithm::hist ? config.n_bins : 0);

    std::vector<double> margin(n, model.base_margin), g(n), h(n);
    std::vector<int> node_of;
    model.trees.reserve(static_cast<std::size_t>(config.n_estimators));
    for (int round = 0; round < config.n_estimators; ++round) {
        for (std::size_t i = 0; i < n; ++i) {
            double p = sigmoid(margin[i]);
            g[i] = p - y[i];
            h[i] = std::max(p * (1.0 - p), kHessFloor);
        }
        TreeBuilder builder(bins, g, h, config);
        Tree tree = builder.build(node_of);
        for (std::size_t i = 0; i < n; ++i)
            margin[i] += config.learning_rate * tree.nodes[node_of[i]].weight;
        model.trees.push_back(std::move(tree));
    }
    return model;
}

double predict_margin(const GbdtModel& model, std::span<const double> row) {
    if (row.size() != model.n_features())
        throw DomainError("predict: expected " + std::to_string(model.n_features()) + " features, got " +
                          std::to_string(row.size()));
    double sum = 0;
    for (const auto& t : model.trees) sum += t.predict(row);
    return model.base_margin + model.learning_rate * sum;
}

double predict_proba(const GbdtModel& model, std::span<const double> row) {
    return sigmoid(predict_margin(model, row));
}

std::vector<double> predict_proba(const GbdtModel& model, const Matrix& X) {
    std::vector<double> p(X.rows);
    for (std::size_t i = 0; i < X.rows; ++i) p[i] = predict_proba(model, X.row(i));
    return p;
}

double log_loss(const std::vector<double>& p, const std::vector<int>& y) {
    double s = 0;
    for (std::size_t i = 0; i < p.size(); ++i) s -= y[i] == 1 ? std::log(p[i]) : std::log(1.0 - p[i]);
    return p.empty() ? 0.0 : s / static_cast<double>(p.size());
}

}  // namespace wrist
