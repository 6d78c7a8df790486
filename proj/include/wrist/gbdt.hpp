#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wrist/core.hpp"
#include "wrist/matrix.hpp"

namespace wrist {

class TrainingError : public Error {
public:
    using Error::Error;
};

class ModelLoadError : public Error {
public:
    using Error::Error;
};

enum class TreeAlgorithm { exact, hist };

std::string to_string(TreeAlgorithm a);
TreeAlgorithm parse_tree_algorithm(std::string_view s);

struct TrainConfig {
    int n_estimators = 100;
    double learning_rate = 0.1;
    int max_depth = 6;
    TreeAlgorithm tree_algorithm = TreeAlgorithm::exact;
    double lambda = 1.0;
    int n_bins = 256;
    double min_child_weight = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

// Internal nodes route x <= threshold to the left child.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0;
    int left = -1, right = -1;
    double weight = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const double> row) const;
    int depth() const;
    std::size_t leaves() const;
    bool operator==(const Tree&) const = default;
};

struct GbdtModel {
    std::vector<Tree> trees;
    double learning_rate = 0.1;
    double base_margin = 0.0;
    std::vector<std::string> feature_names;
    TrainConfig config;

    std::size_t n_features() const { return feature_names.size(); }
};

// Quantile bins. Values v with edges[k-1] <= v < edges[k] fall in bin k.
struct BinnedFeatures {
    std::vector<std::vector<double>> edges;  // per feature, ascending lower bounds of bins 1..
    std::vector<std::vector<double>> lower;  // per feature and bin: smallest value seen
    std::vector<std::vector<double>> upper;  // per feature and bin: largest value seen
    std::vector<std::uint32_t> bins;         // n x p, row-major
    std::size_t rows = 0, cols = 0;

    std::uint32_t bin(std::size_t r, std::size_t c) const { return bins[r * cols + c]; }
    std::size_t n_bins(std::size_t c) const { return lower[c].size(); }
};

// n_bins <= 0 gives one bin per distinct value.
BinnedFeatures bin_features(const Matrix& X, int n_bins);

double sigmoid(double margin);

GbdtModel fit(const Matrix& X, const std::vector<int>& y, const TrainConfig& config,
              std::vector<std::string> names = {});

double predict_margin(const GbdtModel& model, std::span<const double> row);
double predict_proba(const GbdtModel& model, std::span<const double> row);
std::vector<double> predict_proba(const GbdtModel& model, const Matrix& X);

double log_loss(const std::vector<double>& p, const std::vector<int>& y);

// Standalone JSON object with the TrainConfig fields, as embedded in model files.
std::string config_to_json(const TrainConfig& config);
TrainConfig config_from_json(std::string_view text);

std::string save_model(const GbdtModel& model);
GbdtModel load_model(std::string_view text);

}  // namespace wrist
