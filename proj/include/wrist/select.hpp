#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wrist/core.hpp"
#include "wrist/gbdt.hpp"

namespace wrist {

struct SplitSpec {
    double train = 0.6, val = 0.2, test = 0.2;
    std::uint64_t seed = 42;

    void validate() const;
};

struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};

// Seeded permutation cut at floor(n*train) and floor(n*val); the rest is test.
SplitIndices split_indices(std::size_t n, const SplitSpec& spec);

struct DatasetSplit {
    Dataset train, val, test;
    SplitIndices indices;
};

DatasetSplit split_dataset(const Dataset& dataset, const SplitSpec& spec);

struct Fold {
    std::vector<std::size_t> train, held_out;
};

// The first n % k folds get one extra sample.
std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed);

struct GridAxes {
    std::vector<int> n_estimators{1000, 2000, 3000, 4000, 5000};
    std::vector<TreeAlgorithm> tree_algorithm{TreeAlgorithm::hist, TreeAlgorithm::exact};
    std::vector<int> max_depth{1, 2, 3, 4, 5, 6, 7, 8};
    std::vector<double> learning_rate{0.1, 0.3, 0.5};
};

std::vector<TrainConfig> make_grid(const GridAxes& axes, std::uint64_t seed = 0);
std::vector<TrainConfig> default_grid();

// Reference run outside the grid: 100 trees, lr 0.1, depth 6, exact.
TrainConfig baseline_config();

struct GridRow {
    TrainConfig config;
    std::vector<double> fold_auroc;  // NaN for a fold holding out a single class
    double mean_cv_auroc = 0;
    double val_auroc = 0;
};

struct GridResult {
    std::vector<GridRow> rows;
    std::size_t best = 0;

    const TrainConfig& best_config() const { return rows.at(best).config; }
};

using GridProgress = std::function<void(std::size_t done, std::size_t total)>;

// Best = highest validation AUROC, first in grid order on ties.
GridResult grid_search(const Matrix& X_train, const std::vector<int>& y_train, const Matrix& X_val,
                       const std::vector<int>& y_val, const std::vector<TrainConfig>& grid, std::size_t k,
                       std::uint64_t seed, const GridProgress& progress = {});

GbdtModel retrain_final(const Matrix& X, const std::vector<int>& y, const TrainConfig& config);

}  // namespace wrist
