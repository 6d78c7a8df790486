#include "wrist/select.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "wrist/eval.hpp"
#include "wrist/rng.hpp"

namespace wrist {

void SplitSpec::validate() const {
    if (!(train > 0 && val > 0 && test > 0)) throw DomainError("split ratios must all be positive");
    if (std::abs(train + val + test - 1.0) > 1e-12) throw DomainError("split ratios must sum to 1");
}

SplitIndices split_indices(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n == 0) throw DomainError("split: empty dataset");
    auto perm = permutation(n, derive_seed(spec.seed, 0x73706c6974ULL));
    // the small bias absorbs products like 0.6 * 5 = 2.9999999999999996
    auto cut = [n](double r) { return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9)); };
    std::size_t n_train = cut(spec.train), n_val = cut(spec.val);
    SplitIndices s;
    s.train.assign(perm.begin(), perm.begin() + n_train);
    s.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    s.test.assign(perm.begin() + n_train + n_val, perm.end());
    return s;
}

DatasetSplit split_dataset(const Dataset& dataset, const SplitSpec& spec) {
    if (dataset.count(0) == 0 || dataset.count(1) == 0)
        throw DomainError("split: need at least one sample per class");
    DatasetSplit out;
    out.indices = split_indices(dataset.size(), spec);
    out.train = dataset.subset(out.indices.train);
    out.val = dataset.subset(out.indices.val);
    out.test = dataset.subset(out.indices.test);
    return out;
}

std::vector<Fold> kfold(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw DomainError("kfold: k must be at least 2");
    if (k > n) throw DomainError("kfold: k exceeds sample count");
    auto perm = permutation(n, derive_seed(seed, 0x6b666f6c64ULL));
    std::vector<Fold> folds(k);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        std::size_t size = n / k + (f < n % k ? 1 : 0);
        folds[f].held_out.assign(perm.begin() + pos, perm.begin() + pos + size);
        pos += size;
    }
    for (std::size_t f = 0; f < k; ++f)
        for (std::size_t g = 0; g < k; ++g)
            if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].held_out.begin(), folds[g].held_out.end());
    return folds;
}

std::vector<TrainConfig> make_grid(const GridAxes& axes, std::uint64_t seed) {
    std::vector<TrainConfig> grid;
    for (int n : axes.n_estimators)
        for (auto algo : axes.tree_algorithm)
            for (int depth : axes.max_depth)
                for (double lr : axes.learning_rate) {
                    TrainConfig c;
                    c.n_estimators = n;
                    c.tree_algorithm = algo;
                    c.max_depth = depth;
                    c.learning_rate = lr;
                    c.seed = derive_seed(seed, grid.size());
                    c.validate();
                    grid.push_back(c);
                }
    return grid;
}

std::vector<TrainConfig> default_grid() { return make_grid(GridAxes{}); }

TrainConfig baseline_config() {
    TrainConfig c;
    c.n_estimators = 100;
    c.learning_rate = 0.1;
    c.max_depth = 6;
    c.tree_algorithm = TreeAlgorithm::exact;
    return c;
}

namespace {

// Configs that differ only in n_estimators share one boosting run: the first m
// trees of a longer run are exactly the m-tree model, so each member is scored
// from a prefix of the per-row tree sums.
struct Family {
    TrainConfig longest;
    std::vector<std::size_t> members;  // grid indices
};

std::vector<Family> families(const std::vector<TrainConfig>& grid) {
    std::vector<Family> out;
    std::map<std::tuple<int, int, double, double, int, double>, std::size_t> index;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& c = grid[i];
        auto key = std::make_tuple(static_cast<int>(c.tree_algorithm), c.max_depth, c.learning_rate, c.lambda,
                                   c.n_bins, c.min_child_weight);
        auto it = index.find(key);
        if (it == index.end()) {
            index.emplace(key, out.size());
            out.push_back({c, {i}});
        } else {
            auto& fam = out[it->second];
            fam.members.push_back(i);
            if (c.n_estimators > fam.longest.n_estimators) fam.longest = c;
        }
    }
    return out;
}

// AUROC of every member model, scored on X.
std::vector<double> member_aurocs(const GbdtModel& model, const Matrix& X, const std::vector<int>& y,
                                  const std::vector<int>& sizes) {
    std::vector<std::vector<double>> scores(sizes.size(), std::vector<double>(X.rows));
    for (std::size_t r = 0; r < X.rows; ++r) {
        auto row = X.row(r);
        double sum = 0;
        std::size_t t = 0;
        for (std::size_t m = 0; m < sizes.size(); ++m) {
            for (; t < static_cast<std::size_t>(sizes[m]); ++t) sum += model.trees[t].predict(row);
            scores[m][r] = sigmoid(model.base_margin + model.learning_rate * sum);
        }
    }
    bool has0 = false, has1 = false;
    for (int v : y) (v == 1 ? has1 : has0) = true;
    std::vector<double> out;
    for (auto& s : scores)
        out.push_back(has0 && has1 ? auroc(s, y) : std::numeric_limits<double>::quiet_NaN());
    return out;
}

}  // namespace

GridResult grid_search(const Matrix& X_train, const std::vector<int>& y_train, const Matrix& X_val,
                       const std::vector<int>& y_val, const std::vector<TrainConfig>& grid, std::size_t k,
                       std::uint64_t seed, const GridProgress& progress) {
    if (grid.empty()) throw DomainError("grid_search: empty grid");
    auto folds = kfold(X_train.rows, k, seed);
    GridResult result;
    result.rows.resize(grid.size());
    std::size_t done = 0;
    for (const auto& fam : families(grid)) {
        // members sorted by size so prefix sums run forward
        std::vector<std::size_t> members = fam.members;
        std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            return grid[a].n_estimators < grid[b].n_estimators;
        });
        std::vector<int> sizes;
        for (auto m : members) sizes.push_back(grid[m].n_estimators);

        try {
            for (const auto& fold : folds) {
                std::vector<int> ytr, yho;
                for (auto i : fold.train) ytr.push_back(y_train[i]);
                for (auto i : fold.held_out) yho.push_back(y_train[i]);
                auto model = fit(X_train.select_rows(fold.train), ytr, fam.longest);
                auto a = member_aurocs(model, X_train.select_rows(fold.held_out), yho, sizes);
                for (std::size_t m = 0; m < members.size(); ++m) result.rows[members[m]].fold_auroc.push_back(a[m]);
            }
            auto model = fit(X_train, y_train, fam.longest);
            auto a = member_aurocs(model, X_val, y_val, sizes);
            for (std::size_t m = 0; m < members.size(); ++m) result.rows[members[m]].val_auroc = a[m];
        } catch (const Error& e) {
            const auto& c = fam.longest;
            throw TrainingError("grid config (" + to_string(c.tree_algorithm) + ", depth " +
                                std::to_string(c.max_depth) + ", lr " + format_double(c.learning_rate) +
                                "): " + e.what());
        }
        for (auto m : members) {
            auto& row = result.rows[m];
            row.config = grid[m];
            double sum = 0;
            int count = 0;
            for (double a : row.fold_auroc)
                if (!std::isnan(a)) {
                    sum += a;
                    ++count;
                }
            row.mean_cv_auroc = count ? sum / count : std::numeric_limits<double>::quiet_NaN();
        }
        done += members.size();
        if (progress) progress(done, grid.size());
    }
    for (std::size_t i = 1; i < result.rows.size(); ++i)
        if (result.rows[i].val_auroc > result.rows[result.best].val_auroc) result.best = i;
    return result;
}

GbdtModel retrain_final(const Matrix& X, const std::vector<int>& y, const TrainConfig& config) {
    return fit(X, y, config);
}

}  // namespace wrist
