#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wrist/matrix.hpp"

namespace wrist {

struct PcaModel {
    std::vector<double> means;
    std::vector<double> stds;
    Matrix components;  // k x p, rows ordered by decreasing eigenvalue
    std::vector<double> eigenvalues;
    std::vector<double> explained_variance_ratio;
    std::vector<std::string> warnings;

    std::size_t n_components() const { return components.rows; }
};

struct EigenResult {
    std::vector<double> values;  // descending
    Matrix vectors;              // row i is the eigenvector of values[i]
    int sweeps = 0;
};

// Cyclic Jacobi on a symmetric matrix; stops once every off-diagonal entry is below tol.
EigenResult jacobi_eigen(Matrix a, double tol = 1e-12, int max_sweeps = 100);

// Standardizes columns (population std), diagonalizes the covariance and keeps
// the first k components (k = 0 keeps all).
PcaModel fit_pca(const Matrix& X, std::size_t k = 0);

Matrix transform(const PcaModel& model, const Matrix& rows);

struct Loading {
    std::size_t component;
    std::size_t feature;
    std::string name;
    double value;
};

// Feature with the largest |loading| per component; ties go to the lower index.
std::vector<Loading> loading_report(const PcaModel& model, std::size_t k,
                                    const std::vector<std::string>& names);

}  // namespace wrist
