#include "wrist/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wrist/core.hpp"
#include "wrist/features.hpp"

namespace wrist {

EigenResult jacobi_eigen(Matrix a, double tol, int max_sweeps) {
    const std::size_t n = a.rows;
    if (a.cols != n) throw DomainError("jacobi_eigen: matrix is not square");
    Matrix v(n, n);
    for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

    auto max_off = [&] {
        double m = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) m = std::max(m, std::abs(a(p, q)));
        return m;
    };

    int sweep = 0;
    while (max_off() >= tol) {
        if (sweep == max_sweeps) throw DomainError("jacobi_eigen: no convergence");
        ++sweep;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rutishauser's stable rotation
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
    EigenResult r;
    r.sweeps = sweep;
    r.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        r.values.push_back(a(order[i], order[i]));
        for (std::size_t k = 0; k < n; ++k) r.vectors(i, k) = v(k, order[i]);
    }
    return r;
}

PcaModel fit_pca(const Matrix& X, std::size_t k) {
    const std::size_t n = X.rows, p = X.cols;
    if (n < 2) throw DomainError("fit_pca: need at least 2 rows");
    if (p == 0) throw DomainError("fit_pca: no columns");
    if (k == 0 || k > p) k = p;
    const auto& canonical = feature_names();

    PcaModel m;
    m.means.assign(p, 0.0);
    m.stds.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double sum = 0;
        for (std::size_t i = 0; i < n; ++i) sum += X(i, j);
        double mean = sum / n;
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) ss += (X(i, j) - mean) * (X(i, j) - mean);
        double sd = std::sqrt(ss / n);
        if (!(sd > 0)) {
            std::string name = p == canonical.size() ? canonical[j] : "column " + std::to_string(j);
            m.warnings.push_back(name + " has zero variance; std set to 1");
            sd = 1.0;
        }
        m.means[j] = mean;
        m.stds[j] = sd;
    }

    Matrix z(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) z(i, j) = (X(i, j) - m.means[j]) / m.stds[j];
    Matrix cov(p, p);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            double s = 0;
            for (std::size_t i = 0; i < n; ++i) s += z(i, a) * z(i, b);
            cov(a, b) = cov(b, a) = s / n;
        }

    auto eig = jacobi_eigen(cov);
    double total = 0;
    for (double& l : eig.values) {
        l = std::max(l, 0.0);  // round-off on rank-deficient input
        total += l;
    }

    m.components = Matrix(k, p);
    for (std::size_t c = 0; c < k; ++c) {
        auto row = eig.vectors.row(c);
        std::size_t big = 0;
        for (std::size_t j = 1; j < p; ++j)
            if (std::abs(row[j]) > std::abs(row[big])) big = j;
        double sign = row[big] < 0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < p; ++j) m.components(c, j) = sign * row[j];
        m.eigenvalues.push_back(eig.values[c]);
        m.explained_variance_ratio.push_back(total > 0 ? eig.values[c] / total : 0.0);
    }
    return m;
}

Matrix transform(const PcaModel& model, const Matrix& rows) {
    const std::size_t p = model.means.size();
    if (rows.cols != p)
        throw DomainError("transform: expected " + std::to_string(p) + " columns, got " +
                          std::to_string(rows.cols));
    const std::size_t k = model.components.rows;
    Matrix out(rows.rows, k);
    std::vector<double> z(p);
    for (std::size_t i = 0; i < rows.rows; ++i) {
        for (std::size_t j = 0; j < p; ++j) z[j] = (rows(i, j) - model.means[j]) / model.stds[j];
        for (std::size_t c = 0; c < k; ++c) {
            double s = 0;
            for (std::size_t j = 0; j < p; ++j) s += z[j] * model.components(c, j);
            out(i, c) = s;
        }
    }
    return out;
}

std::vector<Loading> loading_report(const PcaModel& model, std::size_t k,
                                    const std::vector<std::string>& names) {
    if (k > model.components.rows)
        throw DomainError("loading_report: asked for " + std::to_string(k) + " components, model has " +
                          std::to_string(model.components.rows));
    if (names.size() != model.components.cols) throw DomainError("loading_report: name count mismatch");
    std::vector<Loading> out;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < model.components.cols; ++j)
            if (std::abs(model.components(c, j)) > std::abs(model.components(c, best))) best = j;
        out.push_back({c, best, names[best], model.components(c, best)});
    }
    return out;
}

}  // namespace wrist
