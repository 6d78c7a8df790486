#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "wrist/features.hpp"
#include "wrist/pca.hpp"
#include "wrist/rng.hpp"

using namespace wrist;

namespace {

Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    Matrix X(n, p);
    // mixed scales and some correlation so the spectrum is not flat
    for (std::size_t i = 0; i < n; ++i) {
        double common = rng.normal();
        for (std::size_t j = 0; j < p; ++j)
            X(i, j) = (rng.normal() + 0.3 * static_cast<double>(j % 4) * common) * std::pow(10.0, double(j % 5) - 2);
    }
    return X;
}

// Eigen reference: eigenvalues of the standardized covariance, descending.
Eigen::VectorXd reference_spectrum(const Matrix& X) {
    Eigen::MatrixXd m(X.rows, X.cols);
    for (std::size_t i = 0; i < X.rows; ++i)
        for (std::size_t j = 0; j < X.cols; ++j) m(i, j) = X(i, j);
    Eigen::RowVectorXd mean = m.colwise().mean();
    Eigen::MatrixXd c = m.rowwise() - mean;
    Eigen::RowVectorXd sd = (c.array().square().colwise().sum() / double(X.rows)).sqrt();
    Eigen::MatrixXd z = c.array().rowwise() / sd.array();
    Eigen::MatrixXd cov = z.transpose() * z / double(X.rows);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd v = es.eigenvalues().reverse();
    return v;
}

}  // namespace

TEST_CASE("jacobi on a small symmetric matrix") {
    Matrix a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = a(1, 0) = 1;
    a(1, 1) = 2;
    auto r = jacobi_eigen(a);
    CHECK(r.values[0] == doctest::Approx(3));
    CHECK(r.values[1] == doctest::Approx(1));
    CHECK(std::fabs(std::fabs(r.vectors(0, 0)) - std::sqrt(0.5)) < 1e-12);
    CHECK_THROWS_AS(jacobi_eigen(Matrix(2, 3)), DomainError);
}

TEST_CASE("eigenvalues agree with a reference solver") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Matrix X = random_matrix(80, 31, seed);
        auto m = fit_pca(X);
        auto ref = reference_spectrum(X);
        for (int k = 0; k < 31; ++k) CHECK(m.eigenvalues[k] == doctest::Approx(std::max(ref(k), 0.0)).epsilon(1e-9).scale(1));
    }
}

TEST_CASE("components are orthonormal and ratios well formed") {
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        Matrix X = random_matrix(60, 31, seed);
        auto m = fit_pca(X);
        REQUIRE(m.components.rows == 31);
        for (std::size_t a = 0; a < 31; ++a)
            for (std::size_t b = 0; b < 31; ++b) {
                double dot = 0;
                for (std::size_t j = 0; j < 31; ++j) dot += m.components(a, j) * m.components(b, j);
                CHECK(std::fabs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
            }
        double sum = 0;
        for (std::size_t k = 0; k < 31; ++k) {
            CHECK(m.explained_variance_ratio[k] >= 0);
            if (k) CHECK(m.explained_variance_ratio[k] <= m.explained_variance_ratio[k - 1]);
            sum += m.explained_variance_ratio[k];
        }
        CHECK(std::fabs(sum - 1) < 1e-9);
    }
}

TEST_CASE("correlated pair recovers the 0.75 / 0.25 split") {
    // covariance [[2,1],[1,2]] through its Cholesky factor
    Rng rng(2024);
    Matrix X(10000, 2);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double z1 = rng.normal(), z2 = rng.normal();
        X(i, 0) = std::sqrt(2.0) * z1;
        X(i, 1) = z1 / std::sqrt(2.0) + std::sqrt(1.5) * z2;
    }
    auto m = fit_pca(X);
    CHECK(std::fabs(m.explained_variance_ratio[0] - 0.75) < 0.02);
    CHECK(std::fabs(m.explained_variance_ratio[1] - 0.25) < 0.02);
}

TEST_CASE("each component's largest loading is positive") {
    auto m = fit_pca(random_matrix(50, 6, 3));
    for (std::size_t c = 0; c < m.components.rows; ++c) {
        double big = 0;
        for (std::size_t j = 0; j < 6; ++j)
            if (std::fabs(m.components(c, j)) > std::fabs(big)) big = m.components(c, j);
        CHECK(big > 0);
    }
}

TEST_CASE("transform projects the standardized rows") {
    Matrix X = random_matrix(30, 5, 8);
    auto m = fit_pca(X, 2);
    CHECK(m.n_components() == 2);
    auto P = transform(m, X);
    REQUIRE(P.cols == 2);
    // projected columns are centered with variance equal to the eigenvalue
    for (std::size_t c = 0; c < 2; ++c) {
        double s = 0, q = 0;
        for (std::size_t i = 0; i < 30; ++i) {
            s += P(i, c);
            q += P(i, c) * P(i, c);
        }
        CHECK(std::fabs(s / 30) < 1e-12);
        CHECK(q / 30 == doctest::Approx(m.eigenvalues[c]));
    }
    CHECK_THROWS_AS(transform(m, Matrix(2, 4)), DomainError);
}

TEST_CASE("zero-variance column is flagged and kept finite") {
    Matrix X = random_matrix(20, 31, 4);
    for (std::size_t i = 0; i < 20; ++i) X(i, 5) = 3.0;
    auto m = fit_pca(X);
    REQUIRE(m.warnings.size() == 1);
    CHECK(m.warnings[0].find("ay_max") != std::string::npos);
    for (double v : m.components.data) CHECK(std::isfinite(v));
    CHECK_THROWS_AS(fit_pca(Matrix(1, 3)), DomainError);
}

TEST_CASE("loading report names the dominant feature") {
    PcaModel m;
    m.components = Matrix(2, 3);
    m.components(0, 0) = 0.1;
    m.components(0, 1) = -0.9;
    m.components(0, 2) = 0.4;
    m.components(1, 0) = 0.6;
    m.components(1, 1) = 0.6;
    m.components(1, 2) = -0.5;
    auto r = loading_report(m, 2, {"a", "b", "c"});
    CHECK(r[0].name == "b");
    CHECK(r[0].value == -0.9);
    CHECK(r[1].name == "a");  // tie goes to the lower index
    CHECK_THROWS_AS(loading_report(m, 3, {"a", "b", "c"}), DomainError);
    CHECK_THROWS_AS(loading_report(m, 1, {"a"}), DomainError);
}
