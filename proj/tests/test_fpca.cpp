#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "farmakit/fpca.hpp"
#include "farmakit/rng.hpp"

using namespace farmakit;

namespace {

BasisPtr basis(int k) { return BasisSpec::fourier(k, 64); }

// Independent draws with a diagonal covariance in basis coordinates.
FunctionSeries gaussian_series(const BasisPtr& b, const Eigen::VectorXd& variances, int n,
                               std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd coeffs(n, b->size());
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < b->size(); ++k)
            coeffs(i, k) = std::sqrt(variances[k]) * rng.gauss();
    return {coeffs, b, 0};
}

}  // namespace

TEST_CASE("covariance of a two-point sample") {
    BasisPtr b = basis(4);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(2, 4);
    coeffs(0, 0) = 1.0;
    coeffs(1, 0) = -1.0;
    KernelOperator c = estimate_covariance({coeffs, b, 0});
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(4, 4);
    expected(0, 0) = 1.0;
    CHECK((c.mat - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariance of the zero series is zero") {
    BasisPtr b = basis(3);
    KernelOperator c = estimate_covariance({Eigen::MatrixXd::Zero(5, 3), b, 0});
    CHECK(c.mat.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("covariance estimation needs two samples") {
    BasisPtr b = basis(3);
    CHECK_THROWS_AS(estimate_covariance({Eigen::MatrixXd::Zero(1, 3), b, 0}),
                    std::invalid_argument);
}

TEST_CASE("unbiased divisor is configurable") {
    BasisPtr b = basis(2);
    Eigen::MatrixXd coeffs(2, 2);
    coeffs << 1, 0, -1, 0;
    CHECK(estimate_covariance({coeffs, b, 0}).mat(0, 0) == doctest::Approx(1.0));
    CHECK(estimate_covariance({coeffs, b, 0}, true).mat(0, 0) == doctest::Approx(2.0));
}

TEST_CASE("empirical eigenvalues approach the generator variances") {
    BasisPtr b = basis(3);
    Eigen::VectorXd variances(3);
    variances << 4.0, 1.0, 0.25;
    FunctionSeries series = gaussian_series(b, variances, 500, 2024);
    EigenSystem eig = eigendecompose(estimate_covariance(series));
    for (int j = 0; j < 3; ++j)
        CHECK(std::abs(eig.values[j] - variances[j]) < 0.15 * variances[j]);
}

TEST_CASE("eigendecomposition of a diagonal operator") {
    BasisPtr b = basis(3);
    Eigen::VectorXd diag(3);
    diag << 3, 2, 1;
    EigenSystem eig = eigendecompose({Eigen::MatrixXd(diag.asDiagonal()), b});
    CHECK(eig.values[0] == doctest::Approx(3.0));
    CHECK(eig.values[1] == doctest::Approx(2.0));
    CHECK(eig.values[2] == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e[j] = 1.0;  // sign convention picks the positive direction
        CHECK((eig.vectors.col(j) - e).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("eigendecomposition of the zero operator") {
    BasisPtr b = basis(4);
    EigenSystem eig = eigendecompose({Eigen::MatrixXd::Zero(4, 4), b});
    CHECK(eig.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigendecomposition reconstructs the operator") {
    BasisPtr b = basis(6);
    Rng rng(5);
    Eigen::MatrixXd m(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = rng.gauss();
    Eigen::MatrixXd psd = m * m.transpose();
    EigenSystem eig = eigendecompose({psd, b});
    Eigen::MatrixXd rebuilt =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((psd - rebuilt).norm() < 1e-9);
    // eigenvalue sum carries the whole trace
    CHECK(std::abs(eig.values.sum() - psd.trace()) < 1e-9);
    // eigenfunctions are orthonormal
    Eigen::MatrixXd gram = eig.vectors.transpose() * eig.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("asymmetric operators are rejected") {
    BasisPtr b = basis(3);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(eigendecompose({m, b}), std::invalid_argument);
}

TEST_CASE("scores of an explicit combination") {
    BasisPtr b = basis(4);
    Eigen::VectorXd diag(4);
    diag << 4, 3, 2, 1;
    auto eig = std::make_shared<EigenSystem>(
        eigendecompose({Eigen::MatrixXd(diag.asDiagonal()), b}));

    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(2, 4);
    coeffs(0, 0) = 2.0;   // 2 nu_1
    coeffs(0, 1) = 3.0;   // + 3 nu_2
    coeffs(1, 3) = 5.0;   // orthogonal to the leading pair
    ScoreSeries scores = compute_scores({coeffs, b, 0}, eig, 2);
    CHECK(scores.scores(0, 0) == doctest::Approx(2.0));
    CHECK(scores.scores(0, 1) == doctest::Approx(3.0));
    CHECK(scores.scores.row(1).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(compute_scores({coeffs, b, 0}, eig, 5), std::invalid_argument);
}

TEST_CASE("truncation error equals the tail score norm") {
    BasisPtr b = basis(6);
    Rng rng(12);
    Eigen::MatrixXd m(6, 6);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) m(i, j) = rng.gauss();
    auto eig = std::make_shared<EigenSystem>(eigendecompose({m * m.transpose(), b}));

    Eigen::VectorXd c(6);
    for (int k = 0; k < 6; ++k) c[k] = rng.gauss();
    FunctionSample x{c, b};
    for (int d = 1; d <= 6; ++d) {
        FunctionSample trunc = karhunen_loeve_truncate(x, *eig, d);
        double err_sq = (x.coeffs - trunc.coeffs).squaredNorm();
        double tail_sq = 0.0;
        for (int l = d; l < 6; ++l) {
            double score = eig->vectors.col(l).dot(c);
            tail_sq += score * score;
        }
        CHECK(std::abs(err_sq - tail_sq) < 1e-10);
    }

    FunctionSample full = karhunen_loeve_truncate(x, *eig, 6);
    CHECK((full.coeffs - c).cwiseAbs().maxCoeff() < 1e-12);

    FunctionSample nu4 = eig->eigenfunction(3);
    FunctionSample killed = karhunen_loeve_truncate(nu4, *eig, 3);
    CHECK(killed.coeffs.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cumulative variance selection") {
    Eigen::VectorXd values(4);
    values << 4, 3, 2, 1;
    CHECK(cpv_select(values, 0.8) == 3);  // 9/10 at d=3
    CHECK(cpv_select(values, 1.0) == 4);

    Eigen::VectorXd spike(3);
    spike << 1, 0, 0;
    CHECK(cpv_select(spike, 0.2) == 1);
    CHECK(cpv_select(spike, 0.999) == 1);

    CHECK_THROWS_AS(cpv_select(Eigen::VectorXd::Zero(3), 0.5), std::invalid_argument);

    // monotone: a higher threshold never selects a smaller dimension
    Rng rng(3);
    Eigen::VectorXd lam(8);
    for (int i = 0; i < 8; ++i) lam[i] = std::pow(0.6, i);
    int prev = 1;
    for (double threshold : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
        int d = cpv_select(lam, threshold);
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("scores of independent draws decorrelate with the generator variances") {
    const int k = 11;
    BasisPtr b = BasisSpec::fourier(k, 64);
    Eigen::VectorXd variances(k);
    for (int j = 0; j < k; ++j) variances[j] = std::pow(0.7, j);
    FunctionSeries series = gaussian_series(b, variances, 2000, 99);

    // Scores against the known eigenfunctions of the generator.
    EigenSystem truth;
    truth.basis = b;
    truth.values = variances;
    truth.vectors = Eigen::MatrixXd::Identity(k, k);
    auto eig = std::make_shared<EigenSystem>(truth);
    ScoreSeries scores = compute_scores(series, eig, k);

    Eigen::RowVectorXd mean = scores.scores.colwise().mean();
    Eigen::MatrixXd centered = scores.scores.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / 2000.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            double corr = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
            CHECK(std::abs(corr) < 0.07);
        }
    for (int j = 0; j < k; ++j)
        if (variances[j] >= 0.1 * variances[0])
            CHECK(std::abs(cov(j, j) - variances[j]) < 0.1 * variances[j]);

    // Against the empirical eigenbasis the score covariance is diagonal by
    // construction and the eigenvalue sum carries the mean squared norm.
    EigenSystem emp = eigendecompose(estimate_covariance(series));
    double mean_sq = series.coeffs.rowwise().squaredNorm().mean();
    CHECK(std::abs(emp.values.sum() - mean_sq) < 1e-9 * mean_sq);
}
