#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>

#include "farmakit/basis.hpp"
#include "farmakit/kernels.hpp"
#include "farmakit/rng.hpp"

using namespace farmakit;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss();
    return m;
}

}  // namespace

TEST_CASE("parallel scatter matches the serial reference") {
    Eigen::MatrixXd rows = random_matrix(501, 13, 4);
    Eigen::MatrixXd serial = kernels::serial::scatter_matrix(rows, 501.0);
    Eigen::MatrixXd parallel = kernels::scatter_matrix(rows, 501.0);
    double scale = serial.cwiseAbs().maxCoeff();
    CHECK((serial - parallel).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("parallel projection is bitwise identical to the serial reference") {
    Eigen::MatrixXd rows = random_matrix(317, 13, 5);
    Eigen::MatrixXd cols = random_matrix(13, 4, 6);
    Eigen::MatrixXd serial = kernels::serial::project_rows(rows, cols);
    Eigen::MatrixXd parallel = kernels::project_rows(rows, cols);
    CHECK((serial - parallel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("batch smoothing equals per-row smoothing") {
    BasisPtr basis = BasisSpec::fourier(9, 120);
    Eigen::MatrixXd raw = random_matrix(37, 120, 7);
    Smoother smoother(basis);
    FunctionSeries batch = smoother.smooth_rows(raw);
    for (int i = 0; i < 37; ++i) {
        Eigen::VectorXd row = smoother.smooth(raw.row(i).transpose()).coeffs;
        CHECK((batch.coeffs.row(i).transpose() - row).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("thread budget honours the environment cap") {
    setenv("FARMAKIT_THREADS", "1", 1);
    CHECK(kernels::thread_budget() == 1);
    unsetenv("FARMAKIT_THREADS");
    CHECK(kernels::thread_budget() >= 1);
}

TEST_CASE("kernels agree under a thread cap") {
    Eigen::MatrixXd rows = random_matrix(200, 8, 9);
    Eigen::MatrixXd wide = kernels::scatter_matrix(rows, 200.0);
    setenv("FARMAKIT_THREADS", "1", 1);
    Eigen::MatrixXd narrow = kernels::scatter_matrix(rows, 200.0);
    unsetenv("FARMAKIT_THREADS");
    CHECK((wide - narrow).cwiseAbs().maxCoeff() < 1e-12 * wide.cwiseAbs().maxCoeff());
}
