#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "farmakit/basis.hpp"
#include "farmakit/rng.hpp"
#include "oracles.hpp"

using namespace farmakit;

namespace {

FunctionSample unit(const BasisPtr& basis, int k, double scale = 1.0) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(basis->size());
    c[k] = scale;
    return {c, basis};
}

}  // namespace

TEST_CASE("gram matrix is the identity") {
    BasisPtr basis = BasisSpec::fourier(31, 1440);
    Eigen::MatrixXd g = basis->gram();
    CHECK((g - Eigen::MatrixXd::Identity(31, 31)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("inner product of basis vectors") {
    BasisPtr basis = BasisSpec::fourier(7, 64);
    CHECK(inner_product(unit(basis, 0), unit(basis, 0)) == 1.0);
    CHECK(inner_product(unit(basis, 1), unit(basis, 2)) == 0.0);
}

TEST_CASE("inner product rejects mismatched bases") {
    BasisPtr a = BasisSpec::fourier(5, 64);
    BasisPtr b = BasisSpec::fourier(7, 64);
    CHECK_THROWS_AS(inner_product(unit(a, 0), unit(b, 0)), std::invalid_argument);
}

TEST_CASE("inner product of smoothed curves matches quadrature") {
    BasisPtr basis = BasisSpec::fourier(11, 10000);
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(10000);
    Eigen::VectorXd ramp(10000);
    for (int j = 0; j < 10000; ++j) ramp[j] = j / 10000.0;
    FunctionSample f = smooth_to_basis(ones, basis);
    FunctionSample g = smooth_to_basis(ramp, basis);
    double expected = oracles::trapezoid([](double t) { return t; }, 0.0, 1.0, 10000);
    CHECK(std::abs(inner_product(f, g) - expected) < 1e-3);
    CHECK(std::abs(inner_product(f, g) - 0.5) < 1e-3);
}

TEST_CASE("smoothing a constant recovers the constant coefficient") {
    BasisPtr basis = BasisSpec::fourier(9, 200);
    FunctionSample f = smooth_to_basis(Eigen::VectorXd::Constant(200, 5.0), basis);
    CHECK(std::abs(f.coeffs[0] - 5.0) < 1e-10);
    CHECK(f.coeffs.tail(8).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("smoothing recovers a pure basis function") {
    BasisPtr basis = BasisSpec::fourier(11, 1440);
    Eigen::VectorXd raw(1440);
    for (int j = 0; j < 1440; ++j) raw[j] = std::sqrt(2.0) * std::sin(2.0 * M_PI * (j / 1440.0));
    FunctionSample f = smooth_to_basis(raw, basis);
    Eigen::VectorXd e2 = Eigen::VectorXd::Zero(11);
    e2[1] = 1.0;
    CHECK((f.coeffs - e2).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("smoothing matches the dense normal-equations oracle") {
    BasisPtr basis = BasisSpec::fourier(9, 240);
    Rng rng(42);
    Eigen::VectorXd raw(240);
    for (int j = 0; j < 240; ++j) {
        double t = j / 240.0;
        raw[j] = std::sin(2 * M_PI * t) + 0.3 * std::cos(4 * M_PI * t) + 0.05 * rng.gauss();
    }
    FunctionSample f = smooth_to_basis(raw, basis);
    Eigen::VectorXd expected = oracles::normal_equations(basis->design(), raw);
    CHECK((f.coeffs - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("residual is orthogonal to the design") {
    BasisPtr basis = BasisSpec::fourier(7, 120);
    Rng rng(3);
    Eigen::VectorXd raw(120);
    for (int j = 0; j < 120; ++j) raw[j] = rng.gauss();
    FunctionSample f = smooth_to_basis(raw, basis);
    Eigen::VectorXd residual = raw - basis->design() * f.coeffs;
    CHECK((basis->design().transpose() * residual).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rank-deficient design names K and the grid size") {
    BasisPtr basis = BasisSpec::fourier(11, 5);
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(5);
    try {
        smooth_to_basis(raw, basis);
        FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        CHECK(msg.find("K=11") != std::string::npos);
        CHECK(msg.find("5") != std::string::npos);
    }
}

TEST_CASE("rejects non-finite raw data") {
    BasisPtr basis = BasisSpec::fourier(5, 50);
    Eigen::VectorXd raw = Eigen::VectorXd::Zero(50);
    raw[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(smooth_to_basis(raw, basis), std::invalid_argument);
}

TEST_CASE("pointwise evaluation") {
    BasisPtr basis = BasisSpec::fourier(9, 64);
    CHECK(unit(basis, 0).eval(0.3) == 1.0);
    CHECK(unit(basis, 1).eval(0.0) == 0.0);  // sine vanishes at zero
    CHECK_THROWS_AS(unit(basis, 0).eval(1.5), std::domain_error);

    Rng rng(9);
    Eigen::VectorXd c(9);
    for (int k = 0; k < 9; ++k) c[k] = rng.gauss();
    FunctionSample f{c, basis};
    double direct = 0.0;
    for (int k = 0; k < 9; ++k) direct += c[k] * basis->eval(k, 0.37);
    CHECK(std::abs(f.eval(0.37) - direct) < 1e-12);
}

TEST_CASE("norm satisfies the coordinate identity exactly") {
    BasisPtr basis = BasisSpec::fourier(13, 64);
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd c(13);
        for (int k = 0; k < 13; ++k) c[k] = rng.gauss();
        FunctionSample f{c, basis};
        CHECK(inner_product(f, f) == f.coeffs.dot(f.coeffs));
    }
}

TEST_CASE("smoothing is idempotent on its own output") {
    BasisPtr basis = BasisSpec::fourier(9, 300);
    Rng rng(5);
    Eigen::VectorXd raw(300);
    for (int j = 0; j < 300; ++j) raw[j] = rng.gauss();
    FunctionSample once = smooth_to_basis(raw, basis);
    FunctionSample twice = smooth_to_basis(basis->design() * once.coeffs, basis);
    CHECK((once.coeffs - twice.coeffs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("exact combinations are reproduced at the grid") {
    BasisPtr basis = BasisSpec::fourier(7, 150);
    Rng rng(8);
    Eigen::VectorXd c(7);
    for (int k = 0; k < 7; ++k) c[k] = rng.gauss();
    Eigen::VectorXd raw = basis->design() * c;
    FunctionSample f = smooth_to_basis(raw, basis);
    for (int j = 0; j < 150; ++j)
        CHECK(std::abs(f.eval(basis->grid()[j]) - raw[j]) < 1e-9);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(BasisSpec::fourier(0, 64), std::invalid_argument);
    CHECK_THROWS_AS(BasisSpec::fourier(5, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(BasisSpec::fourier(5, std::vector<double>{0.0, 0.5, 0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(BasisSpec::fourier(5, std::vector<double>{0.0, 0.5, 1.2}),
                    std::invalid_argument);
    // a custom strictly increasing grid is fine
    BasisPtr custom = BasisSpec::fourier(3, std::vector<double>{0.0, 0.25, 0.5, 0.75, 0.9});
    CHECK(custom->design().rows() == 5);
}

TEST_CASE("series rows share the basis") {
    BasisPtr basis = BasisSpec::fourier(5, 50);
    Rng rng(1);
    Eigen::MatrixXd raw(4, 50);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 50; ++j) raw(i, j) = rng.gauss();
    FunctionSeries series = smooth_series(raw, basis, 10);
    CHECK(series.length() == 4);
    CHECK(series.start == 10);
    CHECK(series.row_of(12) == 2);
    CHECK(series.sample(1).basis == basis);
}
