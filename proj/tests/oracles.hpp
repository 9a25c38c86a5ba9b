// Independent reference computations used by the tests. These deliberately
// avoid the library's own code paths: quadrature instead of coordinate
// algebra, power iteration instead of dense SVD, pivoted solves instead of
// Cholesky.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>

namespace oracles {

// Composite trapezoid rule on a uniform grid of m+1 points.
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int m) {
    double h = (b - a) / m;
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < m; ++i) acc += f(a + i * h);
    return acc * h;
}

// Largest singular value via power iteration on A^T A.
inline double power_iteration_norm(const Eigen::MatrixXd& a, int iterations = 20000) {
    Eigen::MatrixXd ata = a.transpose() * a;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(ata.rows());
    v += 0.001 * Eigen::VectorXd::LinSpaced(ata.rows(), 0.0, 1.0);  // break symmetry
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < iterations; ++i) {
        Eigen::VectorXd w = ata * v;
        lambda = v.dot(w);
        double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
    }
    return std::sqrt(std::max(0.0, lambda));
}

// Least squares through explicitly formed normal equations and a fully
// pivoted solve.
inline Eigen::VectorXd normal_equations(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
    Eigen::MatrixXd gram = design.transpose() * design;
    return Eigen::FullPivLU<Eigen::MatrixXd>(gram).solve(design.transpose() * y);
}

}  // namespace oracles
