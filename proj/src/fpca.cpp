#include "farmakit/fpca.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "farmakit/kernels.hpp"

namespace farmakit {

FunctionSample EigenSystem::eigenfunction(int j) const {
    if (j < 0 || j >= count()) throw std::out_of_range("eigenfunction index out of range");
    return {vectors.col(j), basis};
}

KernelOperator estimate_covariance(const FunctionSeries& series, bool unbiased) {
    const int n = series.length();
    if (n < 2) throw std::invalid_argument("covariance estimation needs at least 2 samples");
    double divisor = unbiased ? n - 1.0 : static_cast<double>(n);
    Eigen::MatrixXd c = kernels::scatter_matrix(series.coeffs, divisor);
    // Accumulated outer products are symmetric up to rounding; make it exact.
    c = ((c + c.transpose()) / 2.0).eval();
    return {std::move(c), series.basis};
}

EigenSystem eigendecompose(const KernelOperator& cov, double symmetry_tol) {
    const Eigen::MatrixXd& m = cov.mat;
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > symmetry_tol * scale)
        throw std::invalid_argument("eigendecompose: operator is not symmetric within tolerance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((m + m.transpose()) / 2.0);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");

    const int k = static_cast<int>(m.rows());
    EigenSystem out;
    out.basis = cov.basis;
    out.values.resize(k);
    out.vectors.resize(k, k);
    // Eigen returns ascending order; reverse for nonincreasing eigenvalues.
    for (int j = 0; j < k; ++j) {
        out.values[j] = std::max(0.0, solver.eigenvalues()(k - 1 - j));
        Eigen::VectorXd v = solver.eigenvectors().col(k - 1 - j);
        int arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

ScoreSeries compute_scores(const FunctionSeries& series, const EigenPtr& eig, int d) {
    if (!eig) throw std::invalid_argument("compute_scores: missing eigensystem");
    if (d < 1 || d > eig->count())
        throw std::invalid_argument("compute_scores: d out of range");
    if (series.basis != eig->basis && !series.basis->compatible(*eig->basis))
        throw std::invalid_argument("compute_scores: series and eigensystem bases differ");
    ScoreSeries out;
    out.scores = kernels::project_rows(series.coeffs, eig->vectors.leftCols(d));
    out.eig = eig;
    out.d = d;
    out.start = series.start;
    return out;
}

int cpv_select(const Eigen::VectorXd& values, double threshold) {
    if (values.size() == 0) throw std::invalid_argument("cpv_select: empty spectrum");
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("cpv_select: threshold must lie in (0,1]");
    for (Eigen::Index j = 1; j < values.size(); ++j)
        if (values[j] > values[j - 1] + 1e-12 * std::max(1.0, values[0]))
            throw std::invalid_argument("cpv_select: eigenvalues must be nonincreasing");
    double total = values.sum();
    if (!(total > 0.0)) throw std::invalid_argument("cpv_select: all-zero spectrum");
    double acc = 0.0;
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        acc += values[j];
        if (acc / total >= threshold) return static_cast<int>(j) + 1;
    }
    return static_cast<int>(values.size());
}

FunctionSample karhunen_loeve_truncate(const FunctionSample& x, const EigenSystem& eig, int d) {
    if (d < 1 || d > eig.count())
        throw std::invalid_argument("karhunen_loeve_truncate: d out of range");
    const auto v = eig.vectors.leftCols(d);
    return {v * (v.transpose() * x.coeffs), x.basis};
}

}  // namespace farmakit
