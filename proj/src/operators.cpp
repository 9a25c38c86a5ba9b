#include "farmakit/operators.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace farmakit {

FunctionSample KernelOperator::apply(const FunctionSample& x) const {
    if (!basis || !x.basis || (basis != x.basis && !basis->compatible(*x.basis)))
        throw std::invalid_argument("operator and sample live in different bases");
    return {mat * x.coeffs, basis};
}

KernelOperator make_operator(Eigen::MatrixXd mat, BasisPtr basis) {
    if (!basis) throw std::invalid_argument("operator needs a basis");
    if (mat.rows() != basis->size() || mat.cols() != basis->size())
        throw std::invalid_argument("operator matrix must be K x K for the basis size K");
    if (!mat.allFinite()) throw std::invalid_argument("operator matrix has non-finite entries");
    return {std::move(mat), std::move(basis)};
}

double op_norm(const Eigen::MatrixXd& mat) {
    if (mat.size() == 0) return 0.0;
    if (mat.rows() <= 64 && mat.cols() <= 64)
        return Eigen::JacobiSVD<Eigen::MatrixXd>(mat).singularValues()(0);
    return Eigen::BDCSVD<Eigen::MatrixXd>(mat).singularValues()(0);
}

double op_norm(const KernelOperator& a) { return op_norm(a.mat); }

double hs_norm(const KernelOperator& a) { return a.mat.norm(); }

StateSpaceLift state_space_lift(const std::vector<KernelOperator>& phis,
                                const std::vector<KernelOperator>& thetas) {
    if (phis.empty()) throw std::invalid_argument("state_space_lift needs at least one AR operator");
    const BasisPtr& basis = phis.front().basis;
    const int k = basis->size();
    const int p = static_cast<int>(phis.size());
    for (const KernelOperator& op : phis)
        if (op.basis != basis && !op.basis->compatible(*basis))
            throw std::invalid_argument("AR operators live in different bases");
    for (const KernelOperator& op : thetas)
        if (op.basis != basis && !op.basis->compatible(*basis))
            throw std::invalid_argument("MA operators live in different bases");

    StackedOperator phi_tilde{p, k, Eigen::MatrixXd::Zero(p * k, p * k), basis};
    for (int i = 0; i < p; ++i) phi_tilde.dense.block(0, i * k, k, k) = phis[i].mat;
    for (int i = 1; i < p; ++i)
        phi_tilde.dense.block(i * k, (i - 1) * k, k, k) = Eigen::MatrixXd::Identity(k, k);

    std::vector<StackedOperator> lifted;
    lifted.reserve(thetas.size());
    for (const KernelOperator& th : thetas) {
        StackedOperator t{p, k, Eigen::MatrixXd::Zero(p * k, p * k), basis};
        t.dense.block(0, 0, k, k) = th.mat;
        lifted.push_back(std::move(t));
    }
    return {std::move(phi_tilde), std::move(lifted)};
}

std::optional<int> check_contraction(const Eigen::MatrixXd& mat, int j_max) {
    if (j_max < 1) throw std::invalid_argument("check_contraction needs j_max >= 1");
    if (mat.rows() != mat.cols()) throw std::invalid_argument("contraction check needs a square matrix");
    Eigen::MatrixXd power = mat;
    for (int j = 1; j <= j_max; ++j) {
        double norm = op_norm(power);
        if (!std::isfinite(norm)) return std::nullopt;
        if (norm < 1.0) return j;
        if (j < j_max) power = power * mat;
    }
    return std::nullopt;
}

std::optional<int> check_contraction(const KernelOperator& a, int j_max) {
    return check_contraction(a.mat, j_max);
}

std::optional<int> check_contraction(const StackedOperator& a, int j_max) {
    return check_contraction(a.dense, j_max);
}

}  // namespace farmakit
