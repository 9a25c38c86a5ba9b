#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "farmakit/basis.hpp"

namespace farmakit {

/// Bounded linear operator on the basis-truncated space. Entry (l,k) of `mat`
/// is the coordinate of the image of the k-th basis function on the l-th, so
/// application is a plain matrix-vector product.
struct KernelOperator {
    Eigen::MatrixXd mat;
    BasisPtr basis;

    FunctionSample apply(const FunctionSample& x) const;
};

KernelOperator make_operator(Eigen::MatrixXd mat, BasisPtr basis);

/// Operator norm (largest singular value) of the coordinate matrix.
double op_norm(const Eigen::MatrixXd& mat);
double op_norm(const KernelOperator& a);

/// Hilbert-Schmidt (Frobenius) norm; always >= the operator norm.
double hs_norm(const KernelOperator& a);

/// Block operator on the p-fold product space, stored dense with an accessor
/// for the K x K blocks.
struct StackedOperator {
    int p = 0;
    int block_size = 0;
    Eigen::MatrixXd dense;
    BasisPtr basis;

    Eigen::Block<const Eigen::MatrixXd> block(int i, int j) const {
        return dense.block(i * block_size, j * block_size, block_size, block_size);
    }
};

/// Companion form of an ARMA recursion on the product space: `phi_tilde` has
/// the autoregressive operators across its first block row and identities on
/// the sub-diagonal; each lifted moving-average operator sits alone in the
/// top-left block.
struct StateSpaceLift {
    StackedOperator phi_tilde;
    std::vector<StackedOperator> theta_tildes;
};

StateSpaceLift state_space_lift(const std::vector<KernelOperator>& phis,
                                const std::vector<KernelOperator>& thetas);

/// Smallest j0 <= j_max with ||A^j0|| < 1, if any. Existence certifies
/// geometric decay of the power norms and hence a unique stationary causal
/// solution of the associated recursion.
std::optional<int> check_contraction(const Eigen::MatrixXd& mat, int j_max = 64);
std::optional<int> check_contraction(const KernelOperator& a, int j_max = 64);
std::optional<int> check_contraction(const StackedOperator& a, int j_max = 64);

}  // namespace farmakit
