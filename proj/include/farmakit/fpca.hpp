#pragma once

#include <Eigen/Core>
#include <memory>

#include "farmakit/basis.hpp"
#include "farmakit/operators.hpp"

namespace farmakit {

/// Eigenpairs of a covariance operator: nonincreasing nonnegative eigenvalues
/// and orthonormal eigenfunction coordinates (one column per eigenfunction).
struct EigenSystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // K x m
    BasisPtr basis;

    int count() const { return static_cast<int>(values.size()); }
    FunctionSample eigenfunction(int j) const;
};

using EigenPtr = std::shared_ptr<const EigenSystem>;

/// Projection coefficients of a series on the leading d eigenfunctions;
/// row n holds the scores of the sample with time label `start + n`.
struct ScoreSeries {
    Eigen::MatrixXd scores;  // N x d
    EigenPtr eig;
    int d = 0;
    int start = 0;

    int length() const { return static_cast<int>(scores.rows()); }
};

/// Empirical covariance operator of a mean-corrected series. Divides by N by
/// default (the mean is treated as known); pass unbiased=true for N-1.
KernelOperator estimate_covariance(const FunctionSeries& series, bool unbiased = false);

/// Full eigendecomposition of a symmetric PSD operator. Eigenvalues are
/// clipped at zero and sorted nonincreasing; each eigenfunction's sign is
/// fixed by making its largest-magnitude coordinate positive.
EigenSystem eigendecompose(const KernelOperator& cov, double symmetry_tol = 1e-9);

ScoreSeries compute_scores(const FunctionSeries& series, const EigenPtr& eig, int d);

/// Smallest d whose cumulative share of total variance reaches the threshold.
int cpv_select(const Eigen::VectorXd& values, double threshold);

/// Projection of a sample on the span of the leading d eigenfunctions.
FunctionSample karhunen_loeve_truncate(const FunctionSample& x, const EigenSystem& eig, int d);

}  // namespace farmakit
