#pragma once

#include <Eigen/Core>

namespace farmakit::kernels {

/// Number of threads the parallel kernels may use: the OpenMP default capped
/// by the FARMAKIT_THREADS environment variable when set.
int thread_budget();

// Serial reference implementations. These stay deliberately plain and are the
// ground truth the OpenMP kernels are tested against.
namespace serial {

/// (1/divisor) * sum_n rows.row(n)^T rows.row(n).
Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& rows, double divisor);

/// rows * columns, one output row per input row.
Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& columns);

}  // namespace serial

/// Parallel scatter-matrix accumulation. Partial sums are reduced in thread
/// order, so results are deterministic for a fixed thread budget.
Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& rows, double divisor);

/// Parallel row-block matrix product; rows are independent, so the result is
/// bitwise identical to the serial kernel.
Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& columns);

}  // namespace farmakit::kernels
