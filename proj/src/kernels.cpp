#include "farmakit/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace farmakit::kernels {

int thread_budget() {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("FARMAKIT_THREADS")) {
        int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return std::max(1, n);
}

namespace serial {

Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& rows, double divisor) {
    const Eigen::Index k = rows.cols();
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        acc.noalias() += rows.row(i).transpose() * rows.row(i);
    return acc / divisor;
}

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& columns) {
    Eigen::MatrixXd out(rows.rows(), columns.cols());
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
        out.row(i).noalias() = rows.row(i) * columns;
    return out;
}

}  // namespace serial

Eigen::MatrixXd scatter_matrix(const Eigen::MatrixXd& rows, double divisor) {
    const Eigen::Index k = rows.cols();
    const Eigen::Index n = rows.rows();
    const int nt = std::min<Eigen::Index>(thread_budget(), std::max<Eigen::Index>(1, n));
    std::vector<Eigen::MatrixXd> partial(nt, Eigen::MatrixXd::Zero(k, k));
#pragma omp parallel num_threads(nt)
    {
        Eigen::MatrixXd& acc = partial[omp_get_thread_num()];
#pragma omp for schedule(static)
        for (Eigen::Index i = 0; i < n; ++i)
            acc.noalias() += rows.row(i).transpose() * rows.row(i);
    }
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
    for (const Eigen::MatrixXd& p : partial) out += p;
    return out / divisor;
}

Eigen::MatrixXd project_rows(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& columns) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd out(n, columns.cols());
    const int nt = std::min<Eigen::Index>(thread_budget(), std::max<Eigen::Index>(1, n));
#pragma omp parallel for schedule(static) num_threads(nt)
    for (Eigen::Index i = 0; i < n; ++i)
        out.row(i).noalias() = rows.row(i) * columns;
    return out;
}

}  // namespace farmakit::kernels
