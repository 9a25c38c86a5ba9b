// Benchmark of the OpenMP kernels against their serial reference
// implementations: scatter accumulation, score projection, batch smoothing
// and the Monte Carlo bound experiment.

#include <omp.h>

#include <cstdio>
#include <functional>
#include <string>

#include "farmakit/basis.hpp"
#include "farmakit/forecast.hpp"
#include "farmakit/kernels.hpp"
#include "farmakit/rng.hpp"

using namespace farmakit;

namespace {

double time_of(const std::function<void()>& fn, int repeats) {
    fn();  // warm up
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void report(const std::string& name, double serial, double parallel) {
    std::printf("%-28s serial %9.4f s   openmp %9.4f s   speedup %5.2fx\n", name.c_str(), serial,
                parallel, serial / parallel);
}

Eigen::MatrixXd random_matrix(int rows, int cols, Rng& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss();
    return m;
}

}  // namespace

int main() {
    std::printf("thread budget: %d\n", kernels::thread_budget());
    Rng rng(7);

    {
        Eigen::MatrixXd rows = random_matrix(120000, 64, rng);
        double s = time_of([&] { kernels::serial::scatter_matrix(rows, rows.rows()); }, 3);
        double p = time_of([&] { kernels::scatter_matrix(rows, rows.rows()); }, 3);
        report("scatter 120000x64", s, p);
    }

    {
        Eigen::MatrixXd rows = random_matrix(200000, 64, rng);
        Eigen::MatrixXd cols = random_matrix(64, 8, rng);
        double s = time_of([&] { kernels::serial::project_rows(rows, cols); }, 3);
        double p = time_of([&] { kernels::project_rows(rows, cols); }, 3);
        report("project 200000x64 -> 8", s, p);
    }

    {
        BasisPtr basis = BasisSpec::fourier(31, 1440);
        Eigen::MatrixXd raw = random_matrix(2000, 1440, rng);
        Smoother smoother(basis);
        double s = time_of(
            [&] {
                for (int i = 0; i < raw.rows(); ++i) smoother.smooth(raw.row(i).transpose());
            },
            3);
        double p = time_of([&] { smoother.smooth_rows(raw); }, 3);
        report("smooth 2000 days K=31", s, p);
    }

    {
        const int k = 8;
        BasisPtr basis = BasisSpec::fourier(k, 96);
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(k, k);
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            phi(i, i) = 0.7 * std::pow(0.85, i);
            cov(i, i) = std::pow(0.6, i);
        }
        FarmaModel model({make_operator(phi, basis)}, {}, make_operator(cov, basis));
        std::vector<int> grid{1, 2, 4, 6};
        // The replicate loop parallelises; FARMAKIT_THREADS=1 forces it serial.
        double p = time_of([&] { bound_experiment(model, grid, 50, 400, 11); }, 2);
        std::printf("%-28s openmp %9.4f s (set FARMAKIT_THREADS=1 to compare serial)\n",
                    "bound experiment 400 reps", p);
    }

    return 0;
}
