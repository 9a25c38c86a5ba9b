#include "farmakit/forecast.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "farmakit/kernels.hpp"
#include "farmakit/rng.hpp"

namespace farmakit {

const ErrorRow* ErrorTable::best() const {
    const ErrorRow* pick = nullptr;
    for (const ErrorRow& row : rows) {
        if (row.failed) continue;
        if (pick == nullptr) {
            pick = &row;
            continue;
        }
        auto key = [](const ErrorRow& r) { return std::make_tuple(r.rmse, r.p + r.q, r.d); };
        if (key(row) < key(*pick)) pick = &row;
    }
    return pick;
}

Prediction predict_scores(const Eigen::MatrixXd& scores,
                          const std::vector<Eigen::MatrixXd>& autocov, int h) {
    if (autocov.empty()) throw std::invalid_argument("predict_scores: empty autocovariances");
    const int d = static_cast<int>(scores.cols());
    const int n = static_cast<int>(scores.rows());
    if (autocov[0].trace() <= 0.0) {
        // Degenerate process: the best linear predictor is identically zero.
        Prediction out;
        out.value = Eigen::VectorXd::Zero(d);
        out.weights.h = h;
        out.weights.weights.assign(n, Eigen::MatrixXd::Zero(d, d));
        out.weights.mse = autocov[0];
        return out;
    }
    return innovations_predict(autocov, scores, h);
}

std::vector<Eigen::MatrixXd> structured_autocov(const Eigen::MatrixXd& scores, int p, int q,
                                                int max_lag, VarmaModel* fitted) {
    VarmaModel fit = fit_varma(scores, p, q);
    std::vector<Eigen::MatrixXd> out;
    if (q == 0) {
        // Pure AR: sample autocovariances up to lag p extended by the fitted
        // recursion. The extension of the (positive semidefinite) sample
        // block stays a valid covariance structure.
        out = sample_autocov(scores, std::min<int>(p, static_cast<int>(scores.rows()) - 1));
        const int d = static_cast<int>(scores.cols());
        while (static_cast<int>(out.size()) <= max_lag) {
            const int hlag = static_cast<int>(out.size());
            Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
            for (int i = 1; i <= p; ++i) g.noalias() += fit.Phi[i - 1] * out[hlag - i];
            out.push_back(std::move(g));
        }
    } else {
        // With a moving-average part, truncating the sample sequence at lag q
        // need not be a covariance structure at all (the sample dependence
        // can exceed what an MA(q) admits), which derails the prediction
        // recursions; the fitted model's implied autocovariances are the
        // second moments of a realizable process and stay valid.
        if (!fit.stationary)
            throw std::runtime_error("structured_autocov: fitted AR part is not stationary");
        out = implied_autocov(fit, max_lag);
    }
    if (fitted != nullptr) *fitted = fit;
    return out;
}

Prediction cell_predict(const Eigen::MatrixXd& scores, int p, int q, int h, VarmaModel* fitted) {
    const int d = static_cast<int>(scores.cols());
    const int n = static_cast<int>(scores.rows());
    if (scores.squaredNorm() == 0.0) {
        Prediction out;
        out.value = Eigen::VectorXd::Zero(d);
        out.weights.h = h;
        out.weights.weights.assign(n, Eigen::MatrixXd::Zero(d, d));
        out.weights.mse = Eigen::MatrixXd::Zero(d, d);
        if (fitted != nullptr) *fitted = VarmaModel{d, p, q, {}, {}, Eigen::MatrixXd::Zero(d, d)};
        return out;
    }
    VarmaModel fit;
    std::vector<Eigen::MatrixXd> autocov = structured_autocov(scores, p, q, n + h - 1, &fit);
    if (!fit.stationary)
        throw std::runtime_error("cell_predict: fitted AR part is not stationary (radius " +
                                 std::to_string(fit.spectral_radius) + ")");
    if (fitted != nullptr) *fitted = fit;
    return predict_scores(scores, autocov, h);
}

FunctionSample fpca_predict(const FunctionSeries& series, const EigenPtr& eig, int d, int p, int q,
                          int h) {
    ScoreSeries s = compute_scores(series, eig, d);
    Prediction pred = cell_predict(s.scores, p, q, h);
    return {eig->vectors.leftCols(d) * pred.value, series.basis};
}

FunctionSample functional_blp_far(const FarmaModel& model, const FunctionSeries& series, int h) {
    if (model.q() != 0 || h != 1)
        throw std::invalid_argument(
            "functional_blp_far: closed form available only for pure AR models at horizon 1");
    const int n = series.length();
    if (n < model.p()) throw std::invalid_argument("functional_blp_far: series shorter than p");
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(model.dim());
    for (int j = 1; j <= model.p(); ++j)
        coeffs.noalias() += model.phis()[j - 1].mat * series.coeffs.row(n - j).transpose();
    return {std::move(coeffs), series.basis};
}

namespace {

void require_far1(const FarmaModel& model, const EigenSystem& eig, int d, int n, int h) {
    if (model.p() != 1 || model.q() != 0 || h != 1)
        throw std::invalid_argument("prediction bound implemented for first-order AR, horizon 1");
    if (n < 1) throw std::invalid_argument("prediction bound needs n >= 1");
    if (eig.count() != model.dim())
        throw std::invalid_argument("prediction bound needs a full eigensystem");
    if (d < 1 || d > model.dim()) throw std::invalid_argument("prediction bound: d out of range");
}

}  // namespace

double truncation_error_bound(const FarmaModel& model, const EigenSystem& eig, int d, int n, int h) {
    require_far1(model, eig, d, n, h);
    const int k = model.dim();
    double tail = 0.0;
    double g_sq = 0.0;
    for (int l = d; l < k; ++l) {
        tail += eig.values[l];
        g_sq += (model.phis()[0].mat * eig.vectors.col(l)).squaredNorm();
    }
    return tail * (4.0 * std::sqrt(g_sq) + 1.0);
}

double truncation_error_bound_operator(const FarmaModel& model, const EigenSystem& eig, int d, int n, int h) {
    require_far1(model, eig, d, n, h);
    const int k = model.dim();
    double tail = 0.0;
    double root_sum = 0.0;
    for (int l = d; l < k; ++l) {
        tail += eig.values[l];
        root_sum += std::sqrt(eig.values[l]);
    }
    double nrm = op_norm(model.phis()[0]);
    return 4.0 * nrm * nrm * root_sum * root_sum + tail;
}

std::pair<double, double> error_metrics(const FunctionSeries& actual,
                                        const FunctionSeries& predicted, bool pointwise_mae) {
    const int n = actual.length();
    if (n != predicted.length() || n < 1)
        throw std::invalid_argument("error_metrics: series lengths differ or are empty");
    if (actual.basis != predicted.basis && !actual.basis->compatible(*predicted.basis))
        throw std::invalid_argument("error_metrics: series live in different bases");

    double sq = 0.0;
    double abs_acc = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd diff = actual.coeffs.row(i) - predicted.coeffs.row(i);
        sq += diff.squaredNorm();
        FunctionSample ds{diff, actual.basis};
        if (pointwise_mae) {
            const std::vector<double>& grid = actual.basis->grid();
            double acc = 0.0;
            for (double t : grid) acc += std::abs(ds.eval(t));
            abs_acc += acc / static_cast<double>(grid.size());
        } else {
            abs_acc += integrate_abs(ds);
        }
    }
    return {std::sqrt(sq / n), abs_acc / n};
}

ErrorTable rolling_cv(const FunctionSeries& series, const ForecastConfig& config,
                      const EigenPtr& frozen) {
    if (config.holdout < 1) throw std::invalid_argument("rolling_cv: holdout must be >= 1");
    if (config.order_grid.empty()) throw std::invalid_argument("rolling_cv: empty order grid");
    const int n = series.length();
    const int h = config.horizon;
    if (h < 1) throw std::invalid_argument("rolling_cv: horizon must be >= 1");
    if (config.holdout >= n) throw std::invalid_argument("rolling_cv: holdout exceeds the series");

    ErrorTable table;
    table.holdout = config.holdout;

    struct Cell {
        int d = 0, p = 0, q = 0;
        double sq = 0.0;
        double abs_acc = 0.0;
        bool failed = false;
        std::string message;
    };
    std::vector<Cell> cells;
    std::vector<int> d_grid = config.d_grid;

    // With a frozen basis (given or requested) the eigensystem is computed
    // once from the first training window instead of per step.
    EigenPtr fixed = frozen;

    for (int step = 0; step < config.holdout; ++step) {
        const int target = n - config.holdout + step;
        const int train_len = target - h + 1;
        if (train_len < 3) throw std::invalid_argument("rolling_cv: not enough samples to train");

        Eigen::MatrixXd train = series.coeffs.topRows(train_len);
        Eigen::RowVectorXd mean = train.colwise().mean();
        FunctionSeries centered{train.rowwise() - mean, series.basis, series.start};

        EigenPtr eig = fixed;
        if (!eig) {
            eig = std::make_shared<EigenSystem>(eigendecompose(estimate_covariance(centered)));
            if (config.freeze_eigenbasis) fixed = eig;
        }

        if (d_grid.empty())
            d_grid.push_back(cpv_select(eig->values, config.cpv_threshold));
        if (cells.empty()) {
            for (int d : d_grid)
                for (auto [p, q] : config.order_grid) {
                    Cell cell;
                    cell.d = d;
                    cell.p = p;
                    cell.q = q;
                    cells.push_back(std::move(cell));
                }
        }

        // Scores per dimension are shared by all order cells of that d.
        std::vector<Eigen::MatrixXd> scores_by_d;
        for (int d : d_grid)
            scores_by_d.push_back(compute_scores(centered, eig, d).scores);

        const int nt = std::min<int>(kernels::thread_budget(), static_cast<int>(cells.size()));
#pragma omp parallel for schedule(dynamic) num_threads(nt)
        for (std::size_t c = 0; c < cells.size(); ++c) {
            Cell& cell = cells[c];
            if (cell.failed) continue;
            const std::size_t d_index = c / config.order_grid.size();
            try {
                Prediction pred = cell_predict(scores_by_d[d_index], cell.p, cell.q, h);
                Eigen::VectorXd coeffs =
                    eig->vectors.leftCols(cell.d) * pred.value + mean.transpose();
                Eigen::VectorXd diff = series.coeffs.row(target).transpose() - coeffs;
                cell.sq += diff.squaredNorm();
                FunctionSample ds{diff, series.basis};
                if (config.pointwise_mae) {
                    const std::vector<double>& grid = series.basis->grid();
                    double acc = 0.0;
                    for (double t : grid) acc += std::abs(ds.eval(t));
                    cell.abs_acc += acc / static_cast<double>(grid.size());
                } else {
                    cell.abs_acc += integrate_abs(ds);
                }
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.message = e.what();
            }
        }
    }

    for (const Cell& cell : cells) {
        ErrorRow row;
        row.d = cell.d;
        row.p = cell.p;
        row.q = cell.q;
        row.failed = cell.failed;
        row.message = cell.message;
        if (cell.failed) {
            row.rmse = std::numeric_limits<double>::quiet_NaN();
            row.mae = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.rmse = std::sqrt(cell.sq / config.holdout);
            row.mae = cell.abs_acc / config.holdout;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<BoundReport> bound_experiment(const FarmaModel& model, const std::vector<int>& d_grid,
                                          int n, int reps, std::uint64_t seed) {
    if (reps < 2) throw std::invalid_argument("bound_experiment: needs at least 2 replicates");
    if (model.p() != 1 || model.q() != 0)
        throw std::invalid_argument("bound_experiment: model must be first-order AR");
    const int k = model.dim();

    KernelOperator cov = stationary_covariance(model);
    auto eig = std::make_shared<EigenSystem>(eigendecompose(cov));
    const Eigen::MatrixXd& v = eig->vectors;

    // Exact autocovariances of the full score process: phi^h C_X rotated
    // into the eigenbasis; each d uses the leading block.
    std::vector<Eigen::MatrixXd> full;
    Eigen::MatrixXd power = Eigen::MatrixXd::Identity(k, k);
    for (int lag = 0; lag <= n; ++lag) {
        full.push_back(v.transpose() * power * cov.mat * v);
        power = model.phis()[0].mat * power;
    }

    std::vector<PredictorWeights> weights;
    for (int d : d_grid) {
        if (d < 1 || d > k) throw std::invalid_argument("bound_experiment: d out of range");
        std::vector<Eigen::MatrixXd> trimmed;
        for (const Eigen::MatrixXd& g : full) trimmed.push_back(g.topLeftCorner(d, d));
        weights.push_back(
            innovations_predict(trimmed, Eigen::MatrixXd::Zero(n, d), 1).weights);
    }

    const int nd = static_cast<int>(d_grid.size());
    Eigen::MatrixXd errors(reps, nd);
    const int nt = std::min(kernels::thread_budget(), reps);
#pragma omp parallel for schedule(dynamic) num_threads(nt)
    for (int rep = 0; rep < reps; ++rep) {
        SimulationResult sim = simulate(model, n + 1, 200, Rng::stream(seed, rep));
        Eigen::MatrixXd scores = sim.series.coeffs * v;
        for (int j = 0; j < nd; ++j) {
            const int d = d_grid[j];
            Eigen::VectorXd pred = weights[j].apply(scores.topRows(n).leftCols(d));
            Eigen::VectorXd hat = v.leftCols(d) * pred;
            errors(rep, j) = (sim.series.coeffs.row(n).transpose() - hat).squaredNorm();
        }
    }

    std::vector<BoundReport> out;
    for (int j = 0; j < nd; ++j) {
        BoundReport report;
        report.d = d_grid[j];
        report.sigma2 = model.noise_variance();
        report.gamma = truncation_error_bound(model, *eig, d_grid[j], n, 1);
        report.empirical_mse = errors.col(j).mean();
        double var = (errors.col(j).array() - report.empirical_mse).square().sum() / (reps - 1);
        report.std_error = std::sqrt(var / reps);
        for (int l = d_grid[j]; l < k; ++l) report.tail_eigen_sum += eig->values[l];
        double g_sq = 0.0;
        for (int l = d_grid[j]; l < k; ++l)
            g_sq += (model.phis()[0].mat * v.col(l)).squaredNorm();
        report.g_norms.push_back(std::sqrt(g_sq));
        out.push_back(std::move(report));
    }
    return out;
}

}  // namespace farmakit
