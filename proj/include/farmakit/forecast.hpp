#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "farmakit/farma.hpp"
#include "farmakit/varma.hpp"

namespace farmakit {

/// Cross-validation design: dimension grid, order grid, horizon and the
/// number of final observations held out for evaluation. An empty dimension
/// grid falls back to the cumulative-variance choice at `cpv_threshold`.
struct ForecastConfig {
    std::vector<int> d_grid;
    std::vector<std::pair<int, int>> order_grid;
    int horizon = 1;
    int holdout = 10;
    double cpv_threshold = 0.8;
    bool freeze_eigenbasis = false;
    bool pointwise_mae = false;
};

struct ErrorRow {
    int d = 0;
    int p = 0;
    int q = 0;
    double rmse = 0.0;
    double mae = 0.0;
    bool failed = false;
    std::string message;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;
    int holdout = 0;

    /// Smallest RMSE; ties resolved toward the more parsimonious model
    /// (smaller p+q, then smaller d). Null when every cell failed.
    const ErrorRow* best() const;
};

struct BoundReport {
    int d = 0;
    double sigma2 = 0.0;
    double gamma = 0.0;
    double empirical_mse = 0.0;
    double tail_eigen_sum = 0.0;
    double std_error = 0.0;
    std::vector<double> g_norms;
};

/// Best linear prediction of the next score vector with respect to the given
/// autocovariances. A zero lag-0 matrix short-circuits to the zero predictor.
Prediction predict_scores(const Eigen::MatrixXd& scores,
                          const std::vector<Eigen::MatrixXd>& autocov, int h);

/// Autocovariance sequence used for prediction in an (p,q) cell. Pure AR
/// cells take the sample autocovariances up to lag p extended by the fitted
/// recursion (method of moments); cells with a moving-average part use the
/// fitted model's implied autocovariances, which are always a valid
/// covariance structure. The fit is exposed for diagnostics.
std::vector<Eigen::MatrixXd> structured_autocov(const Eigen::MatrixXd& scores, int p, int q,
                                                int max_lag, VarmaModel* fitted = nullptr);

/// Score-space prediction for one (p,q) cell, including the degenerate
/// all-zero bypass. Throws when the fitted AR part is not stationary.
Prediction cell_predict(const Eigen::MatrixXd& scores, int p, int q, int h,
                        VarmaModel* fitted = nullptr);

/// Score prediction pipeline: project on the leading d eigenfunctions,
/// predict the score vector h steps ahead, and re-transform through the
/// truncated expansion. The series must be mean-corrected.
FunctionSample fpca_predict(const FunctionSeries& series, const EigenPtr& eig, int d, int p, int q,
                          int h);

/// Exact one-step functional best linear predictor of a pure AR model:
/// the AR operators applied to the last p samples.
FunctionSample functional_blp_far(const FarmaModel& model, const FunctionSeries& series,
                                  int h = 1);

/// Dimension-reduction part of the one-step prediction error bound for a
/// first-order AR model with Hilbert-Schmidt operator:
/// sum_{l>d} lambda_l * (4 g + 1) with g = (sum_{l>d} ||phi nu_l||^2)^{1/2}.
double truncation_error_bound(const FarmaModel& model, const EigenSystem& eig, int d, int n, int h = 1);

/// Operator-norm variant of the same bound:
/// 4 ||phi||^2 (sum_{l>d} sqrt(lambda_l))^2 + sum_{l>d} lambda_l.
double truncation_error_bound_operator(const FarmaModel& model, const EigenSystem& eig, int d, int n,
                            int h = 1);

/// RMSE of the L2 prediction errors and mean integrated absolute error over
/// paired samples. `pointwise_mae` switches the MAE quadrature to a plain
/// grid average.
std::pair<double, double> error_metrics(const FunctionSeries& actual,
                                        const FunctionSeries& predicted,
                                        bool pointwise_mae = false);

/// Rolling-origin evaluation over the last `holdout` observations for every
/// grid cell. The training window is centered and its eigenbasis
/// re-estimated at each step unless a frozen eigensystem is supplied.
/// Cells that fail to fit are recorded as failed, not fatal.
ErrorTable rolling_cv(const FunctionSeries& series, const ForecastConfig& config,
                      const EigenPtr& frozen = nullptr);

/// Monte Carlo check of the prediction-error bound for a first-order AR
/// model: per replicate, predict one step ahead from n samples using the
/// exact score autocovariances, and compare the empirical mean squared error
/// against sigma^2 + gamma for each dimension in the grid.
std::vector<BoundReport> bound_experiment(const FarmaModel& model, const std::vector<int>& d_grid,
                                          int n, int reps, std::uint64_t seed);

}  // namespace farmakit
