#pragma once

#include <Eigen/Core>
#include <vector>

#include "farmakit/fpca.hpp"

namespace farmakit {

/// Vector ARMA(p,q) model on score space.
struct VarmaModel {
    int d = 0;
    int p = 0;
    int q = 0;
    std::vector<Eigen::MatrixXd> Phi;
    std::vector<Eigen::MatrixXd> Theta;
    Eigen::MatrixXd Sigma;
    double spectral_radius = 0.0;  // of the AR companion matrix
    bool stationary = true;
};

struct CompanionCheck {
    bool stationary = true;
    double radius = 0.0;
};

/// Spectral radius of the dp x dp companion matrix of the AR operators.
CompanionCheck companion_stationary(const std::vector<Eigen::MatrixXd>& phi);

/// Biased sample autocovariances C_h = (1/N) sum_n X_{n+h} X_n^T, h = 0..max_lag.
std::vector<Eigen::MatrixXd> sample_autocov(const Eigen::MatrixXd& scores, int max_lag);
std::vector<Eigen::MatrixXd> sample_autocov(const ScoreSeries& scores, int max_lag);

/// Fit by multivariate Yule-Walker for pure AR orders, otherwise by
/// Hannan-Rissanen (long autoregression for residual proxies, then least
/// squares on lagged values and residuals). A nonstationary fit is flagged,
/// not rejected. About 10*d*(p+q) observations are recommended; shorter
/// series are accepted as long as the regressions stay feasible.
VarmaModel fit_varma(const Eigen::MatrixXd& scores, int p, int q);
VarmaModel fit_varma(const ScoreSeries& scores, int p, int q);

/// Autocovariances of the fitted model from its truncated moving-average
/// expansion. Requires a stationary model.
std::vector<Eigen::MatrixXd> implied_autocov(const VarmaModel& model, int max_lag);

/// Linear predictor of the observation h steps past the sample, expressed as
/// one coefficient matrix per observed vector.
struct PredictorWeights {
    int h = 1;
    std::vector<Eigen::MatrixXd> weights;  // weights[i] applies to observation row i
    Eigen::MatrixXd mse;

    Eigen::VectorXd apply(const Eigen::MatrixXd& observations) const;
};

struct Prediction {
    Eigen::VectorXd value;
    PredictorWeights weights;
};

/// Best linear predictor with respect to the given autocovariance sequence,
/// by the multivariate innovations recursion. Steps beyond one are obtained
/// by iterating the recursion with future innovations set to zero. Requires
/// autocovariances up to lag n+h-1 and a positive definite lag-0 matrix.
Prediction innovations_predict(const std::vector<Eigen::MatrixXd>& autocov,
                               const Eigen::MatrixXd& observations, int h);

/// Same contract as innovations_predict, by the Whittle multivariate
/// Durbin-Levinson recursion (forward and backward coefficient sets).
Prediction durbin_levinson_predict(const std::vector<Eigen::MatrixXd>& autocov,
                                   const Eigen::MatrixXd& observations, int h);

/// Direct solve of the stacked normal equations; the oracle the recursive
/// algorithms are checked against.
Eigen::VectorXd brute_force_blp(const std::vector<Eigen::MatrixXd>& autocov,
                                const Eigen::MatrixXd& observations, int h);
Prediction brute_force_blp_weights(const std::vector<Eigen::MatrixXd>& autocov,
                                   const Eigen::MatrixXd& observations, int h);

/// Largest normal-equation residual norm of the weights, relative to the
/// lag-0 autocovariance norm. Near zero for a true projection.
double orthogonality_residual(const PredictorWeights& w,
                              const std::vector<Eigen::MatrixXd>& autocov);

/// Prediction error covariance implied by a weight set and autocovariances.
Eigen::MatrixXd mse_from_weights(const std::vector<Eigen::MatrixXd>& weights, int h,
                                 const std::vector<Eigen::MatrixXd>& autocov);

}  // namespace farmakit
