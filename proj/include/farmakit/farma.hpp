#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <vector>

#include "farmakit/basis.hpp"
#include "farmakit/fpca.hpp"
#include "farmakit/operators.hpp"

namespace farmakit {

enum class NoiseKind { gaussian_swn };

/// Functional ARMA(p,q) model in basis coordinates:
///
///   X_n = sum_{i<=p} phi_i X_{n-i} + sum_{j<=q} theta_j eps_{n-j} + eps_n
///
/// with Gaussian strong white noise of covariance `noise_cov`. A contraction
/// certificate for the companion operator is computed at construction; it is
/// required for simulation and for the explicit causal solution.
class FarmaModel {
public:
    FarmaModel(std::vector<KernelOperator> phis, std::vector<KernelOperator> thetas,
               KernelOperator noise_cov, int contraction_search = 64);

    int p() const { return static_cast<int>(phis_.size()); }
    int q() const { return static_cast<int>(thetas_.size()); }
    int dim() const { return basis_->size(); }
    const BasisPtr& basis() const { return basis_; }

    const std::vector<KernelOperator>& phis() const { return phis_; }
    const std::vector<KernelOperator>& thetas() const { return thetas_; }
    const KernelOperator& noise_cov() const { return noise_cov_; }
    NoiseKind noise_kind() const { return NoiseKind::gaussian_swn; }

    /// Total noise variance, the trace of the noise covariance.
    double noise_variance() const { return noise_cov_.mat.trace(); }

    /// Smallest power of the companion operator with norm < 1, when found.
    std::optional<int> causality() const { return causality_; }

    /// Symmetric PSD square root of the noise covariance.
    const Eigen::MatrixXd& noise_factor() const { return noise_factor_; }

private:
    std::vector<KernelOperator> phis_;
    std::vector<KernelOperator> thetas_;
    KernelOperator noise_cov_;
    BasisPtr basis_;
    Eigen::MatrixXd noise_factor_;
    std::optional<int> causality_;
};

struct SimulationResult {
    FunctionSeries series;  // time labels 0..n-1
    FunctionSeries noise;   // time labels -burn_in..n-1, for oracle use
};

/// Run the model recursion from a zero initial state for burn_in + n steps
/// and discard the first burn_in samples. Under the contraction certificate
/// the recursion forgets the initial state geometrically; 200 warm-up steps
/// are the usual choice.
SimulationResult simulate(const FarmaModel& model, int n, int burn_in, std::uint64_t seed);

/// Explicit causal moving-average solution truncated at the given lag count,
/// driven by the provided noise. Supports p <= 1; use the state-space variant
/// for higher AR orders. Output rows cover the labels with full lag history.
FunctionSeries causal_solution(const FarmaModel& model, const FunctionSeries& noise, int lags);

/// Causal solution for arbitrary p via the companion lift on the product
/// space; the first block of the lifted solution is returned.
FunctionSeries causal_solution_state_space(const FarmaModel& model, const FunctionSeries& noise,
                                           int lags);

/// Stationary covariance operator from the truncated moving-average
/// expansion of the model.
KernelOperator stationary_covariance(const FarmaModel& model, double rel_tol = 1e-14,
                                     int max_terms = 20000);

/// Coordinate blocks of the model operators in an eigenbasis, split at
/// dimension d: the leading d x d blocks drive the approximating vector
/// model, the d x (K-d) tail blocks feed the remainder term.
struct ProjectedModel {
    int d = 0;
    std::vector<Eigen::MatrixXd> phi, phi_tail;
    std::vector<Eigen::MatrixXd> theta, theta_tail;
    Eigen::MatrixXd noise_cov;
};

ProjectedModel project_model(const FarmaModel& model, const EigenSystem& eig, int d);

/// Remainder making the projected recursion an identity:
/// score_n - sum_i Phi_i score_{n-i} - e_n - sum_j Theta_j e_{n-j}.
/// `tail_scores` / `tail_noise` hold one (K-d)-dimensional tail row per time
/// index; row n-1 and earlier must exist.
Eigen::VectorXd projection_remainder(const ProjectedModel& pm, const Eigen::MatrixXd& tail_scores,
                           const Eigen::MatrixXd& tail_noise, int n);

/// Closed-form bound on the mean squared remainder norm:
/// 2 (sum_i ||phi_i||^2 sum_{l>d} lambda_l
///    + sum_j ||theta_j||^2 sum_{l>d} <C_eps nu_l, nu_l>).
double projection_remainder_bound(const FarmaModel& model, const EigenSystem& eig, int d);

struct ExactnessReport {
    bool exact = false;
    std::vector<double> compression_norms;       // tail-tail block of each AR operator
    std::vector<double> residual_autocov_norms;  // lags q+1..q+3, when scores given
    double residual_se = 0.0;                    // Monte Carlo scale for those norms
};

/// The projected scores follow an exact vector ARMA(p,q) when every AR
/// operator maps the tail space into the leading space, i.e. all tail-tail
/// compressions vanish. With scores supplied, the report adds the sample
/// autocovariances of the AR-filtered residual beyond lag q, which should be
/// noise-level in the exact case.
ExactnessReport exactness_check(const FarmaModel& model, const EigenSystem& eig, int d,
                                const ScoreSeries* scores = nullptr);

}  // namespace farmakit
