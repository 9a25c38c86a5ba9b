#include "farmakit/varma.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <stdexcept>

namespace farmakit {

namespace {

// Lag accessor with gamma(-h) = gamma(h)^T.
struct LagCov {
    const std::vector<Eigen::MatrixXd>& g;

    Eigen::MatrixXd operator()(long h) const {
        if (h >= 0) return g[static_cast<std::size_t>(h)];
        return g[static_cast<std::size_t>(-h)].transpose();
    }
};

// Right-division A V^{-1} for symmetric PSD V, with a tiny ridge retry when
// the factorization is merely near-singular. A genuinely indefinite V means
// the supplied lag sequence is not a covariance structure (e.g. a
// moving-average cutoff applied to data whose dependence reaches further),
// and continuing would produce arbitrarily large predictors.
class SymSolver {
public:
    explicit SymSolver(double scale) : scale_(std::max(scale, 1e-300)) {}

    void factor(const Eigen::MatrixXd& v) {
        ldlt_.compute(v);
        double dmin = ldlt_.info() == Eigen::Success ? ldlt_.vectorD().minCoeff() : -scale_;
        if (dmin < -1e-8 * scale_)
            throw std::runtime_error(
                "linear prediction: the supplied autocovariances are not a valid covariance "
                "structure (negative innovation variance)");
        if (ldlt_.info() != Eigen::Success || dmin <= 1e-14 * scale_) {
            Eigen::MatrixXd patched =
                v + (1e-12 * scale_) * Eigen::MatrixXd::Identity(v.rows(), v.cols());
            ldlt_.compute(patched);
        }
    }

    Eigen::MatrixXd right_divide(const Eigen::MatrixXd& a) const {
        return ldlt_.solve(a.transpose()).transpose();
    }

private:
    Eigen::LDLT<Eigen::MatrixXd> ldlt_;
    double scale_;
};

void require_pd_lag0(const Eigen::MatrixXd& g0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es((g0 + g0.transpose()) / 2.0);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("predictor needs a positive definite lag-0 autocovariance");
}

void check_inputs(const std::vector<Eigen::MatrixXd>& autocov,
                  const Eigen::MatrixXd& observations, int h) {
    if (h < 1) throw std::invalid_argument("prediction horizon must be >= 1");
    const Eigen::Index n = observations.rows();
    if (n < 1) throw std::invalid_argument("prediction needs at least one observation");
    if (autocov.empty()) throw std::invalid_argument("empty autocovariance sequence");
    const Eigen::Index d = observations.cols();
    if (autocov[0].rows() != d || autocov[0].cols() != d)
        throw std::invalid_argument("autocovariance dimension does not match the observations");
    if (static_cast<Eigen::Index>(autocov.size()) < n + h)
        throw std::invalid_argument("prediction needs autocovariances up to lag n+h-1");
    require_pd_lag0(autocov[0]);
}

}  // namespace

CompanionCheck companion_stationary(const std::vector<Eigen::MatrixXd>& phi) {
    if (phi.empty()) return {true, 0.0};
    const Eigen::Index d = phi[0].rows();
    const int p = static_cast<int>(phi.size());
    for (const Eigen::MatrixXd& m : phi)
        if (m.rows() != d || m.cols() != d)
            throw std::invalid_argument("AR matrices must be square with equal dimension");
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p * d, p * d);
    for (int i = 0; i < p; ++i) companion.block(0, i * d, d, d) = phi[i];
    if (p > 1)
        companion.block(d, 0, (p - 1) * d, (p - 1) * d) =
            Eigen::MatrixXd::Identity((p - 1) * d, (p - 1) * d);
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    double radius = es.eigenvalues().cwiseAbs().maxCoeff();
    return {radius < 1.0, radius};
}

std::vector<Eigen::MatrixXd> sample_autocov(const Eigen::MatrixXd& scores, int max_lag) {
    const Eigen::Index n = scores.rows();
    if (max_lag < 0) throw std::invalid_argument("sample_autocov: max_lag must be >= 0");
    if (n <= max_lag)
        throw std::invalid_argument("sample_autocov: series shorter than the requested lag");
    const Eigen::Index d = scores.cols();
    std::vector<Eigen::MatrixXd> out;
    out.reserve(max_lag + 1);
    for (int h = 0; h <= max_lag; ++h) {
        Eigen::MatrixXd c = Eigen::MatrixXd::Zero(d, d);
        for (Eigen::Index t = 0; t + h < n; ++t)
            c.noalias() += scores.row(t + h).transpose() * scores.row(t);
        out.push_back(c / static_cast<double>(n));
    }
    return out;
}

std::vector<Eigen::MatrixXd> sample_autocov(const ScoreSeries& scores, int max_lag) {
    return sample_autocov(scores.scores, max_lag);
}

namespace {

// Least squares of targets on regressors via ridge-stabilised normal
// equations. Throws when the design carries no signal at all.
Eigen::MatrixXd ridge_regress(const Eigen::MatrixXd& design, const Eigen::MatrixXd& targets) {
    Eigen::MatrixXd gram = design.transpose() * design;
    double scale = gram.trace();
    if (!(scale > 0.0))
        throw std::invalid_argument("fit_varma: singular regression design");
    gram += 1e-10 * (scale / gram.rows()) * Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
    return gram.ldlt().solve(design.transpose() * targets);  // (regressors x targets)
}

}  // namespace

VarmaModel fit_varma(const Eigen::MatrixXd& scores, int p, int q) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit_varma: negative order");
    const int n = static_cast<int>(scores.rows());
    const int d = static_cast<int>(scores.cols());
    if (d < 1) throw std::invalid_argument("fit_varma: empty scores");
    // 10*d*(p+q) observations are the recommended working floor; the hard
    // requirement is only that the regressions are feasible.
    if (n < p + q + 2 || n <= p + d * (p + q))
        throw std::invalid_argument("fit_varma: series too short for the orders");

    VarmaModel model;
    model.d = d;
    model.p = p;
    model.q = q;

    if (p == 0 && q == 0) {
        model.Sigma = sample_autocov(scores, 0)[0];
        return model;
    }

    if (q == 0) {
        // Multivariate Yule-Walker on the sample autocovariances.
        std::vector<Eigen::MatrixXd> cov = sample_autocov(scores, p);
        if (!(cov[0].trace() > 0.0))
            throw std::invalid_argument("fit_varma: singular regression design");
        LagCov gamma{cov};
        Eigen::MatrixXd block(p * d, p * d);
        Eigen::MatrixXd rhs(p * d, d);
        for (int i = 1; i <= p; ++i) {
            for (int j = 1; j <= p; ++j)
                block.block((i - 1) * d, (j - 1) * d, d, d) = gamma(j - i);
            rhs.block((i - 1) * d, 0, d, d) = gamma(i).transpose();
        }
        double scale = block.trace();
        block += 1e-10 * (scale / block.rows()) *
                 Eigen::MatrixXd::Identity(block.rows(), block.cols());
        Eigen::MatrixXd sol = block.ldlt().solve(rhs);  // stacked Phi_i^T
        for (int i = 0; i < p; ++i)
            model.Phi.push_back(sol.block(i * d, 0, d, d).transpose());
    } else {
        // Hannan-Rissanen: residual proxies from a long autoregression, then
        // least squares on lagged values and lagged residuals.
        const int long_order = std::max(1, std::min(10, n / 10));
        Eigen::MatrixXd design1(n - long_order, long_order * d);
        Eigen::MatrixXd target1(n - long_order, d);
        for (int t = long_order; t < n; ++t) {
            for (int i = 1; i <= long_order; ++i)
                design1.block(t - long_order, (i - 1) * d, 1, d) = scores.row(t - i);
            target1.row(t - long_order) = scores.row(t);
        }
        Eigen::MatrixXd coef1 = ridge_regress(design1, target1);
        Eigen::MatrixXd resid = target1 - design1 * coef1;  // rows t = long_order..n-1

        const int start = std::max(p, long_order + q);
        const int rows = n - start;
        if (rows < d * (p + q) + 1)
            throw std::invalid_argument("fit_varma: too few rows for the Hannan-Rissanen stage");
        Eigen::MatrixXd design2(rows, (p + q) * d);
        Eigen::MatrixXd target2(rows, d);
        for (int t = start; t < n; ++t) {
            int r = t - start;
            for (int i = 1; i <= p; ++i)
                design2.block(r, (i - 1) * d, 1, d) = scores.row(t - i);
            for (int j = 1; j <= q; ++j)
                design2.block(r, (p + j - 1) * d, 1, d) = resid.row(t - j - long_order);
            target2.row(r) = scores.row(t);
        }
        Eigen::MatrixXd coef2 = ridge_regress(design2, target2);
        for (int i = 0; i < p; ++i)
            model.Phi.push_back(coef2.block(i * d, 0, d, d).transpose());
        for (int j = 0; j < q; ++j)
            model.Theta.push_back(coef2.block((p + j) * d, 0, d, d).transpose());
    }

    // Innovation covariance from the one-step residuals of the fitted
    // recursion, with residual proxies standing in for past innovations.
    {
        const int lead = std::max(p, q);
        Eigen::MatrixXd eps = Eigen::MatrixXd::Zero(n, d);
        for (int t = 0; t < n; ++t) {
            Eigen::VectorXd e = scores.row(t).transpose();
            for (int i = 1; i <= p; ++i)
                if (t - i >= 0) e.noalias() -= model.Phi[i - 1] * scores.row(t - i).transpose();
            for (int j = 1; j <= q; ++j)
                if (t - j >= 0) e.noalias() -= model.Theta[j - 1] * eps.row(t - j).transpose();
            eps.row(t) = e.transpose();
        }
        Eigen::MatrixXd tail = eps.bottomRows(n - lead);
        model.Sigma = (tail.transpose() * tail) / static_cast<double>(n - lead);
    }

    CompanionCheck check = companion_stationary(model.Phi);
    model.spectral_radius = check.radius;
    model.stationary = check.stationary;
    return model;
}

VarmaModel fit_varma(const ScoreSeries& scores, int p, int q) {
    return fit_varma(scores.scores, p, q);
}

std::vector<Eigen::MatrixXd> implied_autocov(const VarmaModel& model, int max_lag) {
    if (!model.stationary)
        throw std::invalid_argument("implied_autocov: model is not stationary");
    if (max_lag < 0) throw std::invalid_argument("implied_autocov: negative lag");
    const int d = model.d;

    std::vector<Eigen::MatrixXd> psi;
    psi.push_back(Eigen::MatrixXd::Identity(d, d));
    int quiet = 0;
    double scale = 1.0;
    for (int m = 1; m <= 5000; ++m) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(d, d);
        for (int i = 1; i <= std::min<int>(m, model.p); ++i)
            next.noalias() += model.Phi[i - 1] * psi[m - i];
        if (m <= model.q) next += model.Theta[m - 1];
        double mag = next.norm();
        psi.push_back(std::move(next));
        scale = std::max(scale, mag);
        if (m > model.p + model.q && mag < 1e-15 * scale) {
            if (++quiet >= 8) break;
        } else {
            quiet = 0;
        }
    }

    const int terms = static_cast<int>(psi.size());
    std::vector<Eigen::MatrixXd> out;
    out.reserve(max_lag + 1);
    for (int h = 0; h <= max_lag; ++h) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
        for (int m = 0; m + h < terms; ++m)
            g.noalias() += psi[m + h] * model.Sigma * psi[m].transpose();
        out.push_back(std::move(g));
    }
    return out;
}

Eigen::VectorXd PredictorWeights::apply(const Eigen::MatrixXd& observations) const {
    if (observations.rows() != static_cast<Eigen::Index>(weights.size()))
        throw std::invalid_argument("predictor weights do not match the observation count");
    Eigen::VectorXd out = Eigen::VectorXd::Zero(observations.cols());
    for (std::size_t i = 0; i < weights.size(); ++i)
        out.noalias() += weights[i] * observations.row(static_cast<Eigen::Index>(i)).transpose();
    return out;
}

Eigen::MatrixXd mse_from_weights(const std::vector<Eigen::MatrixXd>& weights, int h,
                                 const std::vector<Eigen::MatrixXd>& autocov) {
    LagCov gamma{autocov};
    const int n = static_cast<int>(weights.size());
    Eigen::MatrixXd mse = gamma(0);
    for (int i = 1; i <= n; ++i) {
        Eigen::MatrixXd cross = gamma(n + h - i) * weights[i - 1].transpose();
        mse -= cross + cross.transpose();
    }
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            mse.noalias() += weights[i - 1] * gamma(i - j) * weights[j - 1].transpose();
    return (mse + mse.transpose()) / 2.0;
}

double orthogonality_residual(const PredictorWeights& w,
                              const std::vector<Eigen::MatrixXd>& autocov) {
    LagCov gamma{autocov};
    const int n = static_cast<int>(w.weights.size());
    double scale = std::max(1e-300, autocov[0].norm());
    double worst = 0.0;
    for (int k = 1; k <= n; ++k) {
        Eigen::MatrixXd res = gamma(n + w.h - k);
        for (int i = 1; i <= n; ++i) res.noalias() -= w.weights[i - 1] * gamma(i - k);
        worst = std::max(worst, res.norm() / scale);
    }
    return worst;
}

Prediction innovations_predict(const std::vector<Eigen::MatrixXd>& autocov,
                               const Eigen::MatrixXd& observations, int h) {
    check_inputs(autocov, observations, h);
    LagCov gamma{autocov};
    const int n = static_cast<int>(observations.rows());
    const int d = static_cast<int>(observations.cols());
    const int last = n + h - 1;  // deepest recursion level needed

    // theta[m] holds the coefficients of the m-th one-step predictor on the
    // innovations, indexed 1..m; v[m] is the one-step error covariance.
    std::vector<std::vector<Eigen::MatrixXd>> theta(last + 1);
    std::vector<Eigen::MatrixXd> v(last + 1);
    v[0] = gamma(0);
    SymSolver solver(gamma(0).trace() / d);

    for (int m = 1; m <= last; ++m) {
        theta[m].assign(m + 1, Eigen::MatrixXd());
        for (int k = 0; k < m; ++k) {
            Eigen::MatrixXd a = gamma(m - k);
            for (int j = 0; j < k; ++j)
                a.noalias() -= theta[m][m - j] * v[j] * theta[k][k - j].transpose();
            solver.factor(v[k]);
            theta[m][m - k] = solver.right_divide(a);
        }
        Eigen::MatrixXd vm = gamma(0);
        for (int j = 0; j < m; ++j)
            vm.noalias() -= theta[m][m - j] * v[j] * theta[m][m - j].transpose();
        v[m] = (vm + vm.transpose()) / 2.0;
    }

    // One-step innovations over the sample.
    Eigen::MatrixXd innov(n, d);
    innov.row(0) = observations.row(0);
    for (int t = 1; t < n; ++t) {
        Eigen::VectorXd hat = Eigen::VectorXd::Zero(d);
        for (int j = 1; j <= t; ++j)
            hat.noalias() += theta[t][j] * innov.row(t - j).transpose();
        innov.row(t) = observations.row(t) - hat.transpose();
    }

    // Prediction at level `last`; innovations past the sample are zero, which
    // keeps exactly the terms reaching back into the data.
    Eigen::VectorXd value = Eigen::VectorXd::Zero(d);
    for (int j = h; j <= last; ++j)
        value.noalias() += theta[last][j] * innov.row(last - j).transpose();

    // Weights on the raw observations by backward substitution of
    // u_t = X_t - sum_j theta[t-1][j] u_{t-j}.
    std::vector<Eigen::MatrixXd> coeff(n + 1, Eigen::MatrixXd::Zero(d, d));
    for (int j = h; j <= last; ++j) coeff[last + 1 - j] = theta[last][j];
    PredictorWeights weights;
    weights.h = h;
    weights.weights.assign(n, Eigen::MatrixXd::Zero(d, d));
    for (int t = n; t >= 1; --t) {
        if (coeff[t].isZero(0)) continue;
        weights.weights[t - 1] += coeff[t];
        for (int j = 1; j <= t - 1; ++j) coeff[t - j].noalias() -= coeff[t] * theta[t - 1][j];
    }

    // Error covariance of the h-step predictor from the recursion itself.
    Eigen::MatrixXd mse = gamma(0);
    for (int j = h; j <= last; ++j)
        mse.noalias() -= theta[last][j] * v[last - j] * theta[last][j].transpose();
    weights.mse = (mse + mse.transpose()) / 2.0;

    return {std::move(value), std::move(weights)};
}

Prediction durbin_levinson_predict(const std::vector<Eigen::MatrixXd>& autocov,
                                   const Eigen::MatrixXd& observations, int h) {
    check_inputs(autocov, observations, h);
    LagCov gamma{autocov};
    const int n = static_cast<int>(observations.rows());
    const int d = static_cast<int>(observations.cols());
    const int last = n + h - 1;

    // Whittle recursion: forward coefficients a[m][k] predict one step ahead
    // from m past values, backward coefficients b[m][k] predict one step
    // before a window of m values.
    std::vector<std::vector<Eigen::MatrixXd>> fwd(last + 1), bwd(last + 1);
    Eigen::MatrixXd v = gamma(0);
    Eigen::MatrixXd vb = gamma(0);
    SymSolver solver(gamma(0).trace() / d);

    for (int m = 1; m <= last; ++m) {
        Eigen::MatrixXd delta = gamma(m);
        Eigen::MatrixXd nabla = gamma(m).transpose();
        for (int k = 1; k < m; ++k) {
            delta.noalias() -= gamma(m - k) * bwd[m - 1][k].transpose();
            nabla.noalias() -= gamma(m - k).transpose() * fwd[m - 1][k].transpose();
        }
        fwd[m].assign(m + 1, Eigen::MatrixXd());
        bwd[m].assign(m + 1, Eigen::MatrixXd());
        solver.factor(vb);
        fwd[m][m] = solver.right_divide(delta);
        solver.factor(v);
        bwd[m][m] = solver.right_divide(nabla);
        for (int k = 1; k < m; ++k) {
            fwd[m][k] = fwd[m - 1][k] - fwd[m][m] * bwd[m - 1][m - k];
            bwd[m][k] = bwd[m - 1][k] - bwd[m][m] * fwd[m - 1][m - k];
        }
        Eigen::MatrixXd vnew = v - fwd[m][m] * delta.transpose();
        Eigen::MatrixXd vbnew = vb - bwd[m][m] * nabla.transpose();
        v = (vnew + vnew.transpose()) / 2.0;
        vb = (vbnew + vbnew.transpose()) / 2.0;
    }

    // Chain one-step predictors; predicted values keep their own weights on
    // the data, so the final weights come out of the same substitution.
    std::vector<std::vector<Eigen::MatrixXd>> pred_w;  // per predicted step
    for (int step = 1; step <= h; ++step) {
        const int s = n + step;  // index being predicted
        const auto& a = fwd[s - 1];
        std::vector<Eigen::MatrixXd> w(n, Eigen::MatrixXd::Zero(d, d));
        for (int k = 1; k <= s - 1; ++k) {
            int src = s - k;
            if (src <= n) {
                w[src - 1] += a[k];
            } else {
                const auto& inner = pred_w[src - n - 1];
                for (int i = 0; i < n; ++i) w[i].noalias() += a[k] * inner[i];
            }
        }
        pred_w.push_back(std::move(w));
    }

    PredictorWeights weights;
    weights.h = h;
    weights.weights = std::move(pred_w.back());
    weights.mse = (h == 1) ? v : mse_from_weights(weights.weights, h, autocov);

    Eigen::VectorXd value = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < n; ++i)
        value.noalias() += weights.weights[i] * observations.row(i).transpose();
    return {std::move(value), std::move(weights)};
}

Prediction brute_force_blp_weights(const std::vector<Eigen::MatrixXd>& autocov,
                                   const Eigen::MatrixXd& observations, int h) {
    check_inputs(autocov, observations, h);
    LagCov gamma{autocov};
    const int n = static_cast<int>(observations.rows());
    const int d = static_cast<int>(observations.cols());

    // Covariance of the stacked sample: block (i,j) = E[X_i X_j^T].
    Eigen::MatrixXd big(n * d, n * d);
    Eigen::MatrixXd rhs(n * d, d);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j)
            big.block((i - 1) * d, (j - 1) * d, d, d) = gamma(i - j);
        rhs.block((i - 1) * d, 0, d, d) = gamma(n + h - i).transpose();
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(big);
    if (!lu.isInvertible())
        throw std::runtime_error("brute_force_blp: singular stacked covariance system");
    Eigen::MatrixXd sol = lu.solve(rhs);  // stacked W_i^T

    PredictorWeights weights;
    weights.h = h;
    for (int i = 0; i < n; ++i)
        weights.weights.push_back(sol.block(i * d, 0, d, d).transpose());
    weights.mse = mse_from_weights(weights.weights, h, autocov);

    Eigen::VectorXd value = weights.apply(observations);
    return {std::move(value), std::move(weights)};
}

Eigen::VectorXd brute_force_blp(const std::vector<Eigen::MatrixXd>& autocov,
                                const Eigen::MatrixXd& observations, int h) {
    return brute_force_blp_weights(autocov, observations, h).value;
}

}  // namespace farmakit
