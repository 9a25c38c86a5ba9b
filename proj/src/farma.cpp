#include "farmakit/farma.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

#include "farmakit/rng.hpp"

namespace farmakit {

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver((m + m.transpose()) / 2.0);
    double floor = -1e-10 * std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    if (solver.eigenvalues().minCoeff() < floor)
        throw std::invalid_argument("noise covariance is not positive semidefinite");
    Eigen::VectorXd roots = solver.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return solver.eigenvectors() * roots.asDiagonal() * solver.eigenvectors().transpose();
}

// Moving-average coefficient operators of the causal solution for p <= 1:
// psi_j = sum_{k<=j} phi^{j-k} theta_k below the MA order, then
// phi^{j-q} beta with beta = sum_{k<=q} phi^{q-k} theta_k.
std::vector<Eigen::MatrixXd> ma_coefficients(const Eigen::MatrixXd& phi,
                                             const std::vector<Eigen::MatrixXd>& thetas,
                                             int lags) {
    const Eigen::Index k = phi.rows();
    const int q = static_cast<int>(thetas.size());
    std::vector<Eigen::MatrixXd> powers(static_cast<std::size_t>(std::max(lags, q)) + 1);
    powers[0] = Eigen::MatrixXd::Identity(k, k);
    for (std::size_t j = 1; j < powers.size(); ++j) powers[j] = powers[j - 1] * phi;

    // theta_0 is the identity, which powers[0] already holds.
    auto theta = [&](int j) -> const Eigen::MatrixXd& {
        return j == 0 ? powers[0] : thetas[j - 1];
    };

    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(k, k);
    for (int j = 0; j <= q; ++j) beta += powers[q - j] * theta(j);

    std::vector<Eigen::MatrixXd> psi(lags + 1);
    for (int j = 0; j <= lags; ++j) {
        if (j < q) {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
            for (int m = 0; m <= j; ++m) acc += powers[j - m] * theta(m);
            psi[j] = std::move(acc);
        } else {
            psi[j] = powers[j - q] * beta;
        }
    }
    return psi;
}

Eigen::MatrixXd causal_rows(const std::vector<Eigen::MatrixXd>& psi,
                            const Eigen::MatrixXd& noise_rows) {
    const int lags = static_cast<int>(psi.size()) - 1;
    const Eigen::Index n_out = noise_rows.rows() - lags;
    if (n_out <= 0) throw std::invalid_argument("causal solution: noise shorter than the lag window");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_out, noise_rows.cols());
    for (Eigen::Index i = 0; i < n_out; ++i)
        for (int j = 0; j <= lags; ++j)
            out.row(i).noalias() += noise_rows.row(i + lags - j) * psi[j].transpose();
    return out;
}

}  // namespace

FarmaModel::FarmaModel(std::vector<KernelOperator> phis, std::vector<KernelOperator> thetas,
                       KernelOperator noise_cov, int contraction_search)
    : phis_(std::move(phis)), thetas_(std::move(thetas)), noise_cov_(std::move(noise_cov)) {
    basis_ = noise_cov_.basis;
    if (!basis_) throw std::invalid_argument("model needs a basis via the noise covariance");
    auto check_basis = [&](const KernelOperator& op) {
        if (op.basis != basis_ && !op.basis->compatible(*basis_))
            throw std::invalid_argument("model operators live in different bases");
        if (op.mat.rows() != basis_->size() || op.mat.cols() != basis_->size())
            throw std::invalid_argument("model operator has wrong dimensions");
    };
    for (const KernelOperator& op : phis_) check_basis(op);
    for (const KernelOperator& op : thetas_) check_basis(op);
    check_basis(noise_cov_);
    noise_factor_ = psd_sqrt(noise_cov_.mat);

    if (phis_.empty()) {
        causality_ = 1;  // no AR part; the zero companion contracts immediately
    } else {
        causality_ = check_contraction(state_space_lift(phis_, thetas_).phi_tilde,
                                       contraction_search);
    }
}

SimulationResult simulate(const FarmaModel& model, int n, int burn_in, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
    if (burn_in < 0) throw std::invalid_argument("simulate: burn_in must be >= 0");
    if (!model.causality())
        throw std::invalid_argument(
            "simulate: model has no contraction certificate; check_contraction failed on the "
            "companion operator");

    const int k = model.dim();
    const int p = model.p();
    const int q = model.q();
    const int total = burn_in + n;

    Rng rng(seed);
    Eigen::MatrixXd noise(total, k);
    Eigen::VectorXd z(k);
    for (int t = 0; t < total; ++t) {
        for (int c = 0; c < k; ++c) z[c] = rng.gauss();
        noise.row(t) = (model.noise_factor() * z).transpose();
    }

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(total, k);
    for (int t = 0; t < total; ++t) {
        Eigen::VectorXd acc = noise.row(t).transpose();
        for (int i = 1; i <= p; ++i)
            if (t - i >= 0) acc.noalias() += model.phis()[i - 1].mat * x.row(t - i).transpose();
        for (int j = 1; j <= q; ++j)
            if (t - j >= 0) acc.noalias() += model.thetas()[j - 1].mat * noise.row(t - j).transpose();
        x.row(t) = acc.transpose();
    }

    SimulationResult out;
    out.series = {x.bottomRows(n), model.basis(), 0};
    out.noise = {std::move(noise), model.basis(), -burn_in};
    return out;
}

FunctionSeries causal_solution(const FarmaModel& model, const FunctionSeries& noise, int lags) {
    if (model.p() > 1)
        throw std::invalid_argument(
            "causal_solution supports p <= 1; use causal_solution_state_space for higher orders");
    if (lags < model.q()) throw std::invalid_argument("causal_solution: lag window shorter than q");
    if (!model.causality())
        throw std::invalid_argument("causal_solution: model has no contraction certificate");

    const int k = model.dim();
    Eigen::MatrixXd phi =
        model.p() == 1 ? model.phis()[0].mat : Eigen::MatrixXd::Zero(k, k).eval();
    std::vector<Eigen::MatrixXd> thetas;
    for (const KernelOperator& th : model.thetas()) thetas.push_back(th.mat);

    Eigen::MatrixXd rows = causal_rows(ma_coefficients(phi, thetas, lags), noise.coeffs);
    return {std::move(rows), model.basis(), noise.start + lags};
}

FunctionSeries causal_solution_state_space(const FarmaModel& model, const FunctionSeries& noise,
                                           int lags) {
    if (model.p() < 1) return causal_solution(model, noise, lags);
    if (lags < model.q()) throw std::invalid_argument("causal solution: lag window shorter than q");
    if (!model.causality())
        throw std::invalid_argument("causal solution: model has no contraction certificate");

    StateSpaceLift lift = state_space_lift(model.phis(), model.thetas());
    const int k = model.dim();
    const int p = model.p();

    std::vector<Eigen::MatrixXd> thetas;
    for (const StackedOperator& th : lift.theta_tildes) thetas.push_back(th.dense);

    Eigen::MatrixXd lifted_noise = Eigen::MatrixXd::Zero(noise.length(), p * k);
    lifted_noise.leftCols(k) = noise.coeffs;

    Eigen::MatrixXd rows = causal_rows(ma_coefficients(lift.phi_tilde.dense, thetas, lags),
                                       lifted_noise);
    return {rows.leftCols(k), model.basis(), noise.start + lags};
}

KernelOperator stationary_covariance(const FarmaModel& model, double rel_tol, int max_terms) {
    if (model.p() > 0 && !model.causality())
        throw std::invalid_argument("stationary_covariance: model has no contraction certificate");
    const int k = model.dim();
    const int p = model.p();
    const int q = model.q();

    // recent[j] holds psi_{m-1-j}; only the last p coefficients are needed.
    std::vector<Eigen::MatrixXd> recent;
    recent.push_back(Eigen::MatrixXd::Identity(k, k));
    Eigen::MatrixXd cov = model.noise_cov().mat;

    double noise_scale = op_norm(model.noise_cov());
    int quiet = 0;
    for (int m = 1; m <= max_terms; ++m) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, k);
        for (int i = 1; i <= std::min<int>(m, p); ++i)
            next.noalias() += model.phis()[i - 1].mat * recent[i - 1];
        if (m <= q) next += model.thetas()[m - 1].mat;
        cov.noalias() += next * model.noise_cov().mat * next.transpose();
        double contribution = next.squaredNorm() * noise_scale;
        recent.insert(recent.begin(), std::move(next));
        if (static_cast<int>(recent.size()) > std::max(1, p)) recent.pop_back();
        if (m > p + q && contribution < rel_tol * std::max(1e-300, cov.trace())) {
            if (++quiet >= 8) {
                Eigen::MatrixXd sym = (cov + cov.transpose()) / 2.0;
                return {std::move(sym), model.basis()};
            }
        } else {
            quiet = 0;
        }
    }
    throw std::runtime_error("stationary_covariance: moving-average expansion did not converge");
}

ProjectedModel project_model(const FarmaModel& model, const EigenSystem& eig, int d) {
    const int k = model.dim();
    if (eig.count() != k)
        throw std::invalid_argument("project_model needs a full eigensystem");
    if (d < 1 || d > k) throw std::invalid_argument("project_model: d out of range");

    ProjectedModel pm;
    pm.d = d;
    auto split = [&](const Eigen::MatrixXd& mat, std::vector<Eigen::MatrixXd>& head,
                     std::vector<Eigen::MatrixXd>& tail) {
        Eigen::MatrixXd b = eig.vectors.transpose() * mat * eig.vectors;
        head.push_back(b.topLeftCorner(d, d));
        tail.push_back(b.topRightCorner(d, k - d));
    };
    for (const KernelOperator& op : model.phis()) split(op.mat, pm.phi, pm.phi_tail);
    for (const KernelOperator& op : model.thetas()) split(op.mat, pm.theta, pm.theta_tail);
    pm.noise_cov =
        (eig.vectors.transpose() * model.noise_cov().mat * eig.vectors).topLeftCorner(d, d);
    return pm;
}

Eigen::VectorXd projection_remainder(const ProjectedModel& pm, const Eigen::MatrixXd& tail_scores,
                           const Eigen::MatrixXd& tail_noise, int n) {
    const int p = static_cast<int>(pm.phi_tail.size());
    const int q = static_cast<int>(pm.theta_tail.size());
    if (n - p < 0 || n - q < 0 || n > tail_scores.rows() || n > tail_noise.rows())
        throw std::invalid_argument("projection_remainder: insufficient history before index n");
    Eigen::VectorXd delta = Eigen::VectorXd::Zero(pm.d);
    for (int i = 1; i <= p; ++i)
        delta.noalias() += pm.phi_tail[i - 1] * tail_scores.row(n - i).transpose();
    for (int j = 1; j <= q; ++j)
        delta.noalias() += pm.theta_tail[j - 1] * tail_noise.row(n - j).transpose();
    return delta;
}

double projection_remainder_bound(const FarmaModel& model, const EigenSystem& eig, int d) {
    const int k = model.dim();
    if (eig.count() != k) throw std::invalid_argument("projection_remainder_bound needs a full eigensystem");
    if (d < 1 || d > k) throw std::invalid_argument("projection_remainder_bound: d out of range");

    double tail_lambda = 0.0;
    for (int l = d; l < k; ++l) tail_lambda += eig.values[l];
    double tail_noise = 0.0;
    for (int l = d; l < k; ++l) {
        Eigen::VectorXd v = eig.vectors.col(l);
        tail_noise += v.dot(model.noise_cov().mat * v);
    }

    double ar_part = 0.0;
    for (const KernelOperator& op : model.phis()) {
        double nrm = op_norm(op);
        ar_part += nrm * nrm;
    }
    double ma_part = 0.0;
    for (const KernelOperator& op : model.thetas()) {
        double nrm = op_norm(op);
        ma_part += nrm * nrm;
    }
    return 2.0 * (ar_part * tail_lambda + ma_part * tail_noise);
}

ExactnessReport exactness_check(const FarmaModel& model, const EigenSystem& eig, int d,
                                const ScoreSeries* scores) {
    const int k = model.dim();
    if (eig.count() != k) throw std::invalid_argument("exactness_check needs a full eigensystem");
    if (d < 1 || d > k) throw std::invalid_argument("exactness_check: d out of range");

    ExactnessReport report;
    report.exact = true;
    for (const KernelOperator& op : model.phis()) {
        Eigen::MatrixXd b = eig.vectors.transpose() * op.mat * eig.vectors;
        double nrm = b.bottomRightCorner(k - d, k - d).norm();
        report.compression_norms.push_back(nrm);
        if (nrm >= 1e-10) report.exact = false;
    }

    if (scores != nullptr) {
        if (scores->d != d)
            throw std::invalid_argument("exactness_check: score dimension does not match d");
        ProjectedModel pm = project_model(model, eig, d);
        const int p = model.p();
        const int q = model.q();
        const Eigen::MatrixXd& s = scores->scores;
        const int m = static_cast<int>(s.rows()) - p;
        if (m < q + 4) throw std::invalid_argument("exactness_check: series too short for diagnostics");
        Eigen::MatrixXd resid(m, d);
        for (int t = p; t < s.rows(); ++t) {
            Eigen::VectorXd r = s.row(t).transpose();
            for (int i = 1; i <= p; ++i) r.noalias() -= pm.phi[i - 1] * s.row(t - i).transpose();
            resid.row(t - p) = r.transpose();
        }
        Eigen::MatrixXd c0 = (resid.transpose() * resid) / m;
        report.residual_se = c0.trace() / std::sqrt(static_cast<double>(m));
        for (int h = q + 1; h <= q + 3; ++h) {
            Eigen::MatrixXd ch = Eigen::MatrixXd::Zero(d, d);
            for (int t = 0; t + h < m; ++t)
                ch.noalias() += resid.row(t + h).transpose() * resid.row(t);
            ch /= m;
            report.residual_autocov_norms.push_back(ch.norm());
        }
    }
    return report;
}

}  // namespace farmakit
