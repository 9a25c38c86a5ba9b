#include "farmakit/basis.hpp"

#include <Eigen/QR>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "farmakit/kernels.hpp"

namespace farmakit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Closed-form integrals of sin/cos(2 pi m t) over [0,1], evaluated from the
// antiderivative so that rounding behaves like any other float expression.
double int_cos(int m) {
    if (m == 0) return 1.0;
    return std::sin(kTwoPi * m) / (kTwoPi * m);
}

double int_sin(int m) {
    if (m == 0) return 0.0;
    return (1.0 - std::cos(kTwoPi * m)) / (kTwoPi * m);
}

enum class Part { constant, sine, cosine };

struct Term {
    Part part;
    int freq;
};

Term fourier_term(int k) {
    if (k == 0) return {Part::constant, 0};
    int m = (k + 1) / 2;
    return {(k % 2 == 1) ? Part::sine : Part::cosine, m};
}

// Integral over [0,1] of the product of two Fourier basis functions,
// via product-to-sum identities.
double pair_integral(int i, int j) {
    Term a = fourier_term(i);
    Term b = fourier_term(j);
    if (a.part == Part::constant && b.part == Part::constant) return 1.0;
    if (a.part == Part::constant || b.part == Part::constant) {
        Term t = (a.part == Part::constant) ? b : a;
        double s = std::sqrt(2.0);
        return t.part == Part::sine ? s * int_sin(t.freq) : s * int_cos(t.freq);
    }
    int diff = a.freq - b.freq;
    int sum = a.freq + b.freq;
    if (a.part == Part::sine && b.part == Part::sine)
        return int_cos(diff) - int_cos(sum);
    if (a.part == Part::cosine && b.part == Part::cosine)
        return int_cos(diff) + int_cos(sum);
    // One sine, one cosine; sin is odd in the frequency difference.
    int sfreq = (a.part == Part::sine) ? a.freq : b.freq;
    int cfreq = (a.part == Part::sine) ? b.freq : a.freq;
    double d = int_sin(sfreq - cfreq);
    return int_sin(sfreq + cfreq) + d;
}

}  // namespace

BasisSpec::BasisSpec(BasisKind kind, int size, std::vector<double> grid)
    : kind_(kind), size_(size), grid_(std::move(grid)) {
    if (size_ < 1) throw std::invalid_argument("basis size must be >= 1");
    if (grid_.empty()) throw std::invalid_argument("basis grid must be nonempty");
    for (std::size_t j = 0; j < grid_.size(); ++j) {
        if (!(grid_[j] >= 0.0 && grid_[j] <= 1.0))
            throw std::invalid_argument("basis grid points must lie in [0,1]");
        if (j > 0 && !(grid_[j] > grid_[j - 1]))
            throw std::invalid_argument("basis grid must be strictly increasing");
    }
    design_.resize(static_cast<Eigen::Index>(grid_.size()), size_);
    for (Eigen::Index r = 0; r < design_.rows(); ++r)
        for (int k = 0; k < size_; ++k) design_(r, k) = eval(k, grid_[r]);
}

std::shared_ptr<const BasisSpec> BasisSpec::fourier(int size, int grid_points) {
    if (grid_points < 1) throw std::invalid_argument("grid_points must be >= 1");
    std::vector<double> grid(grid_points);
    for (int j = 0; j < grid_points; ++j) grid[j] = static_cast<double>(j) / grid_points;
    return std::make_shared<BasisSpec>(BasisKind::fourier, size, std::move(grid));
}

std::shared_ptr<const BasisSpec> BasisSpec::fourier(int size, std::vector<double> grid) {
    return std::make_shared<BasisSpec>(BasisKind::fourier, size, std::move(grid));
}

double BasisSpec::eval(int k, double t) const {
    if (k < 0 || k >= size_) throw std::out_of_range("basis index out of range");
    if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("evaluation point outside [0,1]");
    Term term = fourier_term(k);
    switch (term.part) {
        case Part::constant: return 1.0;
        case Part::sine: return std::sqrt(2.0) * std::sin(kTwoPi * term.freq * t);
        case Part::cosine: return std::sqrt(2.0) * std::cos(kTwoPi * term.freq * t);
    }
    return 0.0;
}

Eigen::MatrixXd BasisSpec::gram() const {
    Eigen::MatrixXd g(size_, size_);
    for (int i = 0; i < size_; ++i)
        for (int j = 0; j <= i; ++j) g(i, j) = g(j, i) = pair_integral(i, j);
    return g;
}

bool BasisSpec::compatible(const BasisSpec& other) const {
    return kind_ == other.kind_ && size_ == other.size_ && grid_ == other.grid_;
}

double FunctionSample::eval(double t) const {
    double acc = 0.0;
    for (int k = 0; k < basis->size(); ++k) acc += coeffs[k] * basis->eval(k, t);
    return acc;
}

FunctionSample FunctionSeries::sample(int row) const {
    if (row < 0 || row >= length()) throw std::out_of_range("series row out of range");
    return {coeffs.row(row).transpose(), basis};
}

double inner_product(const FunctionSample& f, const FunctionSample& g) {
    if (!f.basis || !g.basis || (f.basis != g.basis && !f.basis->compatible(*g.basis)))
        throw std::invalid_argument("inner_product: samples live in different bases");
    return f.coeffs.dot(g.coeffs);
}

Smoother::Smoother(BasisPtr basis) : basis_(std::move(basis)) {
    const Eigen::MatrixXd& design = basis_->design();
    const int k = basis_->size();
    const Eigen::Index g = design.rows();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (g < k || qr.rank() < k)
        throw std::invalid_argument(
            "smoothing design is rank-deficient: K=" + std::to_string(k) +
            " basis functions on a grid of " + std::to_string(g) + " points");
    normal_.compute(design.transpose() * design);
    if (normal_.info() != Eigen::Success)
        throw std::invalid_argument(
            "smoothing normal equations are singular: K=" + std::to_string(k) +
            ", grid size " + std::to_string(g));
}

FunctionSample Smoother::smooth(const Eigen::VectorXd& raw) const {
    const Eigen::MatrixXd& design = basis_->design();
    if (raw.size() != design.rows())
        throw std::invalid_argument("raw sample length does not match the basis grid");
    if (!raw.allFinite())
        throw std::invalid_argument("raw sample contains non-finite values");
    Eigen::VectorXd c = normal_.solve(design.transpose() * raw);
    return {std::move(c), basis_};
}

FunctionSeries Smoother::smooth_rows(const Eigen::MatrixXd& raw, int start) const {
    const Eigen::MatrixXd& design = basis_->design();
    if (raw.cols() != design.rows())
        throw std::invalid_argument("raw row length does not match the basis grid");
    if (!raw.allFinite())
        throw std::invalid_argument("raw data contains non-finite values");
    const Eigen::Index n = raw.rows();
    Eigen::MatrixXd coeffs(n, basis_->size());
    const int nt = std::min<Eigen::Index>(kernels::thread_budget(), std::max<Eigen::Index>(1, n));
#pragma omp parallel for schedule(static) num_threads(nt)
    for (Eigen::Index i = 0; i < n; ++i)
        coeffs.row(i) = normal_.solve(design.transpose() * raw.row(i).transpose()).transpose();
    return {std::move(coeffs), basis_, start};
}

FunctionSample smooth_to_basis(const Eigen::VectorXd& raw, const BasisPtr& basis) {
    return Smoother(basis).smooth(raw);
}

FunctionSeries smooth_series(const Eigen::MatrixXd& raw, const BasisPtr& basis, int start) {
    return Smoother(basis).smooth_rows(raw, start);
}

double integrate_abs(const FunctionSample& f) {
    const std::vector<double>& grid = f.basis->grid();
    if (grid.size() < 2) return std::abs(f.eval(grid[0]));
    double acc = 0.0;
    double prev = std::abs(f.eval(grid[0]));
    for (std::size_t j = 1; j < grid.size(); ++j) {
        double cur = std::abs(f.eval(grid[j]));
        acc += 0.5 * (prev + cur) * (grid[j] - grid[j - 1]);
        prev = cur;
    }
    return acc;
}

}  // namespace farmakit
