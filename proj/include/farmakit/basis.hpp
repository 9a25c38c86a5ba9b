#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <memory>
#include <vector>

namespace farmakit {

enum class BasisKind { fourier };

/// Orthonormal function basis on [0,1] together with the sampling grid used
/// for smoothing and quadrature. Immutable after construction; shared by all
/// samples of a series, so all coordinate computations are exact inner
/// products in R^K.
///
/// Fourier ordering: constant first, then sin/cos pairs of increasing
/// frequency, i.e. {1, sqrt(2) sin(2 pi t), sqrt(2) cos(2 pi t),
/// sqrt(2) sin(4 pi t), ...}. An odd size gives complete pairs.
class BasisSpec {
public:
    BasisSpec(BasisKind kind, int size, std::vector<double> grid);

    /// Fourier basis with the uniform grid t_j = j / grid_points.
    static std::shared_ptr<const BasisSpec> fourier(int size, int grid_points);
    static std::shared_ptr<const BasisSpec> fourier(int size, std::vector<double> grid);

    BasisKind kind() const { return kind_; }
    int size() const { return size_; }
    const std::vector<double>& grid() const { return grid_; }

    /// Value of basis function k (0-based) at t in [0,1].
    double eval(int k, double t) const;

    /// Basis functions evaluated at the grid, one column per function.
    const Eigen::MatrixXd& design() const { return design_; }

    /// Pairwise integrals of basis function products over [0,1], computed
    /// from closed-form antiderivatives. Identity up to rounding.
    Eigen::MatrixXd gram() const;

    /// Structural equality: same kind, size and grid.
    bool compatible(const BasisSpec& other) const;

private:
    BasisKind kind_;
    int size_;
    std::vector<double> grid_;
    Eigen::MatrixXd design_;
};

using BasisPtr = std::shared_ptr<const BasisSpec>;

/// Element of the function space, stored as coordinates in a shared basis.
struct FunctionSample {
    Eigen::VectorXd coeffs;
    BasisPtr basis;

    /// Pointwise evaluation at t in [0,1].
    double eval(double t) const;

    /// L2 norm; equals the Euclidean norm of the coordinates.
    double norm() const { return coeffs.norm(); }
};

/// Time-ordered samples sharing one basis. Row n of `coeffs` holds the
/// coordinates of the sample with time label `start + n`.
struct FunctionSeries {
    Eigen::MatrixXd coeffs;  // N x K
    BasisPtr basis;
    int start = 0;

    int length() const { return static_cast<int>(coeffs.rows()); }
    FunctionSample sample(int row) const;
    int row_of(int label) const { return label - start; }
};

/// Exact inner product in coordinates. Throws on basis mismatch.
double inner_product(const FunctionSample& f, const FunctionSample& g);

/// Reusable least-squares smoother: projects raw grid samples onto the basis
/// by solving the normal equations. Construction validates that the design
/// has full column rank for the given grid.
class Smoother {
public:
    explicit Smoother(BasisPtr basis);

    FunctionSample smooth(const Eigen::VectorXd& raw) const;

    /// Row-wise smoothing of many curves sharing the basis grid (OpenMP).
    FunctionSeries smooth_rows(const Eigen::MatrixXd& raw, int start = 0) const;

private:
    BasisPtr basis_;
    Eigen::LLT<Eigen::MatrixXd> normal_;
};

/// One-shot convenience wrapper around Smoother.
FunctionSample smooth_to_basis(const Eigen::VectorXd& raw, const BasisPtr& basis);

/// Smooth a whole matrix of raw curves (rows) onto the basis.
FunctionSeries smooth_series(const Eigen::MatrixXd& raw, const BasisPtr& basis, int start = 0);

/// Trapezoid quadrature of |f| over the basis grid.
double integrate_abs(const FunctionSample& f);

}  // namespace farmakit
