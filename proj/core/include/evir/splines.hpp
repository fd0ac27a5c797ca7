#pragma once

#include <utility>
#include <vector>

#include "evir/numerics.hpp"

namespace evir {

/// Clamped B-spline basis of polynomial degree `d` on [a, b].
///
/// The interval is divided into `span_count` subintervals by strictly
/// increasing breakpoints; the boundary knots replicate the endpoints with
/// multiplicity d+1, so the basis forms a partition of unity on all of
/// [a, b]. The basis dimension is K = span_count + d.
class SplineBasis {
public:
    /// Builds a basis from explicit breakpoints (endpoints included).
    SplineBasis(std::vector<double> breakpoints, int degree);

    int degree() const { return degree_; }
    int dim() const { return dim_; }
    int span_count() const { return static_cast<int>(breakpoints_.size()) - 1; }
    double a() const { return breakpoints_.front(); }
    double b() const { return breakpoints_.back(); }
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// Extended knot vector t_0 <= ... <= t_{K+d}, endpoints replicated d+1 times.
    const std::vector<double>& knots() const { return knots_; }

    /// All K basis values at x. Out-of-range x clamps to the boundary; when
    /// `clamped` is non-null it is set accordingly.
    Vector eval(double x, bool* clamped = nullptr) const;

    /// The d+1 possibly-nonzero basis values at x, written to `values`
    /// (size degree+1). Returns the index of the first nonzero basis function.
    int eval_nonzero(double x, double* values, bool* clamped = nullptr) const;

    /// Index i such that t_i <= x < t_{i+1}, restricted to real spans.
    int find_span(double x) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> knots_;
    int degree_;
    int dim_;
};

/// Roughness-penalty matrix: b^T matrix b = integral of the squared m-th
/// derivative of the spline with coefficients b.
struct PenaltyMatrix {
    int order;
    Matrix matrix;
};

/// Equidistant basis with span_count K0 on [a, b]; dimension K = K0 + d.
SplineBasis make_basis(double a, double b, int K0, int d);

/// Coefficients of the m-th derivative: returns the degree d-m basis and the
/// vector c with d^m/dx^m B(x)^T b = B^{[d-m]}(x)^T c.
std::pair<SplineBasis, Vector> eval_deriv_coeffs(const SplineBasis& basis,
                                                 const Vector& coefs, int m);

/// Difference map D with c = D b for one derivative order (m = 1 step
/// applied m times gives eval_deriv_coeffs); exposed for the penalty.
Matrix deriv_coef_matrix(const SplineBasis& basis, int m);

/// Gram matrix of the basis: entries integral of B_i B_j over [a, b],
/// exact per-span Gauss-Legendre.
Matrix gram_matrix(const SplineBasis& basis);

PenaltyMatrix penalty_matrix(const SplineBasis& basis, int m);

}  // namespace evir
