#pragma once

#include <Eigen/Dense>
#include <vector>

#include "evir/errors.hpp"

namespace evir {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SymmetricSystem {
    Matrix matrix;
    Vector rhs;
};

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2 and a rule of order g
/// integrates polynomials of degree <= 2g-1 exactly.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Solves a symmetric positive-definite system by LDL^T factorization.
/// Throws NotPositiveDefinite when a pivot falls at or below
/// 1e-14 * trace / K; callers are expected to regularize and retry.
Vector solve_spd(const SymmetricSystem& system);

/// Type-7 (linear interpolation) empirical quantile of `values` at `level`.
double empirical_quantile(std::vector<double> values, double level);

/// Quantile on an already-sorted sample.
double empirical_quantile_sorted(const std::vector<double>& sorted, double level);

QuadratureRule gauss_legendre(int order);

}  // namespace evir
