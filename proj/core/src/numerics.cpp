#include "evir/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace evir {

Vector solve_spd(const SymmetricSystem& system) {
    const auto& A = system.matrix;
    const Eigen::Index k = A.rows();
    if (k < 1 || A.cols() != k || system.rhs.size() != k) {
        throw EmptyInput("solve_spd: dimension mismatch");
    }

    // Unpivoted LDL^T. Fine for SPD input; a small pivot signals a
    // degenerate Hessian, which the caller handles by adding a ridge.
    const double pivot_floor = 1e-14 * A.trace() / static_cast<double>(k);

    Matrix L = Matrix::Identity(k, k);
    Vector d(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        double dj = A(j, j);
        for (Eigen::Index s = 0; s < j; ++s) dj -= L(j, s) * L(j, s) * d(s);
        if (!(dj > pivot_floor)) {
            throw NotPositiveDefinite("solve_spd: pivot below floor");
        }
        d(j) = dj;
        for (Eigen::Index i = j + 1; i < k; ++i) {
            double v = A(i, j);
            for (Eigen::Index s = 0; s < j; ++s) v -= L(i, s) * L(j, s) * d(s);
            L(i, j) = v / dj;
        }
    }

    // Forward solve, diagonal scale, backward solve.
    Vector x = system.rhs;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index s = 0; s < i; ++s) x(i) -= L(i, s) * x(s);
    x.array() /= d.array();
    for (Eigen::Index i = k - 1; i >= 0; --i)
        for (Eigen::Index s = i + 1; s < k; ++s) x(i) -= L(s, i) * x(s);
    return x;
}

double empirical_quantile_sorted(const std::vector<double>& sorted, double level) {
    const std::size_t n = sorted.size();
    if (n < 2) throw EmptyInput("empirical_quantile: need at least 2 values");
    if (!(level > 0.0 && level < 1.0)) {
        throw InvalidTau("empirical_quantile: level must lie in (0,1)");
    }
    const double h = static_cast<double>(n - 1) * level;
    const std::size_t lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= n) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double empirical_quantile(std::vector<double> values, double level) {
    std::sort(values.begin(), values.end());
    return empirical_quantile_sorted(values, level);
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw EmptyInput("gauss_legendre: order must be >= 1");
    const int n = order;
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    // Newton iteration on P_n from the Chebyshev initial guess.
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace evir
