#include "evir/splines.hpp"

#include <algorithm>
#include <cmath>

namespace evir {

SplineBasis::SplineBasis(std::vector<double> breakpoints, int degree)
    : breakpoints_(std::move(breakpoints)), degree_(degree) {
    if (degree_ < 0 || degree_ > 31) {
        throw OrderExceedsDegree("SplineBasis: degree out of supported range [0, 31]");
    }
    if (breakpoints_.size() < 2) throw TooFewKnots("SplineBasis: need at least 2 breakpoints");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1])) {
            throw InvalidInterval("SplineBasis: breakpoints must strictly increase");
        }
    }
    const int k0 = static_cast<int>(breakpoints_.size()) - 1;
    dim_ = k0 + degree_;
    knots_.reserve(dim_ + degree_ + 1);
    for (int i = 0; i <= degree_; ++i) knots_.push_back(breakpoints_.front());
    for (int i = 1; i < k0; ++i) knots_.push_back(breakpoints_[i]);
    for (int i = 0; i <= degree_; ++i) knots_.push_back(breakpoints_.back());
}

int SplineBasis::find_span(double x) const {
    const int k = dim_;
    if (x >= knots_[k]) return k - 1;  // includes x == b (closed last span)
    if (x <= knots_[degree_]) return degree_;
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + k, x);
    return static_cast<int>(it - knots_.begin()) - 1;
}

int SplineBasis::eval_nonzero(double x, double* values, bool* clamped) const {
    bool out = false;
    if (x < a()) { x = a(); out = true; }
    if (x > b()) { x = b(); out = true; }
    if (clamped) *clamped = out;

    const int i = find_span(x);
    const int d = degree_;
    // Cox-de Boor triangle (only the d+1 functions alive on the span, so the
    // 0/0 := 0 convention never needs to be taken literally).
    double left[32], right[32];
    values[0] = 1.0;
    for (int j = 1; j <= d; ++j) {
        left[j] = x - knots_[i + 1 - j];
        right[j] = knots_[i + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }
    return i - d;
}

Vector SplineBasis::eval(double x, bool* clamped) const {
    Vector out = Vector::Zero(dim_);
    double window[32];
    const int first = eval_nonzero(x, window, clamped);
    for (int j = 0; j <= degree_; ++j) out(first + j) = window[j];
    return out;
}

SplineBasis make_basis(double a, double b, int K0, int d) {
    if (!(a < b)) throw InvalidInterval("make_basis: need a < b");
    if (K0 <= 1) throw TooFewKnots("make_basis: need K0 > 1");
    if (d < 1) throw OrderExceedsDegree("make_basis: need degree >= 1");
    std::vector<double> bp(K0 + 1);
    for (int j = 0; j <= K0; ++j) {
        bp[j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(K0);
    }
    bp.front() = a;
    bp.back() = b;
    return SplineBasis(std::move(bp), d);
}

namespace {

// One derivative step: coefficients of s' in the degree d-1 basis on the
// same breakpoints.
Vector deriv_step(const SplineBasis& basis, const Vector& coefs) {
    const int d = basis.degree();
    const int k = basis.dim();
    const auto& t = basis.knots();
    Vector out(k - 1);
    for (int r = 0; r + 1 < k; ++r) {
        out(r) = d * (coefs(r + 1) - coefs(r)) / (t[r + 1 + d] - t[r + 1]);
    }
    return out;
}

Matrix deriv_step_matrix(const SplineBasis& basis) {
    const int d = basis.degree();
    const int k = basis.dim();
    const auto& t = basis.knots();
    Matrix out = Matrix::Zero(k - 1, k);
    for (int r = 0; r + 1 < k; ++r) {
        const double scale = d / (t[r + 1 + d] - t[r + 1]);
        out(r, r) = -scale;
        out(r, r + 1) = scale;
    }
    return out;
}

}  // namespace

std::pair<SplineBasis, Vector> eval_deriv_coeffs(const SplineBasis& basis,
                                                 const Vector& coefs, int m) {
    if (m < 1 || m > basis.degree()) {
        throw OrderExceedsDegree("eval_deriv_coeffs: need 1 <= m <= degree");
    }
    SplineBasis current = basis;
    Vector c = coefs;
    for (int step = 0; step < m; ++step) {
        c = deriv_step(current, c);
        current = SplineBasis(current.breakpoints(), current.degree() - 1);
    }
    return {std::move(current), std::move(c)};
}

Matrix deriv_coef_matrix(const SplineBasis& basis, int m) {
    if (m < 1 || m > basis.degree()) {
        throw OrderExceedsDegree("deriv_coef_matrix: need 1 <= m <= degree");
    }
    SplineBasis current = basis;
    Matrix d_mat = deriv_step_matrix(current);
    for (int step = 1; step < m; ++step) {
        current = SplineBasis(current.breakpoints(), current.degree() - 1);
        d_mat = deriv_step_matrix(current) * d_mat;
    }
    return d_mat;
}

Matrix gram_matrix(const SplineBasis& basis) {
    const int d = basis.degree();
    const int k = basis.dim();
    const auto rule = gauss_legendre(d + 1);  // exact for degree 2d integrands
    Matrix g = Matrix::Zero(k, k);
    const auto& bp = basis.breakpoints();
    double window[32];
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        const double mid = 0.5 * (bp[s] + bp[s + 1]);
        const double half = 0.5 * (bp[s + 1] - bp[s]);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double x = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q];
            const int first = basis.eval_nonzero(x, window);
            for (int i = 0; i <= d; ++i) {
                for (int j = 0; j <= d; ++j) {
                    g(first + i, first + j) += w * window[i] * window[j];
                }
            }
        }
    }
    return g;
}

PenaltyMatrix penalty_matrix(const SplineBasis& basis, int m) {
    if (m < 1 || m > basis.degree()) {
        throw OrderExceedsDegree("penalty_matrix: need 1 <= m <= degree");
    }
    const Matrix d_mat = deriv_coef_matrix(basis, m);
    const SplineBasis lower(basis.breakpoints(), basis.degree() - m);
    const Matrix r_mat = gram_matrix(lower);
    Matrix delta = d_mat.transpose() * r_mat * d_mat;
    delta = 0.5 * (delta + delta.transpose()).eval();
    return PenaltyMatrix{m, std::move(delta)};
}

}  // namespace evir
