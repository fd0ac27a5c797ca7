#include <doctest.h>

#include <cmath>
#include <vector>

#include "evir/random.hpp"
#include "evir/splines.hpp"

using namespace evir;

namespace {

// Independent oracle for the penalty: reconstruct the spline span by span as
// an explicit polynomial from eval() samples, differentiate the polynomial
// coefficients analytically, and integrate the square in closed form.
double penalty_quadrature_oracle(const SplineBasis& basis, const Vector& coefs, int m) {
    const int d = basis.degree();
    const auto& bp = basis.breakpoints();
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        const double u = bp[s], v = bp[s + 1], h = v - u;
        // Sample strictly inside the span so clamping never triggers.
        const int npts = d + 1;
        Matrix vand(npts, npts);
        Vector rhs(npts);
        for (int k = 0; k < npts; ++k) {
            const double t = u + h * (k + 0.5) / npts;
            const double local = t - u;
            double pw = 1.0;
            for (int j = 0; j < npts; ++j) {
                vand(k, j) = pw;
                pw *= local;
            }
            rhs(k) = basis.eval(t).dot(coefs);
        }
        Vector poly = vand.fullPivLu().solve(rhs);
        // m-fold analytic differentiation of the local polynomial.
        for (int rep = 0; rep < m; ++rep) {
            Vector next = Vector::Zero(poly.size());
            for (int j = 1; j < poly.size(); ++j) next(j - 1) = j * poly(j);
            poly = next;
        }
        // Exact integral of the squared polynomial over [0, h].
        for (int j = 0; j < poly.size(); ++j) {
            for (int k = 0; k < poly.size(); ++k) {
                total += poly(j) * poly(k) * std::pow(h, j + k + 1) / (j + k + 1);
            }
        }
    }
    return total;
}

// First-difference matrix mapping b (length k) to adjacent differences.
Matrix first_difference(int k) {
    Matrix d = Matrix::Zero(k - 1, k);
    for (int i = 0; i + 1 < k; ++i) {
        d(i, i) = -1.0;
        d(i, i + 1) = 1.0;
    }
    return d;
}

}  // namespace

TEST_CASE("make_basis dimensions") {
    CHECK(make_basis(0.0, 1.0, 3, 3).dim() == 6);
    CHECK(make_basis(-1.0, 1.0, 2, 1).dim() == 3);
    CHECK(make_basis(-2.0, 2.0, 37, 3).dim() == 40);
    CHECK_THROWS_AS(make_basis(1.0, 0.0, 3, 3), InvalidInterval);
    CHECK_THROWS_AS(make_basis(0.0, 1.0, 1, 3), TooFewKnots);
}

TEST_CASE("degree-0 basis is the span indicator") {
    const SplineBasis basis({0.0, 0.5, 1.0}, 0);
    REQUIRE(basis.dim() == 2);
    const Vector at = basis.eval(0.25);
    CHECK(at(0) == doctest::Approx(1.0));
    CHECK(at(1) == doctest::Approx(0.0));
}

TEST_CASE("degree-1 hat functions by hand") {
    const SplineBasis basis({0.0, 0.5, 1.0}, 1);
    REQUIRE(basis.dim() == 3);
    const Vector at = basis.eval(0.25);
    CHECK(at(0) == doctest::Approx(0.5));
    CHECK(at(1) == doctest::Approx(0.5));
    CHECK(at(2) == doctest::Approx(0.0));
}

TEST_CASE("partition of unity across random configurations") {
    RandomStream stream(11);
    for (int cfg = 0; cfg < 20; ++cfg) {
        const double a = stream.uniform(-5.0, 0.0);
        const double b = a + stream.uniform(0.5, 5.0);
        const int k0 = 2 + static_cast<int>(stream.uniform_below(15));
        const int d = 1 + static_cast<int>(stream.uniform_below(4));
        const SplineBasis basis = make_basis(a, b, k0, d);
        CHECK(basis.dim() == k0 + d);
        for (int rep = 0; rep < 100; ++rep) {
            const Vector values = basis.eval(stream.uniform(a, b));
            CHECK(std::abs(values.sum() - 1.0) <= 1e-12);
            CHECK(values.minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("local support: at most degree+1 nonzero entries") {
    const SplineBasis basis = make_basis(0.0, 1.0, 8, 3);
    RandomStream stream(4);
    for (int rep = 0; rep < 200; ++rep) {
        const Vector values = basis.eval(stream.uniform(0.0, 1.0));
        int nonzero = 0;
        for (int j = 0; j < basis.dim(); ++j) {
            if (values(j) != 0.0) ++nonzero;
        }
        CHECK(nonzero <= basis.degree() + 1);
    }
}

TEST_CASE("out-of-range evaluation clamps with a flag") {
    const SplineBasis basis = make_basis(0.0, 1.0, 4, 3);
    bool clamped = false;
    const Vector below = basis.eval(-0.5, &clamped);
    CHECK(clamped);
    CHECK(below.isApprox(basis.eval(0.0)));
    clamped = false;
    const Vector inside = basis.eval(0.3, &clamped);
    CHECK_FALSE(clamped);
    CHECK(std::abs(inside.sum() - 1.0) <= 1e-12);
}

TEST_CASE("derivative of a constant spline is zero") {
    const SplineBasis basis = make_basis(0.0, 2.0, 5, 3);
    const Vector coefs = Vector::Constant(basis.dim(), 3.7);
    const auto [lower, dcoefs] = eval_deriv_coeffs(basis, coefs, 1);
    CHECK(dcoefs.lpNorm<Eigen::Infinity>() <= 1e-14);
    CHECK(lower.degree() == 2);
}

TEST_CASE("derivative of the identity function is one") {
    const SplineBasis basis = make_basis(-1.0, 3.0, 6, 3);
    // Greville abscissae reproduce f(x) = x exactly in a clamped basis.
    const auto& t = basis.knots();
    Vector coefs(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) {
        double acc = 0.0;
        for (int r = 1; r <= basis.degree(); ++r) acc += t[j + r];
        coefs(j) = acc / basis.degree();
    }
    // sanity: the spline itself equals x
    RandomStream stream(5);
    for (int rep = 0; rep < 10; ++rep) {
        const double x = stream.uniform(-1.0, 3.0);
        CHECK(basis.eval(x).dot(coefs) == doctest::Approx(x).epsilon(1e-12));
    }
    const auto [lower, dcoefs] = eval_deriv_coeffs(basis, coefs, 1);
    for (int rep = 0; rep < 10; ++rep) {
        const double x = stream.uniform(-1.0, 3.0);
        CHECK(lower.eval(x).dot(dcoefs) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("derivative recurrences compose") {
    const SplineBasis basis = make_basis(0.0, 1.0, 7, 3);
    RandomStream stream(6);
    Vector coefs(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) coefs(j) = stream.uniform(-2.0, 2.0);
    const auto first = eval_deriv_coeffs(basis, coefs, 1);
    const auto second_via_first = eval_deriv_coeffs(first.first, first.second, 1);
    const auto second = eval_deriv_coeffs(basis, coefs, 2);
    CHECK(second.second.isApprox(second_via_first.second, 1e-12));
    CHECK_THROWS_AS(eval_deriv_coeffs(basis, coefs, 4), OrderExceedsDegree);
}

TEST_CASE("derivative matches central finite differences") {
    const SplineBasis basis = make_basis(0.0, 1.0, 6, 3);
    RandomStream stream(8);
    Vector coefs(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) coefs(j) = stream.uniform(-1.0, 1.0);
    const auto [lower, dcoefs] = eval_deriv_coeffs(basis, coefs, 1);
    const double h = 1e-6;
    for (int rep = 0; rep < 50; ++rep) {
        const double x = stream.uniform(0.05, 0.95);
        const double fd =
            (basis.eval(x + h).dot(coefs) - basis.eval(x - h).dot(coefs)) / (2 * h);
        CHECK(std::abs(fd - lower.eval(x).dot(dcoefs)) <= 1e-6);
    }
}

TEST_CASE("penalty on piecewise-linear hat by hand") {
    const SplineBasis basis({0.0, 0.5, 1.0}, 1);
    const PenaltyMatrix penalty = penalty_matrix(basis, 1);
    Vector b(3);
    b << 0, 1, 0;
    // slopes are +2 then -2, each over length 0.5
    CHECK(b.dot(penalty.matrix * b) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("penalty annihilates polynomials below the order") {
    const SplineBasis basis = make_basis(0.0, 1.0, 9, 3);
    const PenaltyMatrix penalty = penalty_matrix(basis, 2);
    // Linear function via Greville abscissae lies in the order-2 null space.
    const auto& t = basis.knots();
    Vector coefs(basis.dim());
    for (int j = 0; j < basis.dim(); ++j) {
        double acc = 0.0;
        for (int r = 1; r <= basis.degree(); ++r) acc += t[j + r];
        coefs(j) = 2.0 - 3.0 * (acc / basis.degree());
    }
    CHECK(std::abs(coefs.dot(penalty.matrix * coefs)) <= 1e-10 * coefs.squaredNorm());
}

TEST_CASE("penalty is symmetric positive semidefinite") {
    const SplineBasis basis = make_basis(-1.0, 1.0, 8, 3);
    for (int m : {1, 2, 3}) {
        const PenaltyMatrix penalty = penalty_matrix(basis, m);
        CHECK((penalty.matrix - penalty.matrix.transpose()).lpNorm<Eigen::Infinity>() <=
              1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(penalty.matrix);
        const double max_ev = es.eigenvalues().maxCoeff();
        CHECK(es.eigenvalues().minCoeff() >= -1e-10 * max_ev);
        // rank = K - m for strictly increasing interior knots
        int null_dim = 0;
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            if (es.eigenvalues()(i) <= 1e-9 * max_ev) ++null_dim;
        }
        CHECK(null_dim == m);
    }
}

TEST_CASE("penalty quadratic form equals independent quadrature") {
    RandomStream stream(13);
    for (int cfg = 0; cfg < 8; ++cfg) {
        const double a = stream.uniform(-2.0, 0.0);
        const double b_end = a + stream.uniform(1.0, 4.0);
        const int k0 = 3 + static_cast<int>(stream.uniform_below(8));
        const int d = 2 + static_cast<int>(stream.uniform_below(2));
        const SplineBasis basis = make_basis(a, b_end, k0, d);
        for (int m = 1; m <= d; ++m) {
            const PenaltyMatrix penalty = penalty_matrix(basis, m);
            Vector coefs(basis.dim());
            for (int j = 0; j < basis.dim(); ++j) coefs(j) = stream.uniform(-2.0, 2.0);
            const double form = coefs.dot(penalty.matrix * coefs);
            const double oracle = penalty_quadrature_oracle(basis, coefs, m);
            CHECK(std::abs(form - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
        }
    }
}

TEST_CASE("equidistant difference-matrix oracle") {
    // With equidistant breakpoints and coefficients supported away from the
    // clamped boundary, the derivative map reduces to scaled differences:
    // c = h^{-m} D^diff b, so b^T Delta b = h^{-2m} (D^diff b)^T R (D^diff b).
    const int k0 = 20, d = 3;
    const SplineBasis basis = make_basis(0.0, 1.0, k0, d);
    const int K = basis.dim();
    const double h = 1.0 / k0;
    RandomStream stream(17);
    for (int m : {1, 2}) {
        Matrix diff = Matrix::Identity(K, K);
        for (int rep = 0; rep < m; ++rep) {
            diff = (first_difference(K - rep) * diff).eval();
        }
        const PenaltyMatrix penalty = penalty_matrix(basis, m);
        const auto lower = eval_deriv_coeffs(basis, Vector::Zero(K), m).first;
        const Matrix gram = gram_matrix(lower);
        for (int trial = 0; trial < 5; ++trial) {
            Vector b = Vector::Zero(K);
            for (int j = d + m; j < K - d - m; ++j) b(j) = stream.uniform(-1.0, 1.0);
            const Vector db = diff * b / std::pow(h, m);
            // the interior rows dominate; boundary rows act on zeros
            const Vector c = eval_deriv_coeffs(basis, b, m).second;
            CHECK((c - db).lpNorm<Eigen::Infinity>() <= 1e-10);
            const double form = b.dot(penalty.matrix * b);
            const double oracle = db.dot(gram * db);
            CHECK(std::abs(form - oracle) <= 1e-8 * std::max(1.0, std::abs(oracle)));
        }
    }
}
