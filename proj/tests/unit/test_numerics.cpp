#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evir/numerics.hpp"
#include "evir/random.hpp"

using namespace evir;

namespace {

Matrix random_spd(int k, RandomStream& stream) {
    Matrix a(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) a(i, j) = stream.uniform(-1.0, 1.0);
    }
    return a * a.transpose() + 0.5 * Matrix::Identity(k, k);
}

// Independent oracle: Gauss-Jordan inversion with full pivoting, written
// without reference to solve_spd's factorization.
Matrix gauss_jordan_inverse(Matrix a) {
    const int k = static_cast<int>(a.rows());
    Matrix inv = Matrix::Identity(k, k);
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        a.row(col).swap(a.row(pivot));
        inv.row(col).swap(inv.row(pivot));
        const double d = a(col, col);
        a.row(col) /= d;
        inv.row(col) /= d;
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            a.row(r) -= f * a.row(col);
            inv.row(r) -= f * inv.row(col);
        }
    }
    return inv;
}

}  // namespace

TEST_CASE("solve_spd identity and diagonal") {
    Vector rhs(2);
    rhs << 3, 4;
    CHECK(solve_spd({Matrix::Identity(2, 2), rhs}).isApprox(rhs, 1e-15));

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2;
    d(1, 1) = 4;
    Vector rhs2(2);
    rhs2 << 2, 8;
    Vector expect(2);
    expect << 1, 2;
    CHECK(solve_spd({d, rhs2}).isApprox(expect, 1e-15));
}

TEST_CASE("solve_spd matches an independent explicit inverse") {
    RandomStream stream(42);
    const Matrix a = random_spd(20, stream);
    Vector rhs(20);
    for (int i = 0; i < 20; ++i) rhs(i) = stream.uniform(-3.0, 3.0);
    const Vector x = solve_spd({a, rhs});
    const Vector oracle = gauss_jordan_inverse(a) * rhs;
    CHECK((x - oracle).lpNorm<Eigen::Infinity>() <= 1e-9);
}

TEST_CASE("solve_spd residual contract up to K=200") {
    RandomStream stream(7);
    for (int k : {5, 50, 200}) {
        const Matrix a = random_spd(k, stream);
        Vector rhs(k);
        for (int i = 0; i < k; ++i) rhs(i) = stream.uniform(-5.0, 5.0);
        const Vector x = solve_spd({a, rhs});
        const double resid = (a * x - rhs).lpNorm<Eigen::Infinity>();
        CHECK(resid <= 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("solve_spd rejects singular matrices") {
    Matrix a(2, 2);
    a << 1, 1, 1, 1;  // rank 1
    Vector rhs(2);
    rhs << 1, 1;
    CHECK_THROWS_AS(solve_spd({a, rhs}), NotPositiveDefinite);
}

TEST_CASE("empirical_quantile type-7 examples") {
    CHECK(empirical_quantile({1, 2, 3, 4, 5}, 0.5) == doctest::Approx(3.0));
    CHECK(empirical_quantile({1, 3}, 0.25) == doctest::Approx(1.5));
    CHECK(empirical_quantile({10, 20, 30, 40}, 1 - 1e-9) == doctest::Approx(40.0));
    CHECK_THROWS_AS(empirical_quantile({}, 0.5), EmptyInput);
}

TEST_CASE("empirical_quantile monotone in level") {
    RandomStream stream(3);
    std::vector<double> v(37);
    for (auto& x : v) x = stream.uniform(0.0, 10.0);
    double prev = -1.0;
    for (double level = 0.01; level < 1.0; level += 0.01) {
        const double q = empirical_quantile(v, level);
        CHECK(q >= prev);
        prev = q;
    }
}

TEST_CASE("gauss_legendre low orders") {
    const auto g1 = gauss_legendre(1);
    REQUIRE(g1.nodes.size() == 1);
    CHECK(g1.nodes[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(g1.weights[0] == doctest::Approx(2.0).epsilon(1e-14));

    const auto g2 = gauss_legendre(2);
    REQUIRE(g2.nodes.size() == 2);
    CHECK(std::abs(g2.nodes[0]) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(g2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g2.weights[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre integrates x^8 with order 5") {
    const auto g = gauss_legendre(5);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        acc += g.weights[i] * std::pow(g.nodes[i], 8);
    }
    CHECK(acc == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
}

TEST_CASE("gauss_legendre exactness on monomials") {
    for (int order = 1; order <= 10; ++order) {
        const auto g = gauss_legendre(order);
        double wsum = 0.0;
        for (double w : g.weights) {
            CHECK(w > 0.0);
            wsum += w;
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        for (int deg = 0; deg <= 2 * order - 1; ++deg) {
            double acc = 0.0;
            for (std::size_t i = 0; i < g.nodes.size(); ++i) {
                acc += g.weights[i] * std::pow(g.nodes[i], deg);
            }
            const double truth = (deg % 2 == 1) ? 0.0 : 2.0 / (deg + 1);
            CHECK(std::abs(acc - truth) <= 1e-12);
        }
    }
}

TEST_CASE("RandomStream reproducibility over 1e6 draws") {
    RandomStream a(123456789), b(123456789);
    bool equal = true;
    for (int i = 0; i < 1000000; ++i) {
        if (a.next_u64() != b.next_u64()) {
            equal = false;
            break;
        }
    }
    CHECK(equal);
}

TEST_CASE("RandomStream uniform range and substreams") {
    RandomStream s(9);
    for (int i = 0; i < 1000; ++i) {
        const double u = s.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    RandomStream s1 = s.substream(1);
    RandomStream s2 = s.substream(2);
    CHECK(s1.next_u64() != s2.next_u64());
    // substream derivation depends only on the parent seed, not its state
    RandomStream fresh(9);
    CHECK(fresh.substream(1).next_u64() == RandomStream(9).substream(1).next_u64());
}
