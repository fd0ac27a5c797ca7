#include <doctest.h>

#include <cmath>

#include "evir/simbench.hpp"
#include "evir/single_index.hpp"

using namespace evir;

namespace {

FitConfig small_config() {
    FitConfig config;
    config.basis_dim = 10;
    config.tau = 0.9;
    config.lambda = 0.1;
    return config;
}

}  // namespace

TEST_CASE("phi reparametrization examples") {
    Vector phi = Vector::Zero(2);
    Vector theta = to_theta(phi);
    CHECK(theta(0) == doctest::Approx(1.0));
    CHECK(theta(1) == 0.0);
    CHECK(theta(2) == 0.0);

    Vector t(3);
    t << 0.8, 0.6, 0.0;
    Vector p = to_phi(t);
    CHECK(p(0) == doctest::Approx(0.6));
    CHECK(p(1) == doctest::Approx(0.0));

    Vector bad(2);
    bad << -0.5, std::sqrt(0.75);
    CHECK_THROWS_AS(to_phi(bad), FirstCoordinateNotPositive);
}

TEST_CASE("phi round-trip at the edge of the ball") {
    RandomStream stream(41);
    for (int rep = 0; rep < 20; ++rep) {
        Vector phi(3);
        for (int j = 0; j < 3; ++j) phi(j) = stream.uniform(-1.0, 1.0);
        phi *= 0.9 / phi.norm();
        const Vector back = to_phi(to_theta(phi));
        CHECK((back - phi).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK(std::abs(to_theta(phi).norm() - 1.0) <= 1e-12);
    }
}

TEST_CASE("fit on model (i) recovers the index direction") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(42);
    const Dataset data = sample(model, 2000, stream);
    const SingleIndexFit result = fit(data, small_config());
    CHECK(result.converged);
    CHECK(std::abs(result.theta.norm() - 1.0) <= 1e-12);
    CHECK(result.theta(0) > 0.0);
    CHECK((result.theta - model.theta_true()).norm() <= 0.15);
    CHECK(result.n_exceed > 0);
    CHECK(result.n_total == 2000);
}

TEST_CASE("starting at the minimizer converges immediately") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(43);
    const Dataset data = sample(model, 1000, stream);
    FitConfig config = small_config();
    const SingleIndexFit first = fit(data, config);
    REQUIRE(first.converged);
    config.theta_init = first.theta;
    const SingleIndexFit second = fit(data, config);
    CHECK(second.converged);
    CHECK(second.trace.size() <= 2);
    CHECK((second.theta - first.theta).norm() <= 1e-5);
}

TEST_CASE("stored loss is reproducible from the stored coefficients") {
    const SimModel model = SimModel::make(SimModelId::III, 3);
    RandomStream stream(44);
    const Dataset data = sample(model, 800, stream);
    const FitConfig config = small_config();
    const SingleIndexFit result = fit(data, config);
    REQUIRE(result.converged);

    const Vector thresholds =
        realize_threshold(data, ThresholdSpec::marginal(config.tau));
    const ExceedanceSet exceed = extract_exceedances(data, thresholds);
    const LossContext ctx{&exceed, &result.basis, &result.penalty, result.lambda,
                          data.n()};
    CHECK(std::abs(loss(ctx, result.b, result.theta) - result.final_loss) <= 1e-10);
}

TEST_CASE("theta_step does not increase the unpenalized loss") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(45);
    const Dataset data = sample(model, 1000, stream);
    const Vector thresholds = realize_threshold(data, ThresholdSpec::marginal(0.9));
    const ExceedanceSet exceed = extract_exceedances(data, thresholds);
    const auto [a, b_end] = index_interval(data);
    const SplineBasis basis = make_basis(a, b_end, 7, 3);
    const PenaltyMatrix penalty = penalty_matrix(basis, 2);
    const LossContext ctx0{&exceed, &basis, nullptr, 0.0, data.n()};

    Vector theta = model.theta_true();
    // perturb by a fixed angle toward another direction
    Vector other(3);
    other << 0.2, 0.9, -0.1;
    other.normalize();
    theta = (0.9 * theta + 0.45 * other).normalized();

    auto [b_coef, report] = fit_b(ctx0, theta, default_b_init(ctx0));
    REQUIRE(report.converged);
    const double before = loss(ctx0, b_coef, theta);
    const Vector theta_new = theta_step(ctx0, b_coef, theta);
    const double after = loss(ctx0, b_coef, theta_new);
    CHECK(after <= before + 1e-12);
    // moving strictly closer in angle to the sample minimizer
    const SingleIndexFit full = fit(data, small_config());
    const double angle_before = std::acos(std::min(1.0, theta.dot(full.theta)));
    const double angle_after = std::acos(std::min(1.0, theta_new.dot(full.theta)));
    CHECK(angle_after < angle_before);
}

TEST_CASE("p = 1 fit pins theta to +1") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(46);
    Dataset full = sample(model, 600, stream);
    Dataset data;
    data.y = full.y;
    data.x = full.x.col(0);
    const SingleIndexFit result = fit(data, small_config());
    REQUIRE(result.theta.size() == 1);
    CHECK(result.theta(0) == 1.0);
}

TEST_CASE("covariate permutation permutes theta") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(47);
    const Dataset data = sample(model, 1500, stream);
    Dataset permuted;
    permuted.y = data.y;
    permuted.x.resize(data.n(), 3);
    permuted.x.col(0) = data.x.col(2);
    permuted.x.col(1) = data.x.col(0);
    permuted.x.col(2) = data.x.col(1);
    const SingleIndexFit base = fit(data, small_config());
    const SingleIndexFit perm = fit(permuted, small_config());
    REQUIRE(base.converged);
    REQUIRE(perm.converged);
    Vector expected(3);
    expected << base.theta(2), base.theta(0), base.theta(1);
    CHECK((perm.theta - expected).lpNorm<Eigen::Infinity>() <= 1e-4);
}

TEST_CASE("negated initial direction yields the same fit") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    RandomStream stream(48);
    const Dataset data = sample(model, 1000, stream);
    FitConfig config = small_config();
    config.theta_init = model.theta_true();
    const SingleIndexFit plus = fit(data, config);
    config.theta_init = -model.theta_true();
    const SingleIndexFit minus = fit(data, config);
    CHECK((plus.theta - minus.theta).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(plus.final_loss == minus.final_loss);
}

TEST_CASE("fit is deterministic") {
    const SimModel model = SimModel::make(SimModelId::IV, 3);
    RandomStream stream(49);
    const Dataset data = sample(model, 900, stream);
    const SingleIndexFit one = fit(data, small_config());
    const SingleIndexFit two = fit(data, small_config());
    CHECK((one.theta - two.theta).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((one.b - two.b).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("initial_theta degenerate fallback") {
    Dataset data;
    data.y.resize(20);
    data.x = Matrix::Zero(20, 3);
    for (int i = 0; i < 20; ++i) data.y(i) = 1.0 + 0.1 * i;
    const Vector thr = Vector::Constant(20, 1.5);
    const ExceedanceSet ex = extract_exceedances(data, thr);
    const Vector theta0 = initial_theta(data, ex);
    CHECK(theta0(0) == 1.0);
    CHECK(theta0(1) == 0.0);
    CHECK(theta0(2) == 0.0);
}

TEST_CASE("initial_theta beats the coordinate axis on model (i)") {
    const SimModel model = SimModel::make(SimModelId::I, 3);
    const Vector truth = model.theta_true();
    int wins = 0;
    const int seeds = 11;
    for (int s = 0; s < seeds; ++s) {
        RandomStream stream(100 + s);
        const Dataset data = sample(model, 1000, stream);
        const Vector thr = realize_threshold(data, ThresholdSpec::marginal(0.9));
        const ExceedanceSet ex = extract_exceedances(data, thr);
        const Vector theta0 = initial_theta(data, ex);
        Vector axis = Vector::Zero(3);
        axis(0) = 1.0;
        if (std::acos(std::min(1.0, theta0.dot(truth))) <
            std::acos(std::min(1.0, axis.dot(truth)))) {
            ++wins;
        }
    }
    CHECK(wins > seeds / 2);
}
