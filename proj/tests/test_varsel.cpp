#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/varsel.hpp"

using namespace solarcast;

namespace {

// Columns with X^T X = N I, so the lasso has the closed soft-threshold form.
Eigen::MatrixXd orthonormal_design(Eigen::Index n, Eigen::Index d,
                                   std::uint64_t seed) {
    Eigen::MatrixXd raw = testutil::random_matrix(n, d, seed);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
    return std::sqrt(static_cast<double>(n)) * Q;
}

double soft_threshold(double z, double lambda) {
    if (z > lambda) return z - lambda;
    if (z < -lambda) return z + lambda;
    return 0.0;
}

double lasso_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& b, double lambda) {
    double n = static_cast<double>(X.rows());
    return (y - X * b).squaredNorm() / (2.0 * n) + lambda * b.lpNorm<1>();
}

// Frame whose GHI is a clean linear function of Temp; the remaining
// covariates are irrelevant noise. Values stay inside the post-clean ranges.
TimeSeriesFrame signal_frame(std::size_t n, std::uint64_t seed) {
    TimeSeriesFrame f = testutil::make_hourly_frame(n, seed);
    Rng rng = derive_rng(seed, 902);
    for (std::size_t i = 0; i < n; ++i) {
        double temp = 10.0 + 25.0 * rand_uniform(rng);
        f.covariates[0][i] = temp;
        f.covariates[1][i] = 30.0 + 40.0 * rand_uniform(rng);
        f.covariates[2][i] = 1.0 + 9.0 * rand_uniform(rng);
        f.covariates[3][i] = 870.0 + 20.0 * rand_uniform(rng);
        f.covariates[7][i] = 2.0 + 12.0 * rand_uniform(rng);
        f.ghi[i] = std::max(0.0, 20.0 * temp + 2.0 * rand_normal(rng));
    }
    return f;
}

}  // namespace

TEST_SUITE("varsel") {

TEST_CASE("lasso at zero penalty is least squares") {
    Eigen::MatrixXd X = testutil::random_matrix(80, 4, 120);
    Eigen::VectorXd beta_true(4);
    beta_true << 1.0, -2.0, 0.5, 0.0;
    Rng noise = derive_rng(120, 22);
    Eigen::VectorXd y = X * beta_true;
    for (int i = 0; i < 80; ++i) y(i) += 0.2 * rand_normal(noise);
    Eigen::VectorXd ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    Eigen::VectorXd b = lasso(X, y, 0.0);
    CHECK((b - ols).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lasso above lambda_max is exactly zero") {
    Eigen::MatrixXd X = testutil::random_matrix(50, 3, 121);
    Eigen::VectorXd y = 2.0 * X.col(1);
    double lmax = lasso_lambda_max(X, y);
    double direct = (X.transpose() * y / 50.0).cwiseAbs().maxCoeff();
    CHECK(lmax == doctest::Approx(direct).epsilon(1e-12));
    CHECK(lasso(X, y, lmax).isZero(0.0));
    CHECK(lasso(X, y, lmax * 1.5).isZero(0.0));
    CHECK_FALSE(lasso(X, y, lmax * 0.5).isZero(0.0));
}

TEST_CASE("lasso on an orthonormal design soft-thresholds the OLS fit") {
    const int n = 64;
    Eigen::MatrixXd X = orthonormal_design(n, 3, 122);
    Eigen::VectorXd beta_true(3);
    beta_true << 2.0, -0.3, 0.05;
    Rng noise = derive_rng(122, 23);
    Eigen::VectorXd y = X * beta_true;
    for (int i = 0; i < n; ++i) y(i) += 0.1 * rand_normal(noise);
    for (double lambda : {0.02, 0.2, 1.0}) {
        Eigen::VectorXd b = lasso(X, y, lambda);
        Eigen::VectorXd corr = X.transpose() * y / static_cast<double>(n);
        for (int j = 0; j < 3; ++j)
            CHECK(b(j) ==
                  doctest::Approx(soft_threshold(corr(j), lambda)).epsilon(1e-8));
    }
}

TEST_CASE("lasso path: l1 norm shrinks as the penalty grows") {
    Eigen::MatrixXd X = testutil::random_matrix(60, 5, 123);
    Eigen::VectorXd y = X.col(0) + 0.5 * X.col(2) - X.col(4);
    double prev = std::numeric_limits<double>::infinity();
    for (double lambda : {0.01, 0.05, 0.2, 0.8}) {
        double norm = lasso(X, y, lambda).lpNorm<1>();
        CHECK(norm <= prev + 1e-10);
        prev = norm;
    }
}

TEST_CASE("lasso solution is a local minimum of its objective") {
    Eigen::MatrixXd X = testutil::random_matrix(40, 3, 124);
    Eigen::VectorXd y = X.col(0) - 2.0 * X.col(1);
    const double lambda = 0.15;
    Eigen::VectorXd b = lasso(X, y, lambda);
    double at = lasso_objective(X, y, b, lambda);
    Rng rng = derive_rng(124, 24);
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd probe = b;
        for (int j = 0; j < 3; ++j) probe(j) += 0.02 * rand_normal(rng);
        CHECK(lasso_objective(X, y, probe, lambda) >= at - 1e-10);
    }
}

TEST_CASE("elastic net reductions: pure l1 and pure ridge") {
    Eigen::MatrixXd X = testutil::random_matrix(70, 4, 125);
    Eigen::VectorXd y = X.col(0) + X.col(3);
    const double lambda = 0.1;
    Eigen::VectorXd as_lasso = elastic_net(X, y, lambda, 1.0);
    CHECK((as_lasso - lasso(X, y, lambda)).cwiseAbs().maxCoeff() < 1e-8);

    Eigen::VectorXd as_ridge = elastic_net(X, y, lambda, 0.0);
    Eigen::MatrixXd lhs = X.transpose() * X +
                          70.0 * lambda * Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd closed = lhs.ldlt().solve(X.transpose() * y);
    CHECK((as_ridge - closed).cwiseAbs().maxCoeff() < 1e-6);

    Eigen::VectorXd no_penalty = elastic_net(X, y, 0.0, 0.5);
    Eigen::VectorXd ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    CHECK((no_penalty - ols).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("select: every method finds the single true predictor") {
    TimeSeriesFrame frame = signal_frame(600, 126);
    DatasetSplit ds = split(frame, 0.8);
    SelectionConfig cfg;
    cfg.seed = 5;
    for (SelectionMethod method : {SelectionMethod::kLasso,
                                   SelectionMethod::kElasticNet,
                                   SelectionMethod::kGbr}) {
        SelectionResult res = select(method, ds, cfg);
        INFO("method = " << res.method);
        CHECK(std::find(res.selected.begin(), res.selected.end(), "Temp") !=
              res.selected.end());
        CHECK(res.mae >= 0.0);
        CHECK(res.mae < 10.0);  // noise scale is ~2 W/m^2
        CHECK(res.weights.size() == kCovariateNames.size());
    }
}

TEST_CASE("evaluate: constant target gives zero MAE") {
    TimeSeriesFrame frame = testutil::make_hourly_frame(100, 127);
    for (double& g : frame.ghi) g = 300.0;
    DatasetSplit ds = split(frame, 0.8);
    double mae = evaluate_selection({"Temp"}, ds);
    CHECK(mae == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("evaluate: correct selection beats noise scale and is deterministic") {
    TimeSeriesFrame frame = signal_frame(400, 128);
    DatasetSplit ds = split(frame, 0.75);
    double a = evaluate_selection({"Temp"}, ds);
    double b = evaluate_selection({"Temp"}, ds);
    CHECK(a == b);
    CHECK(a < 5.0);
    CHECK(evaluate_selection({"RH"}, ds) > a);
    CHECK_THROWS_AS(evaluate_selection({}, ds), ArgumentError);
}

}  // TEST_SUITE
