#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "helpers.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/quantile.hpp"

using namespace solarcast;

namespace {

double pinball_objective(const Eigen::VectorXd& y, const Eigen::VectorXd& pred,
                         double tau) {
    double s = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s += pinball(y(i), pred(i), tau);
    return s;
}

double mae(const std::vector<double>& a, const std::vector<double>& b,
           std::size_t begin) {
    double s = 0;
    for (std::size_t i = begin; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size() - begin);
}

}  // namespace

TEST_SUITE("quantile") {

TEST_CASE("pinball: substitutions, positivity, domain") {
    CHECK(pinball(3.0, 3.0, 0.3) == 0.0);
    CHECK(pinball(1.0, 0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pinball(0.0, 1.0, 0.2) == doctest::Approx(2.0 * 0.8 * 1.0).epsilon(1e-15));
    CHECK(pinball(2.0, 1.0, 0.2) == doctest::Approx(2.0 * 0.2 * 1.0).epsilon(1e-15));
    Rng rng = derive_rng(130, 25);
    for (int i = 0; i < 200; ++i) {
        double y = rand_normal(rng), q = rand_normal(rng);
        double tau = 0.05 + 0.9 * rand_uniform(rng);
        double loss = pinball(y, q, tau);
        CHECK(loss >= 0.0);
        if (y != q) CHECK(loss > 0.0);
    }
    CHECK_THROWS_AS(pinball(1.0, 0.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(pinball(1.0, 0.0, 1.0), ArgumentError);
}

TEST_CASE("pinball: intercept-only minimizer is the empirical quantile") {
    std::vector<double> sample = {0.3, 1.9, -0.7, 2.4, 0.1, 1.1, 0.8,
                                  -1.2, 3.3, 0.5, 2.0};
    for (double tau : {0.25, 0.5, 0.8}) {
        // Dense grid search over the constant forecast q.
        double best_q = 0, best_loss = std::numeric_limits<double>::infinity();
        for (double q = -2.0; q <= 4.0; q += 1e-4) {
            double loss = 0;
            for (double y : sample) loss += pinball(y, q, tau);
            if (loss < best_loss) {
                best_loss = loss;
                best_q = q;
            }
        }
        std::vector<double> sorted = sample;
        std::sort(sorted.begin(), sorted.end());
        // Empirical tau-quantile: any minimizer lies at an order statistic.
        double order_stat =
            sorted[static_cast<std::size_t>(std::ceil(tau * sorted.size())) - 1];
        CHECK(std::abs(best_q - order_stat) < 2e-4);
    }
}

TEST_CASE("default tau grid spans 0.05..0.95 in steps of 0.05") {
    std::vector<double> grid = default_tau_grid();
    REQUIRE(grid.size() == 19);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i] == doctest::Approx(0.05 * (i + 1)).epsilon(1e-12));
}

TEST_CASE("rearrange sorts each time row and median interpolates") {
    QuantileForecast qf;
    qf.levels = {0.25, 0.5, 0.75};
    qf.values.resize(2, 3);
    qf.values << 3.0, 1.0, 2.0, 0.0, 5.0, 4.0;
    qf.rearrange();
    CHECK(qf.values(0, 0) == 1.0);
    CHECK(qf.values(0, 1) == 2.0);
    CHECK(qf.values(0, 2) == 3.0);
    CHECK(qf.values(1, 2) == 5.0);
    std::vector<double> med = qf.median();
    CHECK(med[0] == 2.0);
    CHECK(med[1] == 4.0);

    // Interpolated median when 0.5 is off the grid.
    QuantileForecast off;
    off.levels = {0.4, 0.6};
    off.values.resize(1, 2);
    off.values << 10.0, 20.0;
    CHECK(off.median()[0] == doctest::Approx(15.0).epsilon(1e-12));
}

TEST_CASE("lqr: intercept-only median is the sample median") {
    Eigen::VectorXd y(7);
    y << 4.0, -1.0, 2.0, 7.0, 0.5, 3.0, 2.5;
    Eigen::MatrixXd X(7, 0);
    LqrModel m = fit_lqr(X, y, {0.5});
    CHECK(m.coef(0, 0) == doctest::Approx(2.5).epsilon(1e-5));
}

TEST_CASE("lqr: N=6 single covariate matches the basic-solution oracle") {
    Eigen::VectorXd x(6), y(6);
    x << 0.0, 1.0, 2.0, 3.0, 4.0, 5.0;
    y << 0.3, 1.4, 1.9, 3.5, 3.8, 5.6;
    Eigen::MatrixXd X = x;
    const double tau = 0.5;

    // The median-regression minimizer interpolates two observations:
    // enumerate every pair and take the best line.
    double best = std::numeric_limits<double>::infinity();
    double best_b0 = 0, best_b1 = 0;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            double b1 = (y(j) - y(i)) / (x(j) - x(i));
            double b0 = y(i) - b1 * x(i);
            Eigen::VectorXd pred = b0 + (b1 * x.array());
            double loss = pinball_objective(y, pred, tau);
            if (loss < best) {
                best = loss;
                best_b0 = b0;
                best_b1 = b1;
            }
        }

    LqrModel m = fit_lqr(X, y, {tau});
    Eigen::VectorXd fit_pred = m.predict_level(X, 0);
    CHECK(pinball_objective(y, fit_pred, tau) <= best + 1e-6);
    CHECK(m.coef(0, 0) == doctest::Approx(best_b0).epsilon(1e-3));
    CHECK(m.coef(1, 0) == doctest::Approx(best_b1).epsilon(1e-3));
}

TEST_CASE("lqr: duplicating every row leaves the fit unchanged") {
    Eigen::MatrixXd X = testutil::random_matrix(30, 2, 131);
    Eigen::VectorXd y = X.col(0) - 0.5 * X.col(1);
    Rng noise = derive_rng(131, 26);
    for (int i = 0; i < 30; ++i) y(i) += 0.3 * rand_normal(noise);
    LqrModel single = fit_lqr(X, y, {0.5});

    Eigen::MatrixXd X2(60, 2);
    Eigen::VectorXd y2(60);
    X2 << X, X;
    y2 << y, y;
    LqrModel doubled = fit_lqr(X2, y2, {0.5});
    CHECK((single.coef - doubled.coef).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("lqr: median coverage on the training window is near one half") {
    Eigen::MatrixXd X = testutil::random_matrix(300, 2, 132);
    Rng noise = derive_rng(132, 27);
    Eigen::VectorXd y = 2.0 * X.col(0);
    for (int i = 0; i < 300; ++i) y(i) += rand_normal(noise);
    LqrModel m = fit_lqr(X, y, {0.5});
    Eigen::VectorXd pred = m.predict_level(X, 0);
    double below = 0;
    for (int i = 0; i < 300; ++i) below += (y(i) < pred(i)) ? 1.0 : 0.0;
    double frac = below / 300.0;
    CHECK(frac >= 0.4);
    CHECK(frac <= 0.6);
}

TEST_CASE("aqr: no smooth terms reduces to the linear fit") {
    Eigen::MatrixXd X = testutil::random_matrix(80, 2, 133);
    Eigen::VectorXd y = X.col(0) + 2.0 * X.col(1);
    AqrSpec spec;
    spec.smooth = {false, false};
    AdditiveQuantileModel aqr = fit_aqr(X, y, spec, {0.5});
    LqrModel lqr = fit_lqr(X, y, {0.5});
    Eigen::VectorXd pa = aqr.predict(X).values.col(0);
    Eigen::VectorXd pl = lqr.predict_level(X, 0);
    CHECK((pa - pl).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("aqr: recovers a sine curve within 0.1 RMS") {
    const int n = 300;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    Rng noise = derive_rng(134, 28);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = -3.0 + 6.0 * i / (n - 1.0);
        y(i) = std::sin(X(i, 0)) + 0.05 * rand_normal(noise);
    }
    AqrSpec spec;
    spec.smooth = {true};
    spec.basis_dim = 10;
    spec.penalty = 0.1;
    AdditiveQuantileModel m = fit_aqr(X, y, spec, {0.5});
    Eigen::VectorXd fitted = m.predict(X).values.col(0);
    double sq = 0;
    for (int i = 0; i < n; ++i) {
        double err = fitted(i) - std::sin(X(i, 0));
        sq += err * err;
    }
    CHECK(std::sqrt(sq / n) < 0.1);

    // The richer class fits the training pinball loss at least as well as a
    // straight line through the same data.
    LqrModel line = fit_lqr(X, y, {0.5});
    CHECK(pinball_objective(y, fitted, 0.5) <=
          pinball_objective(y, line.predict_level(X, 0), 0.5) + 1e-8);

    AqrSpec bad = spec;
    bad.basis_dim = 3;
    CHECK_THROWS_AS(fit_aqr(X, y, bad, {0.5}), ArgumentError);
}

TEST_CASE("plaqr reductions: all-linear is lqr, all-smooth is aqr") {
    Eigen::MatrixXd X = testutil::random_matrix(100, 2, 135);
    Eigen::VectorXd y = 0.5 * X.col(0) - X.col(1);
    Rng noise = derive_rng(135, 29);
    for (int i = 0; i < 100; ++i) y(i) += 0.1 * rand_normal(noise);

    AdditiveQuantileModel linear =
        fit_plaqr(X, y, {false, false}, 10, 1.0, {0.5});
    LqrModel lqr = fit_lqr(X, y, {0.5});
    CHECK((linear.predict(X).values.col(0) - lqr.predict_level(X, 0))
              .cwiseAbs()
              .maxCoeff() < 1e-6);

    AdditiveQuantileModel smooth = fit_plaqr(X, y, {true, true}, 8, 0.5, {0.5});
    AqrSpec spec;
    spec.smooth = {true, true};
    spec.basis_dim = 8;
    spec.penalty = 0.5;
    AdditiveQuantileModel aqr = fit_aqr(X, y, spec, {0.5});
    CHECK((smooth.predict(X).values.col(0) - aqr.predict(X).values.col(0))
              .cwiseAbs()
              .maxCoeff() < 1e-6);
}

TEST_CASE("plaqr: linear slope recovered in a partially linear truth") {
    const int n = 400;
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    Rng rng = derive_rng(136, 30);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 2.0 * rand_uniform(rng) - 1.0;
        X(i, 1) = -3.0 + 6.0 * rand_uniform(rng);
        y(i) = 2.0 * X(i, 0) + std::sin(X(i, 1)) + 0.05 * rand_normal(rng);
    }
    AdditiveQuantileModel m = fit_plaqr(X, y, {false, true}, 10, 0.1, {0.5});

    // Probe the fitted partial derivative in the linear coordinate.
    Eigen::MatrixXd lo(50, 2), hi(50, 2);
    Rng probe = derive_rng(137, 31);
    for (int i = 0; i < 50; ++i) {
        double x1 = 2.0 * rand_uniform(probe) - 1.0;
        double x2 = -2.5 + 5.0 * rand_uniform(probe);
        lo.row(i) << x1, x2;
        hi.row(i) << x1 + 0.25, x2;
    }
    Eigen::VectorXd slope =
        (m.predict(hi).values.col(0) - m.predict(lo).values.col(0)) / 0.25;
    CHECK(std::abs(slope.mean() - 2.0) < 0.1);
}

TEST_CASE("qrnn: constant target reproduced at every level") {
    Eigen::MatrixXd X = testutil::random_matrix(60, 2, 138);
    Eigen::VectorXd y = Eigen::VectorXd::Constant(60, 7.5);
    QrnnConfig cfg;
    cfg.hidden = 4;
    cfg.iters = 2500;
    cfg.seed = 3;
    QrnnModel m = fit_qrnn(X, y, {0.1, 0.5, 0.9}, cfg);
    QuantileForecast qf = m.predict(X);
    for (Eigen::Index t = 0; t < qf.values.rows(); ++t)
        for (Eigen::Index l = 0; l < qf.values.cols(); ++l)
            CHECK(std::abs(qf.values(t, l) - 7.5) < 1e-3);
}

TEST_CASE("qrnn: near-linear regime tracks the linear quantile fit") {
    const int n = 250;
    Eigen::MatrixXd X(n, 1);
    Eigen::VectorXd y(n);
    Rng rng = derive_rng(139, 32);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 2.0 * rand_uniform(rng) - 1.0;
        y(i) = 0.5 + 1.0 * X(i, 0) + 0.01 * rand_normal(rng);
    }
    QrnnConfig cfg;
    cfg.hidden = 1;
    cfg.l1 = 0.0;
    cfg.l2 = 0.0;
    cfg.iters = 8000;
    cfg.restarts = 5;
    cfg.seed = 11;
    QrnnModel net = fit_qrnn(X, y, {0.5}, cfg);
    LqrModel lqr = fit_lqr(X, y, {0.5});
    Eigen::VectorXd pn = net.predict_level(X, 0);
    Eigen::VectorXd pl = lqr.predict_level(X, 0);
    double rms = std::sqrt((pn - pl).squaredNorm() / n);
    double spread = std::sqrt((y.array() - y.mean()).square().sum() / n);
    CHECK(rms < 0.02 * spread + 1e-4);
}

TEST_CASE("qrnn: heavy l1 penalty crushes the hidden weights") {
    Eigen::MatrixXd X = testutil::random_matrix(80, 2, 140);
    Eigen::VectorXd y = X.col(0).array().tanh();
    QrnnConfig free;
    free.hidden = 4;
    free.l1 = 0.0;
    free.l2 = 0.0;
    free.iters = 800;
    free.seed = 7;
    QrnnConfig heavy = free;
    heavy.l1 = 1e4;
    QrnnModel a = fit_qrnn(X, y, {0.5}, free);
    QrnnModel b = fit_qrnn(X, y, {0.5}, heavy);
    double free_norm = a.hidden_w[0].norm();
    double heavy_norm = b.hidden_w[0].norm();
    CHECK(heavy_norm < 1e-2 * free_norm);

    QrnnConfig bad = free;
    bad.hidden = 0;
    CHECK_THROWS_AS(fit_qrnn(X, y, {0.5}, bad), ArgumentError);
}

TEST_CASE("combine: single expert median is affine in the expert") {
    const int n = 240;
    Rng rng = derive_rng(141, 33);
    std::vector<double> actual(n), expert(n);
    for (int i = 0; i < n; ++i) {
        double day = std::max(0.0, std::sin((i % 24 - 6) * M_PI / 12.0));
        actual[i] = 800.0 * day;
        expert[i] = 700.0 * day + 20.0 * rand_normal(rng);
    }
    CombineOptions opts;
    CombineResult res =
        combine({{"gp", expert}}, actual, CombineMethod::kQra, opts);
    CHECK(res.eval_begin == 120);
    CHECK(res.expert_names == std::vector<std::string>{"gp"});
    REQUIRE(res.forecast.times() == 120);

    // Regress the combined median on the expert over the evaluation rows;
    // a single-covariate LQR median is exactly affine in its covariate.
    std::vector<double> med = res.forecast.median();
    Eigen::MatrixXd D(120, 2);
    Eigen::VectorXd target(120);
    for (int i = 0; i < 120; ++i) {
        D(i, 0) = 1.0;
        D(i, 1) = expert[res.eval_begin + i];
        target(i) = med[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd ab = (D.transpose() * D).ldlt().solve(D.transpose() * target);
    CHECK((D * ab - target).cwiseAbs().maxCoeff() < 1e-6);

    // Monotone level grid on every output row.
    for (std::size_t t = 0; t < res.forecast.times(); ++t)
        for (std::size_t l = 1; l < res.forecast.levels.size(); ++l)
            CHECK(res.forecast.values(static_cast<Eigen::Index>(t),
                                      static_cast<Eigen::Index>(l)) >=
                  res.forecast.values(static_cast<Eigen::Index>(t),
                                      static_cast<Eigen::Index>(l - 1)));
}

TEST_CASE("combine: duplicated expert column does not move the forecast") {
    const int n = 200;
    Rng rng = derive_rng(142, 34);
    std::vector<double> actual(n), expert(n);
    for (int i = 0; i < n; ++i) {
        double day = std::max(0.0, std::sin((i % 24 - 6) * M_PI / 12.0));
        actual[i] = 600.0 * day + 5.0 * rand_normal(rng);
        actual[i] = std::max(0.0, actual[i]);
        expert[i] = 550.0 * day + 15.0 * rand_normal(rng);
    }
    CombineOptions opts;
    CombineResult solo =
        combine({{"a", expert}}, actual, CombineMethod::kQra, opts);
    CombineResult dup = combine({{"a", expert}, {"b", expert}}, actual,
                                CombineMethod::kQra, opts);
    std::vector<double> m1 = solo.forecast.median();
    std::vector<double> m2 = dup.forecast.median();
    for (std::size_t i = 0; i < m1.size(); ++i)
        CHECK(std::abs(m1[i] - m2[i]) < 1e-5);
}

TEST_CASE("combine: QRA does not lose to the best expert by more than 10%") {
    const int n = 480;
    Rng rng = derive_rng(143, 35);
    std::vector<double> actual(n), biased(n), noisy(n);
    for (int i = 0; i < n; ++i) {
        double day = std::max(0.0, std::sin((i % 24 - 6) * M_PI / 12.0));
        actual[i] = std::max(0.0, 850.0 * day + 8.0 * rand_normal(rng));
        biased[i] = 0.7 * actual[i] + 30.0 * day;  // systematic shrink
        noisy[i] = actual[i] + 60.0 * rand_normal(rng);
    }
    CombineOptions opts;
    CombineResult res = combine({{"biased", biased}, {"noisy", noisy}}, actual,
                                CombineMethod::kQra, opts);
    std::vector<double> combined(actual.begin() + res.eval_begin, actual.end());
    std::vector<double> med = res.forecast.median();
    double combined_mae = 0;
    for (std::size_t i = 0; i < med.size(); ++i)
        combined_mae += std::abs(med[i] - actual[res.eval_begin + i]);
    combined_mae /= static_cast<double>(med.size());

    double best = std::min(mae(biased, actual, res.eval_begin),
                           mae(noisy, actual, res.eval_begin));
    CHECK(combined_mae <= 1.1 * best);
    (void)combined;
}

TEST_CASE("combine: qrnn and plaqr methods run and stay monotone") {
    const int n = 160;
    Rng rng = derive_rng(144, 36);
    std::vector<double> actual(n), expert(n);
    for (int i = 0; i < n; ++i) {
        double day = std::max(0.0, std::sin((i % 24 - 6) * M_PI / 12.0));
        actual[i] = std::max(0.0, 500.0 * day + 5.0 * rand_normal(rng));
        expert[i] = 450.0 * day + 20.0 * rand_normal(rng);
    }
    CombineOptions opts;
    opts.levels = {0.1, 0.5, 0.9};
    for (CombineMethod method : {CombineMethod::kQrnn, CombineMethod::kPlaqr}) {
        CombineResult res = combine({{"e", expert}}, actual, method, opts);
        REQUIRE(res.forecast.times() == static_cast<std::size_t>(n) - res.eval_begin);
        for (std::size_t t = 0; t < res.forecast.times(); ++t) {
            CHECK(res.forecast.values(static_cast<Eigen::Index>(t), 0) <=
                  res.forecast.values(static_cast<Eigen::Index>(t), 1));
            CHECK(res.forecast.values(static_cast<Eigen::Index>(t), 1) <=
                  res.forecast.values(static_cast<Eigen::Index>(t), 2));
        }
    }
}

TEST_CASE("combine: argument validation") {
    std::vector<double> actual(50, 1.0);
    CombineOptions opts;
    CHECK_THROWS_AS(combine({}, actual, CombineMethod::kQra, opts),
                    ArgumentError);
    CHECK_THROWS_AS(combine({{"e", std::vector<double>(49, 1.0)}}, actual,
                            CombineMethod::kQra, opts),
                    ArgumentError);
    std::vector<double> tiny(3, 1.0);
    CHECK_THROWS_AS(combine({{"e", tiny}}, tiny, CombineMethod::kQra, opts),
                    ArgumentError);
}

}  // TEST_SUITE
