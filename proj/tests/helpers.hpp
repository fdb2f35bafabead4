#pragma once

// Shared fixtures and independent oracles used across the unit suites and
// the acceptance checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "solarcast/bsts.hpp"
#include "solarcast/rng.hpp"
#include "solarcast/timeseries.hpp"

namespace testutil {

using solarcast::Rng;
using solarcast::TimeSeriesFrame;

/// Hourly frame with n rows of in-range values; GHI follows a clipped
/// diurnal profile so cleaning invariants hold.
inline TimeSeriesFrame make_hourly_frame(std::size_t n, std::uint64_t seed = 42) {
    Rng rng = solarcast::derive_rng(seed, 900);
    TimeSeriesFrame f;
    f.utc_offset_minutes = 120;
    f.provenance = "unit-test";
    const std::int64_t start = solarcast::parse_iso8601("2021-03-01T00:00:00+02:00").first;
    for (std::size_t i = 0; i < n; ++i) {
        f.timestamps.push_back(start + static_cast<std::int64_t>(i) * 3600);
        double hour = static_cast<double>(i % 24);
        double elev = std::sin((hour - 6.0) * M_PI / 12.0);
        f.ghi.push_back(std::max(0.0, 900.0 * elev + 5.0 * solarcast::rand_normal(rng)));
        f.covariates[0].push_back(20.0 + 8.0 * elev + solarcast::rand_normal(rng));  // Temp
        f.covariates[1].push_back(50.0 + 10.0 * std::sin(i * 0.1));                  // RH
        f.covariates[2].push_back(3.0 + std::abs(solarcast::rand_normal(rng)));      // WS
        f.covariates[3].push_back(880.0 + solarcast::rand_normal(rng));              // BP
        f.covariates[4].push_back(std::fmod(10.0 * i, 360.0));                       // WD
        f.covariates[5].push_back(5.0 + 0.1 * (i % 7));                              // WD_Stv
        f.covariates[6].push_back(0.0);                                              // Rain_Tot
        f.covariates[7].push_back(4.0 + std::abs(solarcast::rand_normal(rng)));      // WS_Max
    }
    return f;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index d,
                                     std::uint64_t seed) {
    Rng rng = solarcast::derive_rng(seed, 901);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = solarcast::rand_normal(rng);
    return X;
}

/// Dense joint-Gaussian oracle for a linear-Gaussian state space: builds the
/// exact covariance of (y_1..y_n, alpha_1..alpha_n) from the independent
/// shocks and conditions by dense inversion. Entirely independent of the
/// Kalman recursions under test.
struct DenseStateSpaceOracle {
    // One-step-ahead predicted means E[alpha_t | y_1..y_{t-1}] and the exact
    // joint log-likelihood log p(y_1..y_n).
    std::vector<Eigen::VectorXd> predicted_means;
    std::vector<Eigen::VectorXd> smoothed_means;  // E[alpha_t | y_1..y_n]
    double loglik = 0.0;
};

inline DenseStateSpaceOracle dense_state_space(const solarcast::StateSpaceSpec& spec,
                                               const std::vector<double>& y) {
    const int m = spec.state_dim();
    const int q = spec.disturbance_dim();
    const auto n = static_cast<int>(y.size());
    const Eigen::MatrixXd T = spec.transition();
    const Eigen::MatrixXd R = spec.selection();
    const Eigen::VectorXd Z = spec.observation();

    // Shock vector z = (alpha_1^0, eta_1..eta_{n-1}, eps_1..eps_n), all
    // independent. alpha_1 ~ N(0, initial_var I); alpha_{t+1} = T alpha_t + R eta_t.
    const int nz = m + q * (n - 1) + n;
    Eigen::VectorXd sd(nz);
    int pos = 0;
    for (int i = 0; i < m; ++i) sd(pos++) = std::sqrt(spec.initial_var);
    for (int t = 0; t < n - 1; ++t)
        for (int k = 0; k < q; ++k)
            sd(pos++) = std::sqrt(spec.state_noise_var(k));
    for (int t = 0; t < n; ++t) sd(pos++) = std::sqrt(spec.obs_noise_var);

    // Linear maps alpha_t = A_t z and y_t = Z' alpha_t + eps_t.
    std::vector<Eigen::MatrixXd> A(n);
    A[0] = Eigen::MatrixXd::Zero(m, nz);
    A[0].leftCols(m).setIdentity();
    for (int t = 1; t < n; ++t) {
        A[t] = T * A[t - 1];
        A[t].block(0, m + q * (t - 1), m, q) += R;
    }
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, nz);
    for (int t = 0; t < n; ++t) {
        Y.row(t) = Z.transpose() * A[t];
        Y(t, m + q * (n - 1) + t) += 1.0;
    }

    Eigen::MatrixXd D = sd.array().square().matrix().asDiagonal();
    Eigen::MatrixXd Syy = Y * D * Y.transpose();
    Eigen::VectorXd yv(n);
    for (int t = 0; t < n; ++t) yv(t) = y[t];

    DenseStateSpaceOracle out;
    // Log-likelihood of the full observation vector.
    {
        Eigen::LLT<Eigen::MatrixXd> llt(Syy);
        Eigen::VectorXd sol = llt.solve(yv);
        double log_det = 0;
        for (int i = 0; i < n; ++i) log_det += 2.0 * std::log(llt.matrixL()(i, i));
        out.loglik = -0.5 * (yv.dot(sol) + log_det + n * std::log(2.0 * M_PI));
    }
    out.predicted_means.resize(static_cast<std::size_t>(n));
    out.smoothed_means.resize(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        // E[alpha_t | y_1..y_{t-1}] (prior mean, zero, when t = 0).
        if (t == 0) {
            out.predicted_means[0] = Eigen::VectorXd::Zero(m);
        } else {
            Eigen::MatrixXd Sxy = A[t] * D * Y.topRows(t).transpose();
            Eigen::MatrixXd Spp = Syy.topLeftCorner(t, t);
            out.predicted_means[static_cast<std::size_t>(t)] =
                Sxy * Spp.ldlt().solve(yv.head(t));
        }
        Eigen::MatrixXd Sxy_all = A[t] * D * Y.transpose();
        out.smoothed_means[static_cast<std::size_t>(t)] =
            Sxy_all * Syy.ldlt().solve(yv);
    }
    return out;
}

/// Two-sided Kolmogorov-Smirnov statistic of a sample against an analytic CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> sample, Cdf cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return d;
}

}  // namespace testutil
