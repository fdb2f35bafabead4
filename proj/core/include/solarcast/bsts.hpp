#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "solarcast/quantile.hpp"
#include "solarcast/rng.hpp"
#include "solarcast/timeseries.hpp"

namespace solarcast {

/// Linear-Gaussian state space: local linear trend (level + slope) plus an
/// optional 24-hour dummy seasonal. Disturbance order: level, slope,
/// seasonal (when enabled).
struct StateSpaceSpec {
    bool level = true;
    bool slope = true;
    bool seasonal24 = false;

    Eigen::VectorXd state_noise_var;  // one entry per disturbance
    double obs_noise_var = 1.0;
    double initial_var = 1e7;  // diffuse-ish prior scale on the initial state

    int state_dim() const;
    int disturbance_dim() const;
    Eigen::MatrixXd transition() const;       // T
    Eigen::VectorXd observation() const;      // Z
    Eigen::MatrixXd selection() const;        // R
    void validate() const;
};

struct KalmanState {
    Eigen::VectorXd state_mean;  // one-step-ahead (predicted) mean
    Eigen::MatrixXd state_cov;   // predicted covariance, kept symmetric
    Eigen::VectorXd gain;        // K used in the last update
    double innovation = 0.0;
    double innovation_var = 0.0;
};

/// The update-step algebra in isolation: K = P C^T (C P C^T + R)^-1 and
/// P' = P - K C P for a scalar observation row C.
struct GainUpdate {
    Eigen::VectorXd gain;
    Eigen::MatrixXd updated_cov;
};
GainUpdate kalman_gain_update(const Eigen::MatrixXd& P, const Eigen::VectorXd& C,
                              double R);

/// One predict-then-update cycle. `state` carries the predicted moments for
/// the current time; the result carries them for the next. Non-finite
/// observations are treated as missing (prediction-only step, zero
/// log-likelihood increment).
struct KalmanStepResult {
    KalmanState state;
    double loglik_increment = 0.0;
};
KalmanStepResult kalman_step(const KalmanState& state, const StateSpaceSpec& spec,
                             double observation, const Eigen::VectorXd& regressors,
                             const Eigen::VectorXd& beta);

KalmanState initial_state(const StateSpaceSpec& spec);

struct FilterResult {
    double loglik = 0.0;
    std::vector<double> innovations;
    std::vector<double> innovation_vars;
    std::vector<Eigen::VectorXd> predicted_means;
    std::vector<Eigen::MatrixXd> predicted_covs;
};

/// Filter a whole (regression-adjusted) series.
FilterResult kalman_filter(const StateSpaceSpec& spec,
                           const std::vector<double>& y_adjusted);

/// Smoothed state means E[alpha_t | y] via the backward r-recursion.
std::vector<Eigen::VectorXd> kalman_smooth(const StateSpaceSpec& spec,
                                           const std::vector<double>& y_adjusted);

/// Posterior draw of the full state path (mean-correction simulation
/// smoother).
std::vector<Eigen::VectorXd> sample_states(const StateSpaceSpec& spec,
                                           const std::vector<double>& y_adjusted,
                                           Rng& rng);

struct SpikeSlabPrior {
    Eigen::VectorXd inclusion_prob;   // per coefficient
    Eigen::VectorXd slab_mean;
    Eigen::MatrixXd slab_precision;   // positive definite
    double sigma_shape = 1.0;         // inverse-gamma shape
    double sigma_scale = 1.0;         // inverse-gamma scale (rate)

    static SpikeSlabPrior standard(int dim, double inclusion = 0.5,
                                   double precision = 0.01);
    void validate(int dim) const;
};

struct SpikeSlabDraw {
    Eigen::VectorXi delta;
    Eigen::VectorXd beta;  // exactly zero off-support
    double sigma2 = 1.0;
};

/// One Gibbs scan over the inclusion indicators (beta and sigma^2
/// marginalized), then a conjugate draw of sigma^2 and the on-support
/// coefficients. `delta_state`, when given, threads the chain.
SpikeSlabDraw spike_slab_draw(const Eigen::MatrixXd& design,
                              const Eigen::VectorXd& residual_targets,
                              const SpikeSlabPrior& prior, Rng& rng,
                              Eigen::VectorXi* delta_state = nullptr);

/// Log marginal likelihood log p(y | delta) with beta and sigma^2
/// integrated out under the conjugate prior. Shared by the sampler and by
/// enumeration-based checks.
double spike_slab_log_marginal(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y,
                               const SpikeSlabPrior& prior,
                               const Eigen::VectorXi& delta);

struct BstsMcmcConfig {
    int iterations = 2000;
    int burn_in = 500;
    int thin = 1;
    bool learn_state_vars = true;
    std::uint64_t seed = 0;
};

struct BstsDraw {
    Eigen::VectorXd beta;
    Eigen::VectorXi delta;
    double obs_var = 1.0;
    Eigen::VectorXd state_vars;
    Eigen::VectorXd final_state;  // sampled alpha_N
};

class BstsModel {
public:
    static BstsModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const StateSpaceSpec& spec, const SpikeSlabPrior& prior,
                         const BstsMcmcConfig& mcmc);

    const std::vector<BstsDraw>& draws() const { return draws_; }
    const StateSpaceSpec& spec() const { return spec_; }

    struct Forecast {
        Eigen::MatrixXd draws;  // n_draws x horizon
        Eigen::VectorXd mean() const;
        Eigen::VectorXd variance() const;
        QuantileForecast quantiles(const std::vector<double>& levels) const;
    };

    /// Simulate each retained draw forward `horizon` steps with the given
    /// future regressors.
    Forecast forecast(int horizon, const Eigen::MatrixXd& future_regressors,
                      std::uint64_t seed = 0) const;

    /// Columnar draw archive (one row per draw x parameter) plus JSON
    /// metadata, per the persistence contract.
    void save(const std::string& csv_path, const std::string& meta_path) const;

private:
    StateSpaceSpec spec_;
    SpikeSlabPrior prior_;
    std::vector<BstsDraw> draws_;
};

/// Posterior model weights from log marginal likelihoods and prior model
/// probabilities, computed with max-subtraction.
std::vector<double> bma_weights(const std::vector<double>& log_marginals,
                                const std::vector<double>& priors);

/// Mixture of per-model forecast distributions.
struct MixtureForecast {
    std::vector<BstsModel::Forecast> components;
    std::vector<double> weights;

    Eigen::VectorXd mean() const;
    Eigen::VectorXd variance() const;
};

MixtureForecast bma_predict(std::vector<BstsModel::Forecast> models,
                            const std::vector<double>& weights);

}  // namespace solarcast
