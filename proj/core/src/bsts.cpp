#include "solarcast/bsts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "solarcast/errors.hpp"

namespace solarcast {

int StateSpaceSpec::state_dim() const {
    int d = 0;
    if (level) d += 1;
    if (slope) d += 1;
    if (seasonal24) d += 23;
    return d;
}

int StateSpaceSpec::disturbance_dim() const {
    return (level ? 1 : 0) + (slope ? 1 : 0) + (seasonal24 ? 1 : 0);
}

void StateSpaceSpec::validate() const {
    if (slope && !level)
        throw ArgumentError("StateSpaceSpec: slope requires level");
    if (state_dim() == 0)
        throw ArgumentError("StateSpaceSpec: no state components");
    if (state_noise_var.size() != disturbance_dim())
        throw ArgumentError("StateSpaceSpec: state_noise_var size mismatch");
    for (Eigen::Index i = 0; i < state_noise_var.size(); ++i)
        if (state_noise_var(i) < 0)
            throw ArgumentError("StateSpaceSpec: negative state variance");
    if (obs_noise_var < 0)
        throw ArgumentError("StateSpaceSpec: negative observation variance");
}

Eigen::MatrixXd StateSpaceSpec::transition() const {
    int m = state_dim();
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    int pos = 0;
    if (level) {
        T(0, 0) = 1;
        if (slope) {
            T(0, 1) = 1;
            T(1, 1) = 1;
            pos = 2;
        } else {
            pos = 1;
        }
    }
    if (seasonal24) {
        for (int j = 0; j < 23; ++j) T(pos, pos + j) = -1.0;
        for (int j = 1; j < 23; ++j) T(pos + j, pos + j - 1) = 1.0;
    }
    return T;
}

Eigen::VectorXd StateSpaceSpec::observation() const {
    int m = state_dim();
    Eigen::VectorXd Z = Eigen::VectorXd::Zero(m);
    int pos = 0;
    if (level) {
        Z(0) = 1;
        pos = slope ? 2 : 1;
    }
    if (seasonal24) Z(pos) = 1;
    return Z;
}

Eigen::MatrixXd StateSpaceSpec::selection() const {
    int m = state_dim();
    int r = disturbance_dim();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, r);
    int col = 0, pos = 0;
    if (level) {
        R(0, col++) = 1;
        pos = slope ? 2 : 1;
        if (slope) R(1, col++) = 1;
    }
    if (seasonal24) R(pos, col++) = 1;
    return R;
}

GainUpdate kalman_gain_update(const Eigen::MatrixXd& P, const Eigen::VectorXd& C,
                              double R) {
    double F = C.dot(P * C) + R;
    if (!(F > 0)) throw NumericalError("kalman: innovation variance <= 0");
    GainUpdate g;
    g.gain = P * C / F;
    g.updated_cov = P - g.gain * (C.transpose() * P);
    // Symmetrize: round-off can skew P after repeated updates.
    g.updated_cov = 0.5 * (g.updated_cov + g.updated_cov.transpose()).eval();
    return g;
}

KalmanState initial_state(const StateSpaceSpec& spec) {
    spec.validate();
    int m = spec.state_dim();
    KalmanState s;
    s.state_mean = Eigen::VectorXd::Zero(m);
    s.state_cov = spec.initial_var * Eigen::MatrixXd::Identity(m, m);
    return s;
}

KalmanStepResult kalman_step(const KalmanState& state, const StateSpaceSpec& spec,
                             double observation, const Eigen::VectorXd& regressors,
                             const Eigen::VectorXd& beta) {
    const Eigen::VectorXd Z = spec.observation();
    const Eigen::MatrixXd T = spec.transition();
    const Eigen::MatrixXd R = spec.selection();

    KalmanStepResult out;
    Eigen::VectorXd filtered_mean;
    Eigen::MatrixXd filtered_cov;

    if (std::isfinite(observation)) {
        double regression = beta.size() > 0 ? beta.dot(regressors) : 0.0;
        double v = observation - Z.dot(state.state_mean) - regression;
        GainUpdate g = kalman_gain_update(state.state_cov, Z, spec.obs_noise_var);
        double F = Z.dot(state.state_cov * Z) + spec.obs_noise_var;
        filtered_mean = state.state_mean + g.gain * v;
        filtered_cov = g.updated_cov;
        out.state.gain = g.gain;
        out.state.innovation = v;
        out.state.innovation_var = F;
        out.loglik_increment =
            -0.5 * (std::log(2.0 * M_PI * F) + v * v / F);
    } else {
        filtered_mean = state.state_mean;
        filtered_cov = state.state_cov;
        out.state.gain = Eigen::VectorXd::Zero(state.state_mean.size());
    }

    Eigen::MatrixXd Q = spec.state_noise_var.asDiagonal();
    out.state.state_mean = T * filtered_mean;
    out.state.state_cov =
        T * filtered_cov * T.transpose() + R * Q * R.transpose();
    out.state.state_cov =
        0.5 * (out.state.state_cov + out.state.state_cov.transpose()).eval();
    return out;
}

FilterResult kalman_filter(const StateSpaceSpec& spec,
                           const std::vector<double>& y_adjusted) {
    KalmanState s = initial_state(spec);
    Eigen::VectorXd no_beta;
    Eigen::VectorXd no_x;
    FilterResult res;
    for (double y : y_adjusted) {
        res.predicted_means.push_back(s.state_mean);
        res.predicted_covs.push_back(s.state_cov);
        KalmanStepResult step = kalman_step(s, spec, y, no_x, no_beta);
        res.loglik += step.loglik_increment;
        res.innovations.push_back(step.state.innovation);
        res.innovation_vars.push_back(step.state.innovation_var);
        s = step.state;
    }
    return res;
}

std::vector<Eigen::VectorXd> kalman_smooth(const StateSpaceSpec& spec,
                                           const std::vector<double>& y_adjusted) {
    const auto n = y_adjusted.size();
    const Eigen::VectorXd Z = spec.observation();
    const Eigen::MatrixXd T = spec.transition();
    FilterResult f = kalman_filter(spec, y_adjusted);

    const int m = spec.state_dim();
    std::vector<Eigen::VectorXd> smoothed(n);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m);
    for (std::size_t ti = n; ti-- > 0;) {
        if (std::isfinite(y_adjusted[ti]) && f.innovation_vars[ti] > 0) {
            double F = f.innovation_vars[ti];
            double v = f.innovations[ti];
            Eigen::VectorXd K = T * f.predicted_covs[ti] * Z / F;  // DK gain
            Eigen::MatrixXd L = T - K * Z.transpose();
            r = Z * (v / F) + L.transpose() * r;
        } else {
            r = T.transpose() * r;
        }
        smoothed[ti] = f.predicted_means[ti] + f.predicted_covs[ti] * r;
    }
    return smoothed;
}

std::vector<Eigen::VectorXd> sample_states(const StateSpaceSpec& spec,
                                           const std::vector<double>& y_adjusted,
                                           Rng& rng) {
    spec.validate();
    const auto n = y_adjusted.size();
    const Eigen::VectorXd Z = spec.observation();
    const Eigen::MatrixXd T = spec.transition();
    const Eigen::MatrixXd R = spec.selection();
    const int m = spec.state_dim();
    const int q = spec.disturbance_dim();

    // Unconditional simulation with the same prior as the filter.
    std::vector<Eigen::VectorXd> alpha_plus(n);
    std::vector<double> y_plus(n);
    Eigen::VectorXd a(m);
    double init_sd = std::sqrt(spec.initial_var);
    for (int i = 0; i < m; ++i) a(i) = init_sd * rand_normal(rng);
    double obs_sd = std::sqrt(spec.obs_noise_var);
    for (std::size_t t = 0; t < n; ++t) {
        alpha_plus[t] = a;
        y_plus[t] = Z.dot(a) + obs_sd * rand_normal(rng);
        Eigen::VectorXd eta(q);
        for (int k = 0; k < q; ++k)
            eta(k) = std::sqrt(spec.state_noise_var(k)) * rand_normal(rng);
        a = T * a + R * eta;
    }

    std::vector<Eigen::VectorXd> smooth_obs = kalman_smooth(spec, y_adjusted);
    std::vector<Eigen::VectorXd> smooth_plus = kalman_smooth(spec, y_plus);

    std::vector<Eigen::VectorXd> out(n);
    for (std::size_t t = 0; t < n; ++t)
        out[t] = smooth_obs[t] + (alpha_plus[t] - smooth_plus[t]);
    return out;
}

SpikeSlabPrior SpikeSlabPrior::standard(int dim, double inclusion,
                                        double precision) {
    SpikeSlabPrior p;
    p.inclusion_prob = Eigen::VectorXd::Constant(dim, inclusion);
    p.slab_mean = Eigen::VectorXd::Zero(dim);
    p.slab_precision = precision * Eigen::MatrixXd::Identity(dim, dim);
    return p;
}

void SpikeSlabPrior::validate(int dim) const {
    if (inclusion_prob.size() != dim || slab_mean.size() != dim ||
        slab_precision.rows() != dim || slab_precision.cols() != dim)
        throw ArgumentError("SpikeSlabPrior: dimension mismatch with design");
    for (Eigen::Index j = 0; j < inclusion_prob.size(); ++j)
        if (inclusion_prob(j) < 0 || inclusion_prob(j) > 1)
            throw ArgumentError("SpikeSlabPrior: inclusion_prob outside [0,1]");
    if (!(sigma_shape > 0) || !(sigma_scale > 0))
        throw ArgumentError("SpikeSlabPrior: invalid inverse-gamma prior");
}

namespace {

std::vector<int> active_set(const Eigen::VectorXi& delta) {
    std::vector<int> s;
    for (Eigen::Index j = 0; j < delta.size(); ++j)
        if (delta(j) != 0) s.push_back(static_cast<int>(j));
    return s;
}

struct ConjugatePosterior {
    std::vector<int> active;
    Eigen::MatrixXd lambda_n;  // posterior precision (times 1/sigma^2)
    Eigen::VectorXd mu_n;
    double a_n = 0, b_n = 0;
    double log_marginal = 0;
};

// Gram-based conjugate normal-inverse-gamma posterior for the active set.
ConjugatePosterior conjugate_posterior(const Eigen::MatrixXd& gram,
                                       const Eigen::VectorXd& xty, double yty,
                                       double n_obs,
                                       const SpikeSlabPrior& prior,
                                       const Eigen::VectorXi& delta) {
    ConjugatePosterior post;
    post.active = active_set(delta);
    const auto k = static_cast<Eigen::Index>(post.active.size());
    post.a_n = prior.sigma_shape + 0.5 * n_obs;

    double log_det_prior = 0, log_det_post = 0, quad = 0;
    if (k > 0) {
        Eigen::MatrixXd A(k, k), G(k, k);
        Eigen::VectorXd b0(k), xy(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            b0(i) = prior.slab_mean(post.active[i]);
            xy(i) = xty(post.active[i]);
            for (Eigen::Index j = 0; j < k; ++j) {
                A(i, j) = prior.slab_precision(post.active[i], post.active[j]);
                G(i, j) = gram(post.active[i], post.active[j]);
            }
        }
        post.lambda_n = G + A;
        Eigen::LLT<Eigen::MatrixXd> llt_post(post.lambda_n);
        if (llt_post.info() != Eigen::Success) {
            post.lambda_n.diagonal().array() += 1e-10 * post.lambda_n.trace();
            llt_post.compute(post.lambda_n);
            if (llt_post.info() != Eigen::Success)
                throw NumericalError(
                    "spike_slab: singular on-support precision after jitter");
        }
        Eigen::LLT<Eigen::MatrixXd> llt_prior(A);
        if (llt_prior.info() != Eigen::Success)
            throw NumericalError("spike_slab: slab precision not PD");

        post.mu_n = llt_post.solve(xy + A * b0);
        for (Eigen::Index i = 0; i < k; ++i) {
            log_det_post += 2.0 * std::log(llt_post.matrixL()(i, i));
            log_det_prior += 2.0 * std::log(llt_prior.matrixL()(i, i));
        }
        quad = b0.dot(A * b0) - post.mu_n.dot(post.lambda_n * post.mu_n);
    }
    post.b_n = prior.sigma_scale + 0.5 * (yty + quad);
    if (!(post.b_n > 0))
        throw NumericalError("spike_slab: non-positive posterior scale");

    post.log_marginal = -0.5 * n_obs * std::log(2.0 * M_PI) +
                        0.5 * (log_det_prior - log_det_post) +
                        prior.sigma_shape * std::log(prior.sigma_scale) -
                        post.a_n * std::log(post.b_n) + std::lgamma(post.a_n) -
                        std::lgamma(prior.sigma_shape);
    return post;
}

}  // namespace

double spike_slab_log_marginal(const Eigen::MatrixXd& design,
                               const Eigen::VectorXd& y,
                               const SpikeSlabPrior& prior,
                               const Eigen::VectorXi& delta) {
    prior.validate(static_cast<int>(design.cols()));
    Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::VectorXd xty = design.transpose() * y;
    return conjugate_posterior(gram, xty, y.squaredNorm(),
                               static_cast<double>(design.rows()), prior, delta)
        .log_marginal;
}

SpikeSlabDraw spike_slab_draw(const Eigen::MatrixXd& design,
                              const Eigen::VectorXd& residual_targets,
                              const SpikeSlabPrior& prior, Rng& rng,
                              Eigen::VectorXi* delta_state) {
    const auto p = design.cols();
    prior.validate(static_cast<int>(p));
    if (design.rows() != residual_targets.size())
        throw ArgumentError("spike_slab_draw: design/target size mismatch");

    Eigen::MatrixXd gram = design.transpose() * design;
    Eigen::VectorXd xty = design.transpose() * residual_targets;
    double yty = residual_targets.squaredNorm();
    double n_obs = static_cast<double>(design.rows());

    Eigen::VectorXi delta(p);
    if (delta_state && delta_state->size() == p) {
        delta = *delta_state;
    } else {
        for (Eigen::Index j = 0; j < p; ++j)
            delta(j) = prior.inclusion_prob(j) > 0 ? 1 : 0;
    }
    // Respect degenerate priors regardless of the threaded state.
    for (Eigen::Index j = 0; j < p; ++j) {
        if (prior.inclusion_prob(j) == 0.0) delta(j) = 0;
        if (prior.inclusion_prob(j) == 1.0) delta(j) = 1;
    }

    // One Gibbs scan over the indicators with beta, sigma^2 marginalized.
    for (Eigen::Index j = 0; j < p; ++j) {
        double pi_j = prior.inclusion_prob(j);
        if (pi_j == 0.0 || pi_j == 1.0) continue;
        Eigen::VectorXi d1 = delta, d0 = delta;
        d1(j) = 1;
        d0(j) = 0;
        double l1 = conjugate_posterior(gram, xty, yty, n_obs, prior, d1)
                        .log_marginal +
                    std::log(pi_j);
        double l0 = conjugate_posterior(gram, xty, yty, n_obs, prior, d0)
                        .log_marginal +
                    std::log1p(-pi_j);
        double pmax = std::max(l1, l0);
        double p1 = std::exp(l1 - pmax) / (std::exp(l1 - pmax) + std::exp(l0 - pmax));
        delta(j) = rand_uniform(rng) < p1 ? 1 : 0;
    }
    if (delta_state) *delta_state = delta;

    ConjugatePosterior post =
        conjugate_posterior(gram, xty, yty, n_obs, prior, delta);

    SpikeSlabDraw draw;
    draw.delta = delta;
    // sigma^2 ~ InvGamma(a_n, b_n)
    std::gamma_distribution<double> gdist(post.a_n, 1.0 / post.b_n);
    draw.sigma2 = 1.0 / gdist(rng);
    draw.beta = Eigen::VectorXd::Zero(p);
    const auto k = static_cast<Eigen::Index>(post.active.size());
    if (k > 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(post.lambda_n);
        Eigen::VectorXd z(k);
        for (Eigen::Index i = 0; i < k; ++i) z(i) = rand_normal(rng);
        // beta = mu_n + sigma * L^-T z
        Eigen::VectorXd dev =
            llt.matrixU().solve(z) * std::sqrt(draw.sigma2);
        for (Eigen::Index i = 0; i < k; ++i)
            draw.beta(post.active[i]) = post.mu_n(i) + dev(i);
    }
    return draw;
}

BstsModel BstsModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const StateSpaceSpec& spec_in,
                         const SpikeSlabPrior& prior,
                         const BstsMcmcConfig& mcmc) {
    if (mcmc.iterations <= mcmc.burn_in)
        throw ArgumentError("BstsModel::fit: iterations must exceed burn_in");
    if (X.rows() != y.size()) throw ArgumentError("BstsModel::fit: size mismatch");
    spec_in.validate();
    prior.validate(static_cast<int>(X.cols()));

    BstsModel model;
    model.prior_ = prior;
    StateSpaceSpec spec = spec_in;
    const auto n = y.size();
    const Eigen::VectorXd Z = spec.observation();
    const Eigen::MatrixXd T = spec.transition();
    const Eigen::MatrixXd R = spec.selection();
    const int q = spec.disturbance_dim();

    double y_var = (y.array() - y.mean()).square().sum() /
                   std::max<double>(1.0, static_cast<double>(n - 1));
    spec.obs_noise_var = std::max(0.5 * y_var, 1e-8);
    if (mcmc.learn_state_vars)
        spec.state_noise_var = Eigen::VectorXd::Constant(q, 0.01 * y_var + 1e-8);

    Rng rng = derive_rng(mcmc.seed, 3301);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
    Eigen::VectorXi delta_state;

    for (int iter = 0; iter < mcmc.iterations; ++iter) {
        // 1. States given beta and variances.
        std::vector<double> y_adj(n);
        for (Eigen::Index t = 0; t < n; ++t)
            y_adj[static_cast<std::size_t>(t)] = y(t) - beta.dot(X.row(t));
        std::vector<Eigen::VectorXd> states = sample_states(spec, y_adj, rng);

        // 2. Regression block on the state-adjusted targets.
        Eigen::VectorXd z(n);
        for (Eigen::Index t = 0; t < n; ++t)
            z(t) = y(t) - Z.dot(states[static_cast<std::size_t>(t)]);
        SpikeSlabDraw reg = spike_slab_draw(X, z, prior, rng, &delta_state);
        beta = reg.beta;
        if (!std::isfinite(reg.sigma2) || reg.sigma2 <= 0)
            throw NumericalError("BSTS MCMC diverged: bad variance draw at iter " +
                                 std::to_string(iter));
        spec.obs_noise_var = reg.sigma2;

        // 3. State disturbance variances.
        if (mcmc.learn_state_vars && n >= 2) {
            for (int k = 0; k < q; ++k) {
                double ss = 0;
                for (Eigen::Index t = 0; t + 1 < n; ++t) {
                    Eigen::VectorXd eta =
                        R.transpose() *
                        (states[static_cast<std::size_t>(t + 1)] -
                         T * states[static_cast<std::size_t>(t)]);
                    ss += eta(k) * eta(k);
                }
                double shape = 1.0 + 0.5 * static_cast<double>(n - 1);
                double scale = 1.0 + 0.5 * ss;
                std::gamma_distribution<double> gdist(shape, 1.0 / scale);
                double draw = 1.0 / gdist(rng);
                if (!std::isfinite(draw) || draw < 0)
                    throw NumericalError("BSTS MCMC diverged: state variance");
                spec.state_noise_var(k) = draw;
            }
        }

        if (iter >= mcmc.burn_in && (iter - mcmc.burn_in) % mcmc.thin == 0) {
            BstsDraw d;
            d.beta = beta;
            d.delta = reg.delta;
            d.obs_var = spec.obs_noise_var;
            d.state_vars = spec.state_noise_var;
            d.final_state = states.back();
            model.draws_.push_back(std::move(d));
        }
    }
    model.spec_ = spec;
    return model;
}

Eigen::VectorXd BstsModel::Forecast::mean() const {
    return draws.colwise().mean();
}

Eigen::VectorXd BstsModel::Forecast::variance() const {
    Eigen::VectorXd m = mean();
    Eigen::VectorXd v(draws.cols());
    double n = static_cast<double>(draws.rows());
    for (Eigen::Index h = 0; h < draws.cols(); ++h)
        v(h) = (draws.col(h).array() - m(h)).square().sum() / std::max(1.0, n - 1);
    return v;
}

QuantileForecast BstsModel::Forecast::quantiles(
    const std::vector<double>& levels) const {
    QuantileForecast qf;
    qf.levels = levels;
    qf.values.resize(draws.cols(), static_cast<Eigen::Index>(levels.size()));
    std::vector<double> col(static_cast<std::size_t>(draws.rows()));
    for (Eigen::Index h = 0; h < draws.cols(); ++h) {
        for (Eigen::Index d = 0; d < draws.rows(); ++d)
            col[static_cast<std::size_t>(d)] = draws(d, h);
        std::sort(col.begin(), col.end());
        for (std::size_t l = 0; l < levels.size(); ++l) {
            double pos = levels[l] * (static_cast<double>(col.size()) - 1);
            auto idx = static_cast<std::size_t>(pos);
            double frac = pos - static_cast<double>(idx);
            double v = col[idx];
            if (idx + 1 < col.size()) v = (1 - frac) * col[idx] + frac * col[idx + 1];
            qf.values(h, static_cast<Eigen::Index>(l)) = v;
        }
    }
    qf.rearrange();
    qf.set_point_from_median();
    return qf;
}

BstsModel::Forecast BstsModel::forecast(int horizon,
                                        const Eigen::MatrixXd& future_regressors,
                                        std::uint64_t seed) const {
    if (horizon <= 0) throw ArgumentError("forecast: horizon must be positive");
    if (future_regressors.rows() != horizon)
        throw ArgumentError("forecast: regressor rows must equal horizon");
    if (draws_.empty()) throw ArgumentError("forecast: model has no draws");

    const Eigen::VectorXd Z = spec_.observation();
    const Eigen::MatrixXd T = spec_.transition();
    const Eigen::MatrixXd R = spec_.selection();
    const int q = spec_.disturbance_dim();

    Forecast out;
    out.draws.resize(static_cast<Eigen::Index>(draws_.size()), horizon);
    for (std::size_t d = 0; d < draws_.size(); ++d) {
        Rng rng = derive_rng(seed, 3400 + d);
        const BstsDraw& dr = draws_[d];
        Eigen::VectorXd alpha = dr.final_state;
        double obs_sd = std::sqrt(dr.obs_var);
        for (int h = 0; h < horizon; ++h) {
            Eigen::VectorXd eta(q);
            for (int k = 0; k < q; ++k)
                eta(k) = std::sqrt(dr.state_vars(k)) * rand_normal(rng);
            alpha = T * alpha + R * eta;
            double val = Z.dot(alpha) + dr.beta.dot(future_regressors.row(h)) +
                         obs_sd * rand_normal(rng);
            out.draws(static_cast<Eigen::Index>(d), h) = val;
        }
    }
    return out;
}

void BstsModel::save(const std::string& csv_path,
                     const std::string& meta_path) const {
    std::ofstream csv(csv_path);
    if (!csv) throw DataError("cannot write " + csv_path);
    csv << "draw,parameter,value\n";
    for (std::size_t d = 0; d < draws_.size(); ++d) {
        const BstsDraw& dr = draws_[d];
        for (Eigen::Index j = 0; j < dr.beta.size(); ++j)
            csv << d << ",beta" << j << ',' << dr.beta(j) << '\n';
        for (Eigen::Index j = 0; j < dr.delta.size(); ++j)
            csv << d << ",delta" << j << ',' << dr.delta(j) << '\n';
        csv << d << ",obs_var," << dr.obs_var << '\n';
        for (Eigen::Index j = 0; j < dr.state_vars.size(); ++j)
            csv << d << ",state_var" << j << ',' << dr.state_vars(j) << '\n';
    }

    nlohmann::json meta;
    meta["format_version"] = 1;
    meta["kind"] = "bsts";
    meta["spec"] = {{"level", spec_.level},
                    {"slope", spec_.slope},
                    {"seasonal24", spec_.seasonal24},
                    {"obs_noise_var", spec_.obs_noise_var}};
    meta["draw_count"] = draws_.size();
    std::ofstream meta_out(meta_path);
    if (!meta_out) throw DataError("cannot write " + meta_path);
    meta_out << meta.dump(2) << '\n';
}

std::vector<double> bma_weights(const std::vector<double>& log_marginals,
                                const std::vector<double>& priors) {
    if (log_marginals.size() != priors.size() || log_marginals.empty())
        throw ArgumentError("bma_weights: size mismatch");
    double prior_sum = 0;
    for (double p : priors) prior_sum += p;
    if (std::abs(prior_sum - 1.0) > 1e-9)
        throw ArgumentError("bma_weights: priors must sum to 1");

    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < log_marginals.size(); ++j)
        if (priors[j] > 0)
            mx = std::max(mx, log_marginals[j]);
    if (!std::isfinite(mx))
        throw ArgumentError("bma_weights: all log marginals are -inf");

    std::vector<double> w(log_marginals.size());
    double sum = 0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = priors[j] * std::exp(log_marginals[j] - mx);
        sum += w[j];
    }
    for (double& x : w) x /= sum;
    return w;
}

MixtureForecast bma_predict(std::vector<BstsModel::Forecast> models,
                            const std::vector<double>& weights) {
    if (models.size() != weights.size())
        throw ArgumentError("bma_predict: model/weight count mismatch");
    MixtureForecast mix;
    mix.components = std::move(models);
    mix.weights = weights;
    return mix;
}

Eigen::VectorXd MixtureForecast::mean() const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(components[0].draws.cols());
    for (std::size_t j = 0; j < components.size(); ++j)
        m += weights[j] * components[j].mean();
    return m;
}

Eigen::VectorXd MixtureForecast::variance() const {
    // Law of total variance across mixture components.
    Eigen::VectorXd m = mean();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m.size());
    for (std::size_t j = 0; j < components.size(); ++j) {
        Eigen::VectorXd cm = components[j].mean();
        Eigen::VectorXd cv = components[j].variance();
        v += weights[j] * (cv.array() + (cm - m).array().square()).matrix();
    }
    return v;
}

}  // namespace solarcast
