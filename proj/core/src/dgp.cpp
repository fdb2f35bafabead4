#include "solarcast/dgp.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>

#include "solarcast/errors.hpp"

namespace solarcast {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Log marginal of the outer layer y | W under the given kernel; -inf when
/// the covariance cannot be factorized.
double outer_log_marginal(const Eigen::MatrixXd& W, const Eigen::VectorXd& y,
                          const KernelParams& params) {
    try {
        GpModel gp(W, y, params);
        double ll = gp.log_marginal_likelihood();
        return std::isfinite(ll) ? ll : kNegInf;
    } catch (const NumericalError&) {
        return kNegInf;
    }
}

/// Lower Cholesky of the inner-layer covariance with escalating jitter.
Eigen::MatrixXd inner_chol(const Eigen::MatrixXd& X, const KernelParams& params) {
    Eigen::MatrixXd K = rbf_matrix(X, params);
    K.diagonal().array() += params.noise_var;
    double jitter = 1e-10 * params.signal_var;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        if (llt.info() == Eigen::Success)
            return Eigen::MatrixXd(llt.matrixL());
        K.diagonal().array() += jitter;
        jitter *= 10.0;
    }
    throw NumericalError("dgp: inner covariance not positive definite");
}

/// Log density of the latent columns under N(0, Sigma_in) given its lower
/// Cholesky factor.
double latent_log_prior(const Eigen::MatrixXd& W, const Eigen::MatrixXd& L) {
    double log_det = 0;
    for (Eigen::Index i = 0; i < L.rows(); ++i)
        log_det += std::log(L(i, i));
    double n = static_cast<double>(W.rows());
    double total = 0;
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        Eigen::VectorXd v = L.triangularView<Eigen::Lower>().solve(W.col(j));
        total += -0.5 * v.squaredNorm() - log_det - 0.5 * n * std::log(2.0 * M_PI);
    }
    return total;
}

// Weak log-normal prior on a kernel hyperparameter (keeps the Metropolis
// target proper).
double log_hyper_prior(const KernelParams& p) {
    auto lp = [](double x) {
        double lx = std::log(x);
        return -0.5 * lx * lx / 9.0;
    };
    return lp(p.length_scale) + lp(p.signal_var) + lp(p.noise_var);
}

KernelParams propose_params(const KernelParams& cur, Rng& rng, double step) {
    KernelParams next = cur;
    next.length_scale = std::exp(std::log(cur.length_scale) + step * rand_normal(rng));
    next.signal_var = std::exp(std::log(cur.signal_var) + step * rand_normal(rng));
    next.noise_var = std::exp(std::log(cur.noise_var) + step * rand_normal(rng));
    return next;
}

}  // namespace

Eigen::VectorXd ess_step(const Eigen::VectorXd& current,
                         const Eigen::MatrixXd& prior_chol,
                         const std::function<double(const Eigen::VectorXd&)>& log_lik,
                         Rng& rng) {
    double cur_ll = log_lik(current);
    if (!std::isfinite(cur_ll))
        throw NumericalError("ess_step: non-finite log-likelihood at current state");

    const auto n = current.size();
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rand_normal(rng);
    Eigen::VectorXd nu = prior_chol * z;

    double log_threshold = cur_ll + std::log(rand_uniform(rng));
    double theta = 2.0 * M_PI * rand_uniform(rng);
    double lo = theta - 2.0 * M_PI;
    double hi = theta;

    for (int attempt = 0; attempt < 200; ++attempt) {
        Eigen::VectorXd proposal =
            current * std::cos(theta) + nu * std::sin(theta);
        if (log_lik(proposal) > log_threshold) return proposal;
        if (theta < 0)
            lo = theta;
        else
            hi = theta;
        theta = lo + (hi - lo) * rand_uniform(rng);
    }
    // The bracket shrinks toward theta = 0, i.e. the current state, which
    // always satisfies the threshold; reaching here means round-off only.
    return current;
}

DgpModel DgpModel::fit(const Eigen::MatrixXd& X_in, const Eigen::VectorXd& y_in,
                       const DgpFitConfig& config) {
    if (X_in.rows() != y_in.size())
        throw ArgumentError("DgpModel::fit: input/target size mismatch");
    if (config.iterations <= config.burn_in)
        throw ArgumentError("DgpModel::fit: iterations must exceed burn_in");
    if (config.thin < 1) throw ArgumentError("DgpModel::fit: thin must be >= 1");
    if (config.latent_nodes < 0)
        throw ArgumentError("DgpModel::fit: latent_nodes must be >= 0");

    // Cubic per-iteration cost: cap the training set by stride subsampling.
    Eigen::MatrixXd X = X_in;
    Eigen::VectorXd y = y_in;
    const Eigen::Index guard = 1000;
    if (X.rows() > guard) {
        Eigen::Index n = X.rows();
        Eigen::MatrixXd Xs(guard, X.cols());
        Eigen::VectorXd ys(guard);
        for (Eigen::Index i = 0; i < guard; ++i) {
            Eigen::Index src = i * n / guard;
            Xs.row(i) = X.row(src);
            ys(i) = y(src);
        }
        X = std::move(Xs);
        y = std::move(ys);
    }

    const auto n = X.rows();
    const auto d = X.cols();
    const int p = config.latent_nodes > 0 ? config.latent_nodes
                                          : static_cast<int>(d);

    DgpModel model;
    model.X_ = X;
    model.y_ = y;
    model.y_mean_ = y.mean();
    model.p_ = p;

    // Start the latent layer at (recycled, standardized) input columns so
    // the identity map is in the initial basin.
    Eigen::MatrixXd W(n, p);
    for (int j = 0; j < p; ++j) {
        Eigen::VectorXd col = X.col(j % d);
        double mu = col.mean();
        double sd = std::sqrt((col.array() - mu).square().sum() /
                              std::max<double>(1.0, static_cast<double>(n - 1)));
        if (sd <= 0) sd = 1.0;
        W.col(j) = (col.array() - mu) / sd;
    }

    KernelParams outer{1.0, 1.0, 0.1};
    KernelParams inner{1.0, 1.0, 1e-4};

    Rng rng = derive_rng(config.seed, 4100);
    Eigen::MatrixXd L_in = inner_chol(X, inner);
    double outer_ll = outer_log_marginal(W, y, outer);

    for (int iter = 0; iter < config.iterations; ++iter) {
        // 1. Latent columns by elliptical slice sampling.
        for (int j = 0; j < p; ++j) {
            Eigen::MatrixXd W_try = W;
            auto log_lik = [&](const Eigen::VectorXd& col) {
                W_try.col(j) = col;
                return outer_log_marginal(W_try, y, outer);
            };
            W.col(j) = ess_step(W.col(j), L_in, log_lik, rng);
        }
        outer_ll = outer_log_marginal(W, y, outer);

        // 2. Outer kernel by random-walk Metropolis in log space.
        {
            KernelParams prop = propose_params(outer, rng, 0.1);
            double prop_ll = outer_log_marginal(W, y, prop);
            double log_accept = (prop_ll + log_hyper_prior(prop)) -
                                (outer_ll + log_hyper_prior(outer));
            if (std::isfinite(prop_ll) &&
                std::log(rand_uniform(rng)) < log_accept) {
                outer = prop;
                outer_ll = prop_ll;
            }
        }

        // 3. Inner kernel likewise, against the latent-layer prior.
        {
            KernelParams prop = propose_params(inner, rng, 0.1);
            try {
                Eigen::MatrixXd L_prop = inner_chol(X, prop);
                double cur = latent_log_prior(W, L_in) + log_hyper_prior(inner);
                double nxt = latent_log_prior(W, L_prop) + log_hyper_prior(prop);
                if (std::log(rand_uniform(rng)) < nxt - cur) {
                    inner = prop;
                    L_in = std::move(L_prop);
                }
            } catch (const NumericalError&) {
                // proposal rejected
            }
        }

        if (iter >= config.burn_in &&
            (iter - config.burn_in) % config.thin == 0) {
            if (!W.allFinite())
                throw NumericalError("dgp: non-finite latent draw at iter " +
                                     std::to_string(iter));
            model.draws_.push_back(DgpDraw{W, outer, inner});
        }
    }
    return model;
}

DgpModel::Prediction DgpModel::predict(const Eigen::MatrixXd& X_new) const {
    if (draws_.empty())
        throw ArgumentError("DgpModel::predict: model has no retained draws");
    if (X_new.cols() != X_.cols())
        throw ArgumentError("DgpModel::predict: input dimension mismatch");

    const auto m = X_new.rows();
    const auto n_draws = static_cast<Eigen::Index>(draws_.size());
    Eigen::MatrixXd means(n_draws, m);
    Eigen::MatrixXd vars(n_draws, m);

    for (Eigen::Index di = 0; di < n_draws; ++di) {
        const DgpDraw& draw = draws_[static_cast<std::size_t>(di)];
        // Inner-layer kriging posterior means for the test latents.
        Eigen::MatrixXd K_in = rbf_matrix(X_, draw.inner);
        K_in.diagonal().array() += draw.inner.noise_var;
        Eigen::LLT<Eigen::MatrixXd> llt(K_in);
        if (llt.info() != Eigen::Success) {
            K_in.diagonal().array() += 1e-8 * draw.inner.signal_var;
            llt.compute(K_in);
            if (llt.info() != Eigen::Success)
                throw NumericalError("dgp: inner covariance not factorizable");
        }
        Eigen::MatrixXd K_cross = rbf_cross(X_new, X_, draw.inner);
        Eigen::MatrixXd W_new = K_cross * llt.solve(draw.W);

        GpModel outer(draw.W, y_, draw.outer);
        GpModel::Prediction pr = outer.predict(W_new);
        means.row(di) = pr.mean.transpose();
        vars.row(di) = pr.variance.transpose();
    }

    Prediction out;
    out.mean = means.colwise().mean();
    out.variance.resize(m);
    double nd = static_cast<double>(n_draws);
    for (Eigen::Index i = 0; i < m; ++i) {
        double between =
            (means.col(i).array() - out.mean(i)).square().sum() / nd;
        out.variance(i) = vars.col(i).mean() + between;
    }
    return out;
}

std::string DgpModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "dgp";
    j["layer_count"] = 2;
    j["latent_nodes"] = p_;
    j["y_mean"] = y_mean_;
    auto mat_to_json = [](const Eigen::MatrixXd& M) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            nlohmann::json r = nlohmann::json::array();
            for (Eigen::Index c = 0; c < M.cols(); ++c) r.push_back(M(i, c));
            rows.push_back(std::move(r));
        }
        return rows;
    };
    j["train_inputs"] = mat_to_json(X_);
    j["targets"] = std::vector<double>(y_.data(), y_.data() + y_.size());
    nlohmann::json draws = nlohmann::json::array();
    for (const DgpDraw& d : draws_) {
        nlohmann::json jd;
        jd["W"] = mat_to_json(d.W);
        jd["outer"] = {{"length_scale", d.outer.length_scale},
                       {"signal_var", d.outer.signal_var},
                       {"noise_var", d.outer.noise_var}};
        jd["inner"] = {{"length_scale", d.inner.length_scale},
                       {"signal_var", d.inner.signal_var},
                       {"noise_var", d.inner.noise_var}};
        draws.push_back(std::move(jd));
    }
    j["draws"] = std::move(draws);
    return j.dump();
}

DgpModel DgpModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dgp: bad model JSON: ") + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1 ||
        j.value("kind", "") != "dgp")
        throw DataError("dgp: unsupported model payload");

    auto mat_from_json = [](const nlohmann::json& rows) {
        Eigen::MatrixXd M(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t c = 0; c < rows[i].size(); ++c)
                M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                    rows[i][c].get<double>();
        return M;
    };
    auto params_from_json = [](const nlohmann::json& p) {
        KernelParams k;
        k.length_scale = p.at("length_scale").get<double>();
        k.signal_var = p.at("signal_var").get<double>();
        k.noise_var = p.at("noise_var").get<double>();
        k.validate();
        return k;
    };

    DgpModel model;
    try {
        model.X_ = mat_from_json(j.at("train_inputs"));
        std::vector<double> y = j.at("targets").get<std::vector<double>>();
        model.y_ = Eigen::Map<Eigen::VectorXd>(y.data(),
                                               static_cast<Eigen::Index>(y.size()));
        model.y_mean_ = j.at("y_mean").get<double>();
        model.p_ = j.at("latent_nodes").get<int>();
        for (const auto& jd : j.at("draws")) {
            DgpDraw d;
            d.W = mat_from_json(jd.at("W"));
            d.outer = params_from_json(jd.at("outer"));
            d.inner = params_from_json(jd.at("inner"));
            model.draws_.push_back(std::move(d));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("dgp: bad model JSON: ") + e.what());
    }
    return model;
}

}  // namespace solarcast
