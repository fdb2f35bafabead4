#include "solarcast/gp.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "solarcast/errors.hpp"
#include "solarcast/optim.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

void KernelParams::validate() const {
    if (!(length_scale > 0) || !(signal_var > 0) || !(noise_var > 0))
        throw ArgumentError("kernel parameters must be strictly positive");
}

double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
           const KernelParams& params, bool same_point) {
    if (a.size() != b.size())
        throw ArgumentError("rbf: dimension mismatch");
    double d2 = (a - b).squaredNorm();
    double v = params.signal_var *
               std::exp(-d2 / (2.0 * params.length_scale * params.length_scale));
    if (same_point) v += params.noise_var;
    return v;
}

Eigen::MatrixXd rbf_matrix(const Eigen::MatrixXd& X, const KernelParams& params) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd K(n, n);
    const double inv2l2 = 1.0 / (2.0 * params.length_scale * params.length_scale);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = params.signal_var;
        for (Eigen::Index j = 0; j < i; ++j) {
            double d2 = (X.row(i) - X.row(j)).squaredNorm();
            double v = params.signal_var * std::exp(-d2 * inv2l2);
            K(i, j) = v;
            K(j, i) = v;  // same arithmetic path: exact symmetry
        }
    }
    return K;
}

Eigen::MatrixXd rbf_cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const KernelParams& params) {
    if (A.cols() != B.cols()) throw ArgumentError("rbf_cross: dimension mismatch");
    const double inv2l2 = 1.0 / (2.0 * params.length_scale * params.length_scale);
    Eigen::MatrixXd K(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j) {
            double d2 = (A.row(i) - B.row(j)).squaredNorm();
            K(i, j) = params.signal_var * std::exp(-d2 * inv2l2);
        }
    return K;
}

GpModel::GpModel(Eigen::MatrixXd X, Eigen::VectorXd y,
                 const KernelParams& params) {
    params.validate();
    if (X.rows() != y.size()) throw ArgumentError("GpModel: X/y size mismatch");
    if (X.rows() < 1) throw ArgumentError("GpModel: empty training set");
    params_ = params;
    X_ = std::move(X);
    y_mean_ = y.mean();
    y_centered_ = y.array() - y_mean_;
    factorize();
}

void GpModel::factorize() {
    const Eigen::Index n = X_.rows();
    Eigen::MatrixXd K = rbf_matrix(X_, params_);
    K.diagonal().array() += params_.noise_var;

    // Jitter escalation: 1e-10 * signal_var, x10 per retry, cap 1e-6.
    double jitter = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
        Eigen::MatrixXd Kj = K;
        Kj.diagonal().array() += jitter;
        llt.compute(Kj);
        if (llt.info() == Eigen::Success) break;
        if (jitter == 0.0)
            jitter = 1e-10 * params_.signal_var;
        else
            jitter *= 10.0;
        if (jitter > 1e-6 * params_.signal_var)
            throw NumericalError(
                "GP kernel matrix not positive definite after jitter escalation");
    }
    jitter_used_ = jitter;
    L_ = llt.matrixL();
    alpha_ = llt.solve(y_centered_);

    double log_det = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(L_(i, i));
    log_marginal_ = -0.5 * y_centered_.dot(alpha_) - log_det -
                    0.5 * static_cast<double>(n) * std::log(2.0 * M_PI);
}

GpModel::Prediction GpModel::predict(const Eigen::MatrixXd& X_new) const {
    if (X_new.cols() != X_.cols())
        throw ArgumentError("GpModel::predict: dimension mismatch");
    Prediction out;
    out.mean.resize(X_new.rows());
    out.variance.resize(X_new.rows());
    if (X_new.rows() == 0) return out;

    Eigen::MatrixXd Ks = rbf_cross(X_, X_new, params_);  // N x M
    out.mean = Ks.transpose() * alpha_;
    out.mean.array() += y_mean_;

    // v = L^-1 k*; var = k(x*,x*) + noise - ||v||^2
    Eigen::MatrixXd V = L_.triangularView<Eigen::Lower>().solve(Ks);
    for (Eigen::Index j = 0; j < X_new.rows(); ++j) {
        double var = params_.signal_var + params_.noise_var -
                     V.col(j).squaredNorm();
        out.variance(j) = std::max(var, 1e-12);
    }
    return out;
}

GpModel GpModel::fit(const Eigen::MatrixXd& X_full, const Eigen::VectorXd& y_full,
                     const KernelParams& init, const GpFitOptions& opt) {
    init.validate();
    if (X_full.rows() < 2) throw ArgumentError("GpModel::fit: need N >= 2");

    Eigen::MatrixXd X = X_full;
    Eigen::VectorXd y = y_full;
    bool subsampled = false;
    if (X_full.rows() > 4000 &&
        opt.subsample_limit < static_cast<std::size_t>(X_full.rows())) {
        // Uniform stride subsample keeps chronological coverage.
        auto n = static_cast<std::size_t>(X_full.rows());
        auto keep = opt.subsample_limit;
        X.resize(static_cast<Eigen::Index>(keep), X_full.cols());
        y.resize(static_cast<Eigen::Index>(keep));
        for (std::size_t i = 0; i < keep; ++i) {
            auto src = static_cast<Eigen::Index>(i * n / keep);
            X.row(static_cast<Eigen::Index>(i)) = X_full.row(src);
            y(static_cast<Eigen::Index>(i)) = y_full(src);
        }
        subsampled = true;
    }

    auto objective = [&](const Eigen::VectorXd& log_params) -> double {
        KernelParams p;
        p.length_scale = std::exp(log_params(0));
        p.signal_var = std::exp(log_params(1));
        p.noise_var = std::exp(log_params(2));
        try {
            GpModel m(X, y, p);
            return -m.log_marginal_likelihood();
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    Eigen::VectorXd x0(3);
    x0 << std::log(init.length_scale), std::log(init.signal_var),
        std::log(init.noise_var);

    Eigen::VectorXd best_x = x0;
    double best_val = objective(x0);
    Rng rng = derive_rng(opt.seed, 1101);
    for (int r = 0; r < opt.restarts; ++r) {
        Eigen::VectorXd start = x0;
        if (r > 0)
            for (int i = 0; i < 3; ++i) start(i) += 1.5 * rand_normal(rng);
        auto res = nelder_mead(objective, start, 0.5, opt.max_iters);
        if (std::isfinite(res.value) && res.value < best_val) {
            best_val = res.value;
            best_x = res.x;
        }
    }
    if (!std::isfinite(best_val))
        throw NumericalError("GP fit: no finite marginal likelihood found");

    KernelParams p;
    p.length_scale = std::exp(best_x(0));
    p.signal_var = std::exp(best_x(1));
    p.noise_var = std::exp(best_x(2));
    GpModel model(std::move(X), std::move(y), p);
    model.subsampled_ = subsampled;
    return model;
}

std::string GpModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "gp";
    j["params"] = {{"length_scale", params_.length_scale},
                   {"signal_var", params_.signal_var},
                   {"noise_var", params_.noise_var}};
    j["y_mean"] = y_mean_;
    j["subsampled"] = subsampled_;
    j["train_X"] = std::vector<std::vector<double>>();
    for (Eigen::Index i = 0; i < X_.rows(); ++i) {
        std::vector<double> row(X_.cols());
        for (Eigen::Index c = 0; c < X_.cols(); ++c) row[c] = X_(i, c);
        j["train_X"].push_back(row);
    }
    std::vector<double> yv(y_centered_.size());
    for (Eigen::Index i = 0; i < y_centered_.size(); ++i)
        yv[i] = y_centered_(i) + y_mean_;
    j["train_y"] = yv;
    return j.dump();
}

GpModel GpModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format_version", 0) != 1 || j.value("kind", "") != "gp")
        throw DataError("GpModel::from_json: unrecognized model blob");
    KernelParams p;
    p.length_scale = j["params"]["length_scale"].get<double>();
    p.signal_var = j["params"]["signal_var"].get<double>();
    p.noise_var = j["params"]["noise_var"].get<double>();
    auto rows = j["train_X"].get<std::vector<std::vector<double>>>();
    auto yv = j["train_y"].get<std::vector<double>>();
    if (rows.empty() || rows.size() != yv.size())
        throw DataError("GpModel::from_json: inconsistent training data");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                rows[i][c];
    Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(
        yv.data(), static_cast<Eigen::Index>(yv.size()));
    GpModel model(std::move(X), y, p);
    model.subsampled_ = j.value("subsampled", false);
    return model;
}

}  // namespace solarcast
