#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

namespace solarcast {

struct KernelParams {
    double length_scale = 1.0;
    double signal_var = 1.0;
    double noise_var = 0.1;

    void validate() const;  // all strictly positive
};

/// Squared-exponential covariance between two points; the Kronecker noise
/// term is added when `same_point` is set.
double rbf(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
           const KernelParams& params, bool same_point);

/// Full kernel matrix K(X, X) without the noise diagonal.
Eigen::MatrixXd rbf_matrix(const Eigen::MatrixXd& X, const KernelParams& params);
Eigen::MatrixXd rbf_cross(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const KernelParams& params);

struct GpFitOptions {
    int restarts = 5;
    int max_iters = 200;
    std::size_t subsample_limit = 2000;  // applied when N > 4000
    std::uint64_t seed = 0;
};

/// Exact GP regressor with a constant mean absorbed into target centering.
/// Factorization is Cholesky of K + noise*I with escalating jitter.
class GpModel {
public:
    /// Construct from fixed hyperparameters (factorizes immediately).
    GpModel(Eigen::MatrixXd X, Eigen::VectorXd y, const KernelParams& params);

    /// Multi-start marginal-likelihood optimization in log-parameter space.
    static GpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const KernelParams& init, const GpFitOptions& opt = {});

    double log_marginal_likelihood() const { return log_marginal_; }
    const KernelParams& params() const { return params_; }
    double y_mean() const { return y_mean_; }
    std::size_t train_size() const { return static_cast<std::size_t>(X_.rows()); }
    bool subsampled() const { return subsampled_; }
    const Eigen::MatrixXd& train_inputs() const { return X_; }
    const Eigen::MatrixXd& factor() const { return L_; }
    const Eigen::VectorXd& alpha() const { return alpha_; }

    struct Prediction {
        Eigen::VectorXd mean;
        Eigen::VectorXd variance;
    };
    Prediction predict(const Eigen::MatrixXd& X_new) const;

    std::string to_json() const;
    static GpModel from_json(const std::string& text);

private:
    GpModel() = default;

    void factorize();

    KernelParams params_;
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_centered_;
    Eigen::MatrixXd L_;      // lower Cholesky of K + noise*I (+ jitter)
    Eigen::VectorXd alpha_;  // (K + noise*I)^-1 y_centered
    double y_mean_ = 0.0;
    double log_marginal_ = 0.0;
    double jitter_used_ = 0.0;
    bool subsampled_ = false;
};

}  // namespace solarcast
