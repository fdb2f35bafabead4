#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "solarcast/gp.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

/// One retained posterior sample of the two-layer hierarchy.
struct DgpDraw {
    Eigen::MatrixXd W;          // N x p latent layer
    KernelParams outer;         // kernel of y | W
    KernelParams inner;         // kernel of W | X (shared across columns)
};

struct DgpFitConfig {
    int latent_nodes = 0;  // 0 means "match the input dimension"
    int iterations = 4000;
    int burn_in = 2000;
    int thin = 5;
    std::uint64_t seed = 0;
};

/// Elliptical slice sampling step for one latent column with prior
/// N(0, Sigma) given through its lower Cholesky factor. Rejection-free.
Eigen::VectorXd ess_step(const Eigen::VectorXd& current,
                         const Eigen::MatrixXd& prior_chol,
                         const std::function<double(const Eigen::VectorXd&)>& log_lik,
                         Rng& rng);

/// Two-layer deep GP: X -> W (p latent columns, inner kernel) -> y (outer
/// kernel). Latent columns move by elliptical slice sampling; both layers'
/// kernel hyperparameters by random-walk Metropolis in log space.
class DgpModel {
public:
    static DgpModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const DgpFitConfig& config = {});

    const std::vector<DgpDraw>& draws() const { return draws_; }
    int latent_nodes() const { return p_; }

    struct Prediction {
        Eigen::VectorXd mean;
        Eigen::VectorXd variance;
    };

    /// Per-draw predictive moments propagated through both layers
    /// (inner-layer kriging means for the test latents), pooled across
    /// draws by the law of total variance.
    Prediction predict(const Eigen::MatrixXd& X_new) const;

    std::string to_json() const;
    static DgpModel from_json(const std::string& text);

private:
    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    double y_mean_ = 0.0;
    int p_ = 0;
    std::vector<DgpDraw> draws_;
};

}  // namespace solarcast
