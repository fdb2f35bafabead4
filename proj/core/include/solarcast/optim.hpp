#pragma once

#include <Eigen/Dense>
#include <functional>

namespace solarcast {

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Derivative-free simplex minimization. Non-finite objective values are
/// treated as +inf so the simplex backs away from them.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             double initial_step = 0.5,
                             int max_iters = 200,
                             double tol = 1e-9);

}  // namespace solarcast
