#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "solarcast/timeseries.hpp"

namespace solarcast {

struct DatasetSplit;

/// Lasso: min 1/(2N) ||y - Xb||^2 + lambda ||b||_1, cyclic coordinate
/// descent on a standardized design.
Eigen::VectorXd lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double lambda, double tol = 1e-7,
                      int max_sweeps = 100000);

/// Elastic net: the l1 share is alpha_mix; alpha_mix=1 is the lasso,
/// alpha_mix=0 the ridge.
Eigen::VectorXd elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double lambda, double alpha_mix, double tol = 1e-7,
                            int max_sweeps = 100000);

/// Smallest lambda at which the lasso solution is identically zero.
double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

enum class SelectionMethod { kLasso, kElasticNet, kGbr };

struct SelectionConfig {
    double alpha_mix = 0.5;  // elastic net only
    int lambda_grid = 100;
    int folds = 5;  // time-ordered validation
    std::uint64_t seed = 0;
};

struct SelectionResult {
    std::string method;
    std::vector<std::string> selected;
    std::vector<double> weights;  // coefficient or importance per candidate
    double mae = 0.0;             // linear-quantile-regression evaluation
};

/// Select features on the training window, then populate the MAE field by
/// median linear quantile regression evaluated on the test window.
SelectionResult select(SelectionMethod method, const DatasetSplit& split,
                       const SelectionConfig& config);

/// Median-LQR evaluation of a feature subset: fit on train, score MAE on test.
double evaluate_selection(const std::vector<std::string>& selected,
                          const DatasetSplit& split);

std::string to_string(SelectionMethod m);

}  // namespace solarcast
