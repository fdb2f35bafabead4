#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace solarcast {

struct GbrConfig {
    int n_trees = 500;
    int max_depth = 3;
    double learning_rate = 0.1;
    int min_leaf = 5;
    double subsample = 1.0;
    std::uint64_t seed = 0;
};

/// Axis-aligned regression tree stored as a flat node array.
struct TreeNode {
    int feature = -1;        // -1 marks a leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    double value = 0.0;      // leaf prediction
    double gain = 0.0;       // squared-error reduction at this split
    int left = -1, right = -1;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict_row(const Eigen::RowVectorXd& x) const;
};

/// Stage-wise squared-loss boosting: each tree fits the current residuals
/// and is added with shrinkage.
class GbrModel {
public:
    static GbrModel fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                        const GbrConfig& config);

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;

    /// Per-feature squared-error-reduction shares; sums to 1.
    Eigen::VectorXd importance() const;

    const std::vector<double>& training_loss_path() const { return loss_path_; }
    double init_value() const { return init_value_; }
    std::size_t tree_count() const { return trees_.size(); }
    const GbrConfig& config() const { return config_; }

    std::string to_json() const;
    static GbrModel from_json(const std::string& text);

private:
    GbrConfig config_;
    double init_value_ = 0.0;
    int n_features_ = 0;
    std::vector<RegressionTree> trees_;
    std::vector<double> loss_path_;  // training MSE after each stage
};

}  // namespace solarcast
