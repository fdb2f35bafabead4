#include "solarcast/gbr.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>

#include "solarcast/errors.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

double RegressionTree::predict_row(const Eigen::RowVectorXd& x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
        const TreeNode& nd = nodes[idx];
        idx = x(nd.feature) <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[idx].value;
}

namespace {

struct SplitResult {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy search over sorted unique thresholds; deterministic ties by
// (feature index, threshold value).
SplitResult best_split(const Eigen::MatrixXd& X, const Eigen::VectorXd& r,
                       const std::vector<int>& rows, int min_leaf) {
    SplitResult best;
    const int n = static_cast<int>(rows.size());
    if (n < 2 * min_leaf) return best;

    double total_sum = 0, total_sq = 0;
    for (int i : rows) {
        total_sum += r(i);
        total_sq += r(i) * r(i);
    }
    double parent_sse = total_sq - total_sum * total_sum / n;

    std::vector<int> order(rows);
    for (int f = 0; f < X.cols(); ++f) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            double xa = X(a, f), xb = X(b, f);
            return xa != xb ? xa < xb : a < b;
        });
        double left_sum = 0, left_sq = 0;
        for (int i = 0; i < n - 1; ++i) {
            double v = r(order[i]);
            left_sum += v;
            left_sq += v * v;
            double x_here = X(order[i], f), x_next = X(order[i + 1], f);
            if (x_here == x_next) continue;
            int nl = i + 1, nr = n - nl;
            if (nl < min_leaf || nr < min_leaf) continue;
            double right_sum = total_sum - left_sum;
            double right_sq = total_sq - left_sq;
            double sse = (left_sq - left_sum * left_sum / nl) +
                         (right_sq - right_sum * right_sum / nr);
            double gain = parent_sse - sse;
            if (gain > best.gain + 1e-15) {
                best.feature = f;
                best.threshold = 0.5 * (x_here + x_next);
                best.gain = gain;
            }
        }
    }
    return best;
}

int build_node(RegressionTree& tree, const Eigen::MatrixXd& X,
               const Eigen::VectorXd& r, std::vector<int>& rows, int depth,
               const GbrConfig& cfg) {
    double mean = 0;
    for (int i : rows) mean += r(i);
    mean /= static_cast<double>(rows.size());

    int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[idx].value = mean;

    if (depth >= cfg.max_depth) return idx;
    SplitResult sp = best_split(X, r, rows, cfg.min_leaf);
    if (sp.feature < 0 || sp.gain <= 0) return idx;

    std::vector<int> left, right;
    for (int i : rows)
        (X(i, sp.feature) <= sp.threshold ? left : right).push_back(i);

    tree.nodes[idx].feature = sp.feature;
    tree.nodes[idx].threshold = sp.threshold;
    tree.nodes[idx].gain = sp.gain;
    int l = build_node(tree, X, r, left, depth + 1, cfg);
    int rr = build_node(tree, X, r, right, depth + 1, cfg);
    tree.nodes[idx].left = l;
    tree.nodes[idx].right = rr;
    return idx;
}

}  // namespace

GbrModel GbrModel::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const GbrConfig& config) {
    if (X.rows() != y.size()) throw ArgumentError("GbrModel::fit: size mismatch");
    if (X.rows() < 2 * config.min_leaf)
        throw ArgumentError("GbrModel::fit: need N >= 2*min_leaf");
    if (!(config.learning_rate > 0 && config.learning_rate <= 1))
        throw ArgumentError("GbrModel::fit: learning_rate must be in (0,1]");

    GbrModel model;
    model.config_ = config;
    model.n_features_ = static_cast<int>(X.cols());
    model.init_value_ = y.mean();

    const auto n = static_cast<int>(X.rows());
    Eigen::VectorXd pred = Eigen::VectorXd::Constant(n, model.init_value_);
    Rng rng = derive_rng(config.seed, 2202);

    for (int m = 0; m < config.n_trees; ++m) {
        Eigen::VectorXd resid = y - pred;  // negative gradient of squared loss

        std::vector<int> rows;
        if (config.subsample >= 1.0) {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), 0);
        } else {
            for (int i = 0; i < n; ++i)
                if (rand_uniform(rng) < config.subsample) rows.push_back(i);
            if (static_cast<int>(rows.size()) < 2 * config.min_leaf) continue;
        }

        RegressionTree tree;
        build_node(tree, X, resid, rows, 0, config);
        if (tree.nodes.size() == 1 && tree.nodes[0].value == 0.0) break;

        for (int i = 0; i < n; ++i)
            pred(i) += config.learning_rate * tree.predict_row(X.row(i));
        model.trees_.push_back(std::move(tree));
        model.loss_path_.push_back((y - pred).squaredNorm() / n);
    }
    return model;
}

Eigen::VectorXd GbrModel::predict(const Eigen::MatrixXd& X) const {
    if (X.cols() != n_features_)
        throw ArgumentError("GbrModel::predict: dimension mismatch");
    Eigen::VectorXd out = Eigen::VectorXd::Constant(X.rows(), init_value_);
    for (const auto& tree : trees_)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            out(i) += config_.learning_rate * tree.predict_row(X.row(i));
    return out;
}

Eigen::VectorXd GbrModel::importance() const {
    if (trees_.empty()) throw ArgumentError("importance: model has no trees");
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(n_features_);
    for (const auto& tree : trees_)
        for (const auto& nd : tree.nodes)
            if (nd.feature >= 0) scores(nd.feature) += nd.gain;
    double total = scores.sum();
    if (total <= 0)
        return Eigen::VectorXd::Constant(n_features_, 1.0 / n_features_);
    return scores / total;
}

std::string GbrModel::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "gbr";
    j["init_value"] = init_value_;
    j["n_features"] = n_features_;
    j["learning_rate"] = config_.learning_rate;
    j["trees"] = nlohmann::json::array();
    for (const auto& tree : trees_) {
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& nd : tree.nodes)
            tj.push_back({{"f", nd.feature},
                          {"t", nd.threshold},
                          {"v", nd.value},
                          {"g", nd.gain},
                          {"l", nd.left},
                          {"r", nd.right}});
        j["trees"].push_back(tj);
    }
    return j.dump();
}

GbrModel GbrModel::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.value("format_version", 0) != 1 || j.value("kind", "") != "gbr")
        throw DataError("GbrModel::from_json: unrecognized model blob");
    GbrModel model;
    model.init_value_ = j["init_value"].get<double>();
    model.n_features_ = j["n_features"].get<int>();
    model.config_.learning_rate = j["learning_rate"].get<double>();
    for (const auto& tj : j["trees"]) {
        RegressionTree tree;
        for (const auto& nj : tj) {
            TreeNode nd;
            nd.feature = nj["f"].get<int>();
            nd.threshold = nj["t"].get<double>();
            nd.value = nj["v"].get<double>();
            nd.gain = nj["g"].get<double>();
            nd.left = nj["l"].get<int>();
            nd.right = nj["r"].get<int>();
            tree.nodes.push_back(nd);
        }
        model.trees_.push_back(std::move(tree));
    }
    return model;
}

}  // namespace solarcast
