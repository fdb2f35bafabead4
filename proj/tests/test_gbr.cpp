#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/gbr.hpp"

using namespace solarcast;

TEST_SUITE("gbr") {

TEST_CASE("zero trees: predictions collapse to the training mean") {
    Eigen::MatrixXd X = testutil::random_matrix(12, 2, 100);
    Eigen::VectorXd y(12);
    for (int i = 0; i < 12; ++i) y(i) = 1.0 + i;
    GbrConfig cfg;
    cfg.n_trees = 0;
    GbrModel m = GbrModel::fit(X, y, cfg);
    CHECK(m.tree_count() == 0);
    Eigen::VectorXd p = m.predict(X);
    for (int i = 0; i < 12; ++i)
        CHECK(p(i) == doctest::Approx(y.mean()).epsilon(1e-14));
}

TEST_CASE("interpolation: noiseless N=8 driven to ~zero residuals") {
    Eigen::MatrixXd X(8, 1);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
        X(i, 0) = i;
        y(i) = std::sin(1.7 * i) + 0.2 * i;
    }
    GbrConfig cfg;
    cfg.n_trees = 400;
    cfg.max_depth = 6;
    cfg.learning_rate = 1.0;
    cfg.min_leaf = 1;
    GbrModel m = GbrModel::fit(X, y, cfg);
    Eigen::VectorXd r = y - m.predict(X);
    CHECK(r.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("training loss path is non-increasing with full-data stages") {
    auto frame = testutil::make_hourly_frame(96, 101);
    Eigen::MatrixXd X = testutil::random_matrix(96, 3, 102);
    Eigen::VectorXd y(96);
    for (int i = 0; i < 96; ++i)
        y(i) = 2.0 * X(i, 0) - X(i, 1) * X(i, 2) + 0.1 * X(i, 2);
    GbrConfig cfg;
    cfg.n_trees = 60;
    cfg.subsample = 1.0;
    GbrModel m = GbrModel::fit(X, y, cfg);
    const std::vector<double>& path = m.training_loss_path();
    REQUIRE(path.size() == m.tree_count());
    for (std::size_t s = 1; s < path.size(); ++s)
        CHECK(path[s] <= path[s - 1] + 1e-12);
    (void)frame;
}

TEST_CASE("constant features degenerate to the base prediction") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Constant(20, 2, 3.0);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y(i) = i % 4;
    GbrConfig cfg;
    cfg.n_trees = 25;
    GbrModel m = GbrModel::fit(X, y, cfg);
    Eigen::VectorXd p = m.predict(X);
    for (int i = 0; i < 20; ++i)
        CHECK(p(i) == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("hand-traced depth-1 tree evaluation") {
    RegressionTree tree;
    tree.nodes.resize(3);
    tree.nodes[0].feature = 0;
    tree.nodes[0].threshold = 2.5;
    tree.nodes[0].left = 1;
    tree.nodes[0].right = 2;
    tree.nodes[1].feature = -1;
    tree.nodes[1].value = -4.0;
    tree.nodes[2].feature = -1;
    tree.nodes[2].value = 7.0;
    Eigen::RowVectorXd lo(1), at(1), hi(1);
    lo << 1.0;
    at << 2.5;  // boundary goes left
    hi << 2.6;
    CHECK(tree.predict_row(lo) == -4.0);
    CHECK(tree.predict_row(at) == -4.0);
    CHECK(tree.predict_row(hi) == 7.0);
}

TEST_CASE("predict is an argument error on feature-count mismatch") {
    Eigen::MatrixXd X = testutil::random_matrix(30, 2, 103);
    Eigen::VectorXd y = X.col(0);
    GbrConfig cfg;
    cfg.n_trees = 5;
    GbrModel m = GbrModel::fit(X, y, cfg);
    CHECK_THROWS_AS(m.predict(testutil::random_matrix(4, 3, 104)), ArgumentError);
}

TEST_CASE("refit predictions are reproducible (deterministic training)") {
    Eigen::MatrixXd X = testutil::random_matrix(50, 3, 105);
    Eigen::VectorXd y = X.col(0).array().sin() + X.col(1).array();
    GbrConfig cfg;
    cfg.n_trees = 40;
    cfg.subsample = 0.8;
    cfg.seed = 9;
    GbrModel a = GbrModel::fit(X, y, cfg);
    GbrModel b = GbrModel::fit(X, y, cfg);
    CHECK((a.predict(X) - b.predict(X)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("row-permutation invariance of the fitted predictor") {
    const int n = 40;
    Eigen::MatrixXd X = testutil::random_matrix(n, 2, 106);
    Eigen::VectorXd y = 3.0 * X.col(0) - X.col(1);
    GbrConfig cfg;
    cfg.n_trees = 30;
    GbrModel base = GbrModel::fit(X, y, cfg);

    // Reverse the training rows; the greedy split search sorts by value with
    // deterministic tie-breaks, so the fitted function is unchanged.
    Eigen::MatrixXd Xr = X.colwise().reverse();
    Eigen::VectorXd yr = y.reverse();
    GbrModel rev = GbrModel::fit(Xr, yr, cfg);
    Eigen::MatrixXd probe = testutil::random_matrix(25, 2, 107);
    CHECK((base.predict(probe) - rev.predict(probe)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("importance: dominant feature, normalization, column symmetry") {
    const int n = 200;
    Eigen::MatrixXd X = testutil::random_matrix(n, 2, 108);
    Rng noise = derive_rng(108, 21);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y(i) = 3.0 * X(i, 0) + 0.01 * rand_normal(noise);
    GbrConfig cfg;
    cfg.n_trees = 80;
    GbrModel m = GbrModel::fit(X, y, cfg);
    Eigen::VectorXd imp = m.importance();
    CHECK(imp(0) > 0.95);
    CHECK(imp.sum() == doctest::Approx(1.0).epsilon(1e-12));

    // Swap the feature columns: the importance vector swaps with them.
    Eigen::MatrixXd Xs(n, 2);
    Xs.col(0) = X.col(1);
    Xs.col(1) = X.col(0);
    Eigen::VectorXd imp_s = GbrModel::fit(Xs, y, cfg).importance();
    CHECK(imp_s(1) == doctest::Approx(imp(0)).epsilon(1e-9));
    CHECK(imp_s(0) == doctest::Approx(imp(1)).epsilon(1e-9));
}

TEST_CASE("importance: no trees rejected, splitless trees give uniform scores") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Constant(16, 4, 1.0);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(16, 0.0, 1.0);
    GbrConfig cfg;
    cfg.n_trees = 10;
    GbrModel empty = GbrModel::fit(X, y, cfg);
    CHECK(empty.tree_count() == 0);
    CHECK_THROWS_AS(empty.importance(), ArgumentError);

    // A persisted model whose single tree is one leaf: scores fall back to
    // the uniform distribution over the features.
    const char* blob = R"({
        "format_version": 1, "kind": "gbr", "init_value": 0.5,
        "n_features": 4, "learning_rate": 0.1,
        "trees": [[{"f": -1, "t": 0.0, "v": 1.0, "g": 0.0, "l": -1, "r": -1}]]
    })";
    Eigen::VectorXd imp = GbrModel::from_json(blob).importance();
    for (int j = 0; j < 4; ++j)
        CHECK(imp(j) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("json round trip preserves predictions exactly") {
    Eigen::MatrixXd X = testutil::random_matrix(60, 3, 109);
    Eigen::VectorXd y = X.col(0).array() * X.col(1).array();
    GbrConfig cfg;
    cfg.n_trees = 25;
    GbrModel m = GbrModel::fit(X, y, cfg);
    GbrModel back = GbrModel::from_json(m.to_json());
    Eigen::MatrixXd probe = testutil::random_matrix(30, 3, 110);
    CHECK((m.predict(probe) - back.predict(probe)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.tree_count() == m.tree_count());
    CHECK(back.init_value() == m.init_value());
}

}  // TEST_SUITE
