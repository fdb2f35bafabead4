// Microbenchmarks for the numerical hot spots.

#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "solarcast/bsts.hpp"
#include "solarcast/gbr.hpp"
#include "solarcast/gp.hpp"
#include "solarcast/rng.hpp"
#include "solarcast/scoring.hpp"
#include "solarcast/varsel.hpp"

namespace {

using namespace solarcast;

Eigen::MatrixXd random_matrix(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 1);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) X(i, j) = rand_normal(rng);
    return X;
}

Eigen::VectorXd random_targets(const Eigen::MatrixXd& X, std::uint64_t seed) {
    Rng rng = derive_rng(seed, 2);
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        y(i) = std::sin(X(i, 0)) + 0.1 * rand_normal(rng);
    return y;
}

void BM_GpFactorizePredict(benchmark::State& state) {
    const Eigen::Index n = state.range(0);
    Eigen::MatrixXd X = random_matrix(n, 4, 7);
    Eigen::VectorXd y = random_targets(X, 7);
    Eigen::MatrixXd Xs = random_matrix(64, 4, 8);
    for (auto _ : state) {
        GpModel gp(X, y, KernelParams{1.0, 1.0, 0.1});
        benchmark::DoNotOptimize(gp.predict(Xs));
    }
}
BENCHMARK(BM_GpFactorizePredict)->Arg(128)->Arg(512);

void BM_KalmanFilter(benchmark::State& state) {
    StateSpaceSpec spec;
    spec.seasonal24 = true;
    spec.state_noise_var = Eigen::VectorXd::Constant(3, 0.5);
    Rng rng = derive_rng(11, 3);
    std::vector<double> y(static_cast<std::size_t>(state.range(0)));
    for (double& v : y) v = rand_normal(rng);
    for (auto _ : state) benchmark::DoNotOptimize(kalman_filter(spec, y));
}
BENCHMARK(BM_KalmanFilter)->Arg(720)->Arg(4096);

void BM_GbrFit(benchmark::State& state) {
    Eigen::MatrixXd X = random_matrix(state.range(0), 8, 13);
    Eigen::VectorXd y = random_targets(X, 13);
    GbrConfig cfg;
    cfg.n_trees = 100;
    for (auto _ : state) benchmark::DoNotOptimize(GbrModel::fit(X, y, cfg));
}
BENCHMARK(BM_GbrFit)->Arg(512)->Arg(2048);

void BM_Crps(benchmark::State& state) {
    GammaFit f{2.3, 140.0, 0.0};
    double y = 310.0;
    for (auto _ : state) benchmark::DoNotOptimize(crps(f, y));
}
BENCHMARK(BM_Crps);

void BM_LassoPath(benchmark::State& state) {
    Eigen::MatrixXd X = random_matrix(1024, 8, 17);
    Eigen::VectorXd y = random_targets(X, 17);
    double lmax = lasso_lambda_max(X, y);
    for (auto _ : state)
        benchmark::DoNotOptimize(lasso(X, y, 0.1 * lmax));
}
BENCHMARK(BM_LassoPath);

}  // namespace

BENCHMARK_MAIN();
