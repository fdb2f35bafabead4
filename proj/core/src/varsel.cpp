#include "solarcast/varsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "solarcast/dataset.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/gbr.hpp"
#include "solarcast/quantile.hpp"
#include "solarcast/scoring.hpp"

namespace solarcast {

namespace {

double soft_threshold(double z, double g) {
    if (z > g) return z - g;
    if (z < -g) return z + g;
    return 0.0;
}

double enet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      const Eigen::VectorXd& b, double lambda,
                      double alpha_mix) {
    double n = static_cast<double>(X.rows());
    double fit = (y - X * b).squaredNorm() / (2.0 * n);
    return fit + lambda * (alpha_mix * b.lpNorm<1>() +
                           0.5 * (1.0 - alpha_mix) * b.squaredNorm());
}

}  // namespace

Eigen::VectorXd elastic_net(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                            double lambda, double alpha_mix, double tol,
                            int max_sweeps) {
    if (lambda < 0) throw ArgumentError("elastic_net: lambda must be >= 0");
    if (alpha_mix < 0 || alpha_mix > 1)
        throw ArgumentError("elastic_net: alpha_mix must lie in [0,1]");
    const Eigen::Index n = X.rows(), p = X.cols();
    const double N = static_cast<double>(n);

    Eigen::VectorXd col_sq(p);
    for (Eigen::Index j = 0; j < p; ++j) col_sq(j) = X.col(j).squaredNorm() / N;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd resid = y;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (col_sq(j) == 0) continue;
            double old = beta(j);
            double rho = X.col(j).dot(resid) / N + col_sq(j) * old;
            double next = soft_threshold(rho, lambda * alpha_mix) /
                          (col_sq(j) + lambda * (1.0 - alpha_mix));
            if (next != old) {
                resid += X.col(j) * (old - next);
                beta(j) = next;
                max_delta = std::max(max_delta, std::abs(next - old));
            }
        }
        if (max_delta < tol) return beta;
    }
    double res_norm = resid.norm();
    throw NumericalError("elastic_net: no convergence in " +
                         std::to_string(max_sweeps) +
                         " sweeps (residual norm " + std::to_string(res_norm) +
                         ")");
}

Eigen::VectorXd lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                      double lambda, double tol, int max_sweeps) {
    return elastic_net(X, y, lambda, 1.0, tol, max_sweeps);
}

double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    double m = 0;
    const double N = static_cast<double>(X.rows());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        m = std::max(m, std::abs(X.col(j).dot(y)) / N);
    return m;
}

std::string to_string(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::kLasso: return "Lasso";
        case SelectionMethod::kElasticNet: return "ElasticNet";
        case SelectionMethod::kGbr: return "GBR";
    }
    return "?";
}

double evaluate_selection(const std::vector<std::string>& selected,
                          const DatasetSplit& split) {
    if (selected.empty())
        throw ArgumentError("evaluate_selection: empty selection");
    Eigen::MatrixXd Xtr = covariate_matrix(split.train, selected);
    Eigen::VectorXd ytr = Eigen::Map<const Eigen::VectorXd>(
        split.train.ghi.data(), static_cast<Eigen::Index>(split.train.rows()));
    LqrModel lqr = fit_lqr(Xtr, ytr, {0.5});

    Eigen::MatrixXd Xte = covariate_matrix(split.test, selected);
    Eigen::VectorXd pred = lqr.predict_level(Xte, 0);
    std::vector<double> p(pred.data(), pred.data() + pred.size());
    return mae(split.test.ghi, p);
}

namespace {

// Pick lambda by expanding-window validation MSE, time order preserved.
double pick_lambda(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   double alpha_mix, const SelectionConfig& cfg) {
    double lmax = lasso_lambda_max(X, y);
    if (lmax <= 0) return 0.0;
    std::vector<double> grid(cfg.lambda_grid);
    for (int g = 0; g < cfg.lambda_grid; ++g) {
        double t = static_cast<double>(g) /
                   std::max(1, cfg.lambda_grid - 1);
        grid[g] = lmax * std::pow(1e-4, t);
    }

    const Eigen::Index n = X.rows();
    double best_err = std::numeric_limits<double>::infinity();
    double best_lambda = grid.front();
    for (double lam : grid) {
        double err = 0;
        int segments = 0;
        for (int f = 1; f <= cfg.folds; ++f) {
            Eigen::Index fit_end = n * f / (cfg.folds + 1);
            Eigen::Index val_end = n * (f + 1) / (cfg.folds + 1);
            if (fit_end < 2 || val_end <= fit_end) continue;
            Eigen::VectorXd b = elastic_net(X.topRows(fit_end), y.head(fit_end),
                                            lam, alpha_mix, 1e-6, 20000);
            err += (y.segment(fit_end, val_end - fit_end) -
                    X.middleRows(fit_end, val_end - fit_end) * b)
                       .squaredNorm();
            ++segments;
        }
        if (segments == 0) continue;
        if (err < best_err) {
            best_err = err;
            best_lambda = lam;
        }
    }
    return best_lambda;
}

}  // namespace

SelectionResult select(SelectionMethod method, const DatasetSplit& split,
                       const SelectionConfig& config) {
    std::vector<std::string> candidates(kCovariateNames.begin(),
                                        kCovariateNames.end());
    const auto d = candidates.size();

    SelectionResult result;
    result.method = to_string(method);
    result.weights.assign(d, 0.0);

    if (method == SelectionMethod::kGbr) {
        Eigen::MatrixXd X = covariate_matrix(split.train, candidates);
        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
            split.train.ghi.data(),
            static_cast<Eigen::Index>(split.train.rows()));
        GbrConfig gcfg;
        gcfg.n_trees = 200;
        gcfg.seed = config.seed;
        GbrModel model = GbrModel::fit(X, y, gcfg);
        Eigen::VectorXd imp = model.importance();
        double threshold = 1.0 / (2.0 * static_cast<double>(d));
        for (std::size_t j = 0; j < d; ++j) {
            result.weights[j] = imp(static_cast<Eigen::Index>(j));
            if (imp(static_cast<Eigen::Index>(j)) > threshold)
                result.selected.push_back(candidates[j]);
        }
    } else {
        double alpha_mix =
            method == SelectionMethod::kLasso ? 1.0 : config.alpha_mix;
        DesignMatrix dm = design_matrix(split.train, candidates, true);
        Eigen::VectorXd yc = dm.y.array() - dm.y.mean();
        double lam = pick_lambda(dm.X, yc, alpha_mix, config);
        Eigen::VectorXd beta = elastic_net(dm.X, yc, lam, alpha_mix);
        for (std::size_t j = 0; j < d; ++j) {
            result.weights[j] = beta(static_cast<Eigen::Index>(j));
            if (beta(static_cast<Eigen::Index>(j)) != 0.0)
                result.selected.push_back(candidates[j]);
        }
    }

    if (result.selected.empty()) {
        // Fall back to the single strongest candidate.
        std::size_t best = 0;
        for (std::size_t j = 1; j < d; ++j)
            if (std::abs(result.weights[j]) > std::abs(result.weights[best]))
                best = j;
        result.selected.push_back(candidates[best]);
    }

    result.mae = evaluate_selection(result.selected, split);
    return result;
}

}  // namespace solarcast
