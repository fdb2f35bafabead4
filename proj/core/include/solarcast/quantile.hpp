#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace solarcast {

/// Predictive quantiles on a common level grid. Rows are time points,
/// columns are levels. `rearrange()` enforces monotonicity across levels.
struct QuantileForecast {
    std::vector<double> levels;  // strictly increasing, in (0,1)
    Eigen::MatrixXd values;      // time x level
    std::vector<double> point;   // per-time point forecast (median)

    std::size_t times() const { return static_cast<std::size_t>(values.rows()); }

    void rearrange();
    /// Median column (interpolated when 0.5 is not on the grid).
    std::vector<double> median() const;
    void set_point_from_median() { point = median(); }
};

std::vector<double> default_tau_grid();  // 0.05, 0.10, ..., 0.95

/// Doubled pinball convention: 2(1-tau)|y-q| below, 2*tau*|y-q| at or above.
double pinball(double y, double q, double tau);

/// Linear quantile regression, one coefficient vector per level.
/// Coefficients are [intercept, beta_1..beta_d].
struct LqrModel {
    std::vector<double> levels;
    Eigen::MatrixXd coef;  // (d+1) x L

    Eigen::VectorXd predict_level(const Eigen::MatrixXd& X, std::size_t l) const;
    QuantileForecast predict(const Eigen::MatrixXd& X) const;
};

LqrModel fit_lqr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<double>& levels);

/// Additive model spec: which features get a spline smooth, basis dimension
/// per smooth term, and the roughness penalty weight.
struct AqrSpec {
    std::vector<bool> smooth;  // per feature; empty = all smooth
    int basis_dim = 10;        // q >= 4 for cubic B-splines
    double penalty = 1.0;      // lambda on the second-difference penalty
};

struct SplineBasis {
    std::vector<double> knots;  // full knot vector, degree 3
    int dim = 0;

    static SplineBasis build(const Eigen::VectorXd& x, int dim);
    Eigen::MatrixXd evaluate(const Eigen::VectorXd& x) const;
};

/// Penalized additive quantile model: linear terms enter raw, smooth terms
/// through a per-feature B-spline basis.
struct AdditiveQuantileModel {
    std::vector<double> levels;
    std::vector<bool> smooth;
    std::vector<SplineBasis> bases;  // one entry per feature (unused if linear)
    Eigen::MatrixXd coef;            // expanded-design coefficients, per level

    Eigen::MatrixXd expand(const Eigen::MatrixXd& X) const;
    QuantileForecast predict(const Eigen::MatrixXd& X) const;
};

AdditiveQuantileModel fit_aqr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const AqrSpec& spec,
                              const std::vector<double>& levels);

/// PLAQR: explicit linear/smooth partition over the features.
AdditiveQuantileModel fit_plaqr(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y,
                                const std::vector<bool>& smooth_features,
                                int basis_dim, double penalty,
                                const std::vector<double>& levels);

struct QrnnConfig {
    int hidden = 8;
    double l1 = 1e-4;  // penalty on hidden-layer weights
    double l2 = 1e-4;  // penalty on output weights
    int restarts = 3;
    int iters = 2000;
    std::uint64_t seed = 0;
};

/// One-hidden-layer quantile network per level: sigmoid hidden units,
/// linear output, trained on a Huber-smoothed pinball loss with the
/// smoothing annealed toward zero.
struct QrnnModel {
    std::vector<double> levels;
    std::vector<Eigen::MatrixXd> hidden_w;  // per level: m x (d+1)
    std::vector<Eigen::VectorXd> output_w;  // per level: m+1
    Eigen::VectorXd x_mean, x_scale;        // input standardization
    double y_mean = 0, y_scale = 1;

    Eigen::VectorXd predict_level(const Eigen::MatrixXd& X, std::size_t l) const;
    QuantileForecast predict(const Eigen::MatrixXd& X) const;
};

QrnnModel fit_qrnn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<double>& levels, const QrnnConfig& cfg);

enum class CombineMethod { kQra, kQrnn, kPlaqr };

struct CombineOptions {
    std::vector<double> levels = default_tau_grid();
    bool exclude_night_from_fit = true;  // rows with actual GHI == 0
    std::uint64_t seed = 0;
    double train_fraction = 0.5;  // leading share of the window used to fit
};

struct CombineResult {
    QuantileForecast forecast;   // on the evaluation window
    std::size_t eval_begin = 0;  // index into the input window
    std::vector<std::string> expert_names;
};

/// Fit a quantile combiner on the leading part of the window, using the
/// experts' point forecasts as covariates, and emit quantiles for the rest.
CombineResult combine(const std::map<std::string, std::vector<double>>& experts,
                      const std::vector<double>& actual, CombineMethod method,
                      const CombineOptions& opts);

}  // namespace solarcast
