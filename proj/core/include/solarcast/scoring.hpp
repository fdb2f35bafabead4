#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

namespace solarcast {

struct QuantileForecast;  // quantile.hpp

/// Shifted Gamma predictive distribution. The fit adds +shift to the data
/// so that observed zeros land inside the support; the distribution of the
/// original variable therefore lives on (-shift, inf).
struct GammaFit {
    double shape = 1.0;  // k
    double scale = 1.0;  // theta
    double shift = 0.0;  // epsilon added to the data before fitting

    double mean() const { return shape * scale - shift; }
    double sd() const;
    double pdf(double y) const;
    double cdf(double y) const;
    double quantile(double p) const;
};

double mae(const std::vector<double>& actual,
           const std::vector<double>& forecast);
double rmse(const std::vector<double>& actual,
            const std::vector<double>& forecast);

/// Maximum-likelihood Gamma fit (Newton on the digamma equation, moment
/// start). `samples` must already be strictly positive after subtracting
/// `shift`. Requires >= 10 samples with positive variance.
GammaFit fit_gamma(const std::vector<double>& samples, double shift = 0.0);

/// CRPS of a Gamma predictive via adaptive quadrature (abs tol 1e-6).
double crps(const GammaFit& f, double y);

/// Negative log predictive density; +inf where the density is zero.
double logs(const GammaFit& f, double y);

/// Dawid-Sebastiani score from predictive mean and standard deviation.
double dss(double mean_f, double sd_f, double y);

/// Mean pinball loss over all (time, level) cells of a quantile forecast,
/// using the doubled convention 2(tau - 1{y<q})(y - q).
double pl(const QuantileForecast& forecast, const std::vector<double>& actual);

double pinball_loss(double y, double q, double tau);  // doubled convention

/// Elementary (extremal) quantile score at threshold theta.
double elementary_score(double q, double y, double theta, double tau);

struct MurphyCurve {
    std::string model;
    double tau = 0.5;
    std::vector<double> thetas;
    std::vector<double> mean_scores;
};

MurphyCurve murphy(const std::string& model, const std::vector<double>& forecast,
                   const std::vector<double>& actual, double tau,
                   int grid_size = 101);

/// Pointwise difference a - b on a shared theta grid.
MurphyCurve murphy_difference(const MurphyCurve& a, const MurphyCurve& b);

struct ScoreRow {
    std::string model;
    double mae = std::numeric_limits<double>::quiet_NaN();
    double rmse = std::numeric_limits<double>::quiet_NaN();
    double crps = std::numeric_limits<double>::quiet_NaN();
    double logs = std::numeric_limits<double>::quiet_NaN();
    double dss = std::numeric_limits<double>::quiet_NaN();
    double pinball = std::numeric_limits<double>::quiet_NaN();
    std::size_t zero_density_count = 0;  // observations outside Gamma support
};

struct ScoreReport {
    std::vector<ScoreRow> rows;
    std::string window;
    std::string night_policy;
};

enum class GammaMode {
    kForecastValues,  // Gamma fitted to the forecast values themselves
    kPredictiveErrors  // conventional: Gamma on point forecast + error spread
};

struct ScoringOptions {
    bool exclude_night_hours = false;  // drop rows where actual GHI == 0
    double gamma_shift = 0.01;         // W/m^2, keeps zeros inside support
    GammaMode gamma_mode = GammaMode::kForecastValues;
};

/// Full scoring of one model: point metrics plus Gamma-based proper scores.
/// `quantiles` may be null when only a point forecast exists (PL is NaN).
ScoreRow score_model(const std::string& model,
                     const std::vector<double>& point_forecast,
                     const QuantileForecast* quantiles,
                     const std::vector<double>& actual,
                     const ScoringOptions& opts);

}  // namespace solarcast
