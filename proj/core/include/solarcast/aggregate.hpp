#pragma once

#include <optional>
#include <string>
#include <vector>

namespace solarcast {

enum class AggregateLoss { kSquare, kPinball };

/// Sequential convex aggregation of expert forecasts: exponentially
/// weighted averaging with an optional fixed-share mixing step.
struct ExpertMixture {
    std::vector<std::string> experts;
    std::vector<double> weights;  // convex after every update
    AggregateLoss loss = AggregateLoss::kSquare;
    double tau = 0.5;                 // pinball level when loss == kPinball
    double learning_rate = 0.0;       // 0 means "auto"
    double fixed_share = 0.0;         // mixing fraction; 0 disables
    // Adaptive learning-rate bookkeeping.
    double loss_range = 0.0;
    std::size_t updates_seen = 0;
};

ExpertMixture init_mixture(const std::vector<std::string>& experts,
                           const std::vector<double>* prior_weights = nullptr);

/// Convex combination of the current expert values.
double predict(const ExpertMixture& mix, const std::vector<double>& expert_values);

/// Exponentially weighted update on the realized losses; renormalizes and
/// applies fixed-share mixing when configured. Non-finite losses skip the
/// update.
ExpertMixture update(const ExpertMixture& mix,
                     const std::vector<double>& expert_values, double actual);

/// Run a whole stream: predict-then-update at each step. Returns the
/// aggregated forecasts and, if requested, the weight trajectory
/// (row t = weights used for prediction at t).
struct AggregateRun {
    std::vector<double> forecasts;
    std::vector<std::vector<double>> weight_path;
};

AggregateRun run_aggregation(ExpertMixture mix,
                             const std::vector<std::vector<double>>& expert_values,
                             const std::vector<double>& actuals);

}  // namespace solarcast
