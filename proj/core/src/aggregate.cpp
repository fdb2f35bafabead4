#include "solarcast/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "solarcast/errors.hpp"
#include "solarcast/quantile.hpp"

namespace solarcast {

namespace {

double expert_loss(const ExpertMixture& mix, double value, double actual) {
    if (mix.loss == AggregateLoss::kSquare) {
        double d = value - actual;
        return d * d;
    }
    return pinball(actual, value, mix.tau);
}

}  // namespace

ExpertMixture init_mixture(const std::vector<std::string>& experts,
                           const std::vector<double>* prior_weights) {
    if (experts.empty()) throw ArgumentError("init_mixture: need K >= 1 experts");
    ExpertMixture mix;
    mix.experts = experts;
    if (prior_weights) {
        if (prior_weights->size() != experts.size())
            throw ArgumentError("init_mixture: prior weight count mismatch");
        double sum = 0;
        for (double w : *prior_weights) {
            if (w < 0) throw ArgumentError("init_mixture: negative prior weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ArgumentError("init_mixture: prior weights must sum to 1");
        mix.weights = *prior_weights;
    } else {
        mix.weights.assign(experts.size(),
                           1.0 / static_cast<double>(experts.size()));
    }
    return mix;
}

double predict(const ExpertMixture& mix,
               const std::vector<double>& expert_values) {
    if (expert_values.size() != mix.weights.size())
        throw ArgumentError("predict: expert value count mismatch");
    double out = 0;
    for (std::size_t k = 0; k < mix.weights.size(); ++k)
        out += mix.weights[k] * expert_values[k];
    return out;
}

ExpertMixture update(const ExpertMixture& mix,
                     const std::vector<double>& expert_values, double actual) {
    if (expert_values.size() != mix.weights.size())
        throw ArgumentError("update: expert value count mismatch");

    std::vector<double> losses(expert_values.size());
    double lo = 0, hi = 0;
    for (std::size_t k = 0; k < expert_values.size(); ++k) {
        losses[k] = expert_loss(mix, expert_values[k], actual);
        if (!std::isfinite(losses[k])) return mix;  // skip corrupt round
        if (k == 0) {
            lo = hi = losses[k];
        } else {
            lo = std::min(lo, losses[k]);
            hi = std::max(hi, losses[k]);
        }
    }

    ExpertMixture next = mix;
    ++next.updates_seen;
    next.loss_range = std::max(mix.loss_range, hi - lo);

    double eta = mix.learning_rate;
    if (eta <= 0) {
        // Adaptive rate from the observed loss range and round count.
        double range = std::max(next.loss_range, 1e-12);
        double k = static_cast<double>(next.experts.size());
        eta = std::sqrt(8.0 * std::log(std::max(k, 2.0)) /
                        static_cast<double>(next.updates_seen)) /
              range;
    }

    double max_exp = -std::numeric_limits<double>::infinity();
    std::vector<double> log_w(next.weights.size());
    for (std::size_t k = 0; k < next.weights.size(); ++k) {
        log_w[k] = std::log(std::max(next.weights[k], 1e-300)) -
                   eta * (losses[k] - lo);
        max_exp = std::max(max_exp, log_w[k]);
    }
    double sum = 0;
    for (std::size_t k = 0; k < log_w.size(); ++k) {
        next.weights[k] = std::exp(log_w[k] - max_exp);
        sum += next.weights[k];
    }
    for (double& w : next.weights) w /= sum;

    if (next.fixed_share > 0) {
        double k = static_cast<double>(next.weights.size());
        for (double& w : next.weights)
            w = (1.0 - next.fixed_share) * w + next.fixed_share / k;
    }
    return next;
}

AggregateRun run_aggregation(ExpertMixture mix,
                             const std::vector<std::vector<double>>& expert_values,
                             const std::vector<double>& actuals) {
    if (expert_values.size() != actuals.size())
        throw ArgumentError("run_aggregation: stream length mismatch");
    AggregateRun run;
    run.forecasts.reserve(actuals.size());
    for (std::size_t t = 0; t < actuals.size(); ++t) {
        run.weight_path.push_back(mix.weights);
        run.forecasts.push_back(predict(mix, expert_values[t]));
        mix = update(mix, expert_values[t], actuals[t]);
    }
    return run;
}

}  // namespace solarcast
