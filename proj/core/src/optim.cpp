#include "solarcast/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace solarcast {

namespace {
double safe_eval(const std::function<double(const Eigen::VectorXd&)>& f,
                 const Eigen::VectorXd& x, int& evals) {
    ++evals;
    double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}
}  // namespace

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double initial_step,
                             int max_iters, double tol) {
    const int n = static_cast<int>(x0.size());
    NelderMeadResult res;
    int evals = 0;

    std::vector<Eigen::VectorXd> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (int i = 0; i < n; ++i) pts[i + 1](i) += initial_step;
    for (int i = 0; i <= n; ++i) vals[i] = safe_eval(f, pts[i], evals);

    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    std::vector<int> order(n + 1);

    for (int iter = 0; iter < max_iters; ++iter) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return vals[a] < vals[b]; });
        int best = order[0], worst = order[n], second_worst = order[n - 1];

        if (std::isfinite(vals[worst]) &&
            std::abs(vals[worst] - vals[best]) <
                tol * (1.0 + std::abs(vals[best]))) {
            res.converged = true;
            break;
        }

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int i = 0; i <= n; ++i)
            if (i != worst) centroid += pts[i];
        centroid /= n;

        Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
        double fr = safe_eval(f, xr, evals);

        if (fr < vals[best]) {
            Eigen::VectorXd xe = centroid + gamma * (centroid - pts[worst]);
            double fe = safe_eval(f, xe, evals);
            if (fe < fr) {
                pts[worst] = xe;
                vals[worst] = fe;
            } else {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        } else if (fr < vals[second_worst]) {
            pts[worst] = xr;
            vals[worst] = fr;
        } else {
            Eigen::VectorXd xc = centroid + rho * (pts[worst] - centroid);
            double fc = safe_eval(f, xc, evals);
            if (fc < vals[worst]) {
                pts[worst] = xc;
                vals[worst] = fc;
            } else {
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    pts[i] = pts[best] + sigma * (pts[i] - pts[best]);
                    vals[i] = safe_eval(f, pts[i], evals);
                }
            }
        }
    }

    int best = static_cast<int>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = vals[best];
    res.evaluations = evals;
    return res;
}

}  // namespace solarcast
