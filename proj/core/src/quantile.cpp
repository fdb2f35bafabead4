#include "solarcast/quantile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "solarcast/errors.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

std::vector<double> default_tau_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 19; ++i) g.push_back(i * 0.05);
    return g;
}

double pinball(double y, double q, double tau) {
    if (!(tau > 0.0 && tau < 1.0))
        throw ArgumentError("pinball: tau must lie in (0,1)");
    double d = std::abs(y - q);
    return y < q ? 2.0 * (1.0 - tau) * d : 2.0 * tau * d;
}

void QuantileForecast::rearrange() {
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        Eigen::RowVectorXd row = values.row(i);
        std::sort(row.data(), row.data() + row.size());
        values.row(i) = row;
    }
}

std::vector<double> QuantileForecast::median() const {
    std::vector<double> out(times());
    // Locate 0.5 on the grid, interpolating between neighbors if absent.
    std::size_t hi = 0;
    while (hi < levels.size() && levels[hi] < 0.5) ++hi;
    for (std::size_t t = 0; t < times(); ++t) {
        auto ti = static_cast<Eigen::Index>(t);
        if (hi == 0) {
            out[t] = values(ti, 0);
        } else if (hi >= levels.size()) {
            out[t] = values(ti, values.cols() - 1);
        } else if (levels[hi] == 0.5) {
            out[t] = values(ti, static_cast<Eigen::Index>(hi));
        } else {
            double lo_lv = levels[hi - 1], hi_lv = levels[hi];
            double w = (0.5 - lo_lv) / (hi_lv - lo_lv);
            out[t] = (1 - w) * values(ti, static_cast<Eigen::Index>(hi - 1)) +
                     w * values(ti, static_cast<Eigen::Index>(hi));
        }
    }
    return out;
}

namespace {

double pinball_objective(const Eigen::VectorXd& r, double tau) {
    double s = 0;
    for (Eigen::Index i = 0; i < r.size(); ++i)
        s += r(i) >= 0 ? tau * r(i) : (tau - 1.0) * r(i);
    return s;
}

// Penalized pinball minimizer via iteratively reweighted least squares on a
// smoothed |r|, with the smoothing driven toward zero. `penalty` may be
// empty (no regularization).
Eigen::VectorXd solve_pinball(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              double tau, const Eigen::MatrixXd& penalty) {
    const Eigen::Index n = X.rows(), p = X.cols();
    if (n == 0) throw ArgumentError("solve_pinball: empty design");

    double scale = std::max(1e-8, std::sqrt(y.squaredNorm() / std::max<Eigen::Index>(n, 1)));
    Eigen::VectorXd beta =
        (X.transpose() * X + 1e-10 * scale * Eigen::MatrixXd::Identity(p, p))
            .ldlt()
            .solve(X.transpose() * y);

    auto objective = [&](const Eigen::VectorXd& b) {
        Eigen::VectorXd r = y - X * b;
        double obj = pinball_objective(r, tau);
        if (penalty.size() > 0) obj += b.dot(penalty * b);
        return obj;
    };

    double best = objective(beta);
    for (double eps = 1e-2 * scale; eps > 1e-12 * scale; eps *= 0.1) {
        for (int it = 0; it < 60; ++it) {
            Eigen::VectorXd r = y - X * beta;
            Eigen::VectorXd w =
                (r.array().square() + eps * eps).sqrt().inverse() * 0.5;
            Eigen::MatrixXd A = X.transpose() * (w.asDiagonal() * X);
            if (penalty.size() > 0) A += 2.0 * penalty;
            A.diagonal().array() += 1e-12 * scale;
            Eigen::VectorXd rhs = X.transpose() * (w.cwiseProduct(y)) +
                                  (tau - 0.5) * X.colwise().sum().transpose();
            Eigen::VectorXd cand = A.ldlt().solve(rhs);
            double obj = objective(cand);
            double delta = (cand - beta).norm();
            if (obj <= best + 1e-12 * (1.0 + std::abs(best))) {
                beta = cand;
                if (obj > best - 1e-10 * (1.0 + std::abs(best)) &&
                    delta < 1e-10 * (1.0 + beta.norm())) {
                    best = std::min(best, obj);
                    break;
                }
                best = std::min(best, obj);
            } else {
                break;  // smoothing too coarse for further progress
            }
        }
    }
    return beta;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& X) {
    Eigen::MatrixXd Z(X.rows(), X.cols() + 1);
    Z.col(0).setOnes();
    Z.rightCols(X.cols()) = X;
    return Z;
}

void check_levels(const std::vector<double>& levels) {
    if (levels.empty()) throw ArgumentError("no quantile levels given");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0 && levels[i] < 1))
            throw ArgumentError("quantile level outside (0,1)");
        if (i > 0 && levels[i] <= levels[i - 1])
            throw ArgumentError("quantile levels must be strictly increasing");
    }
}

}  // namespace

Eigen::VectorXd LqrModel::predict_level(const Eigen::MatrixXd& X,
                                        std::size_t l) const {
    if (X.cols() + 1 != coef.rows())
        throw ArgumentError("LqrModel::predict: feature count mismatch");
    return with_intercept(X) * coef.col(static_cast<Eigen::Index>(l));
}

QuantileForecast LqrModel::predict(const Eigen::MatrixXd& X) const {
    QuantileForecast qf;
    qf.levels = levels;
    qf.values.resize(X.rows(), static_cast<Eigen::Index>(levels.size()));
    Eigen::MatrixXd Z = with_intercept(X);
    for (std::size_t l = 0; l < levels.size(); ++l)
        qf.values.col(static_cast<Eigen::Index>(l)) =
            Z * coef.col(static_cast<Eigen::Index>(l));
    qf.rearrange();
    qf.set_point_from_median();
    return qf;
}

LqrModel fit_lqr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const std::vector<double>& levels) {
    check_levels(levels);
    Eigen::MatrixXd Z = with_intercept(X);
    LqrModel model;
    model.levels = levels;
    model.coef.resize(Z.cols(), static_cast<Eigen::Index>(levels.size()));
    Eigen::MatrixXd no_penalty;
    for (std::size_t l = 0; l < levels.size(); ++l)
        model.coef.col(static_cast<Eigen::Index>(l)) =
            solve_pinball(Z, y, levels[l], no_penalty);
    return model;
}

SplineBasis SplineBasis::build(const Eigen::VectorXd& x, int dim) {
    if (dim < 4) throw ArgumentError("spline basis_dim must be >= 4");
    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (static_cast<int>(sorted.size()) < dim)
        throw ArgumentError("spline basis_dim exceeds distinct covariate values");

    double lo = sorted.front(), hi = sorted.back();
    double pad = 1e-8 * std::max(1.0, hi - lo);
    SplineBasis b;
    b.dim = dim;
    b.knots.assign(4, lo - pad);
    int interior = dim - 4;
    for (int k = 1; k <= interior; ++k) {
        double q = static_cast<double>(k) / (interior + 1);
        double pos = q * (sorted.size() - 1);
        auto idx = static_cast<std::size_t>(pos);
        double frac = pos - static_cast<double>(idx);
        double val = sorted[idx];
        if (idx + 1 < sorted.size())
            val = (1 - frac) * sorted[idx] + frac * sorted[idx + 1];
        b.knots.push_back(val);
    }
    b.knots.insert(b.knots.end(), 4, hi + pad);
    return b;
}

namespace {
// Cox-de Boor value of basis function i, degree d, at x.
double bspline_value(const std::vector<double>& t, int i, int d, double x) {
    if (d == 0)
        return (t[i] <= x && x < t[i + 1]) ? 1.0 : 0.0;
    double left = 0, right = 0;
    double dl = t[i + d] - t[i];
    if (dl > 0) left = (x - t[i]) / dl * bspline_value(t, i, d - 1, x);
    double dr = t[i + d + 1] - t[i + 1];
    if (dr > 0)
        right = (t[i + d + 1] - x) / dr * bspline_value(t, i + 1, d - 1, x);
    return left + right;
}
}  // namespace

Eigen::MatrixXd SplineBasis::evaluate(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd B(x.size(), dim);
    double lo = knots.front(), hi = knots.back();
    double hi_in = std::nexttoward(hi, lo);  // keep x < last knot
    for (Eigen::Index r = 0; r < x.size(); ++r) {
        double xv = std::clamp(x(r), lo, hi_in);
        for (int j = 0; j < dim; ++j) B(r, j) = bspline_value(knots, j, 3, xv);
    }
    return B;
}

Eigen::MatrixXd AdditiveQuantileModel::expand(const Eigen::MatrixXd& X) const {
    if (static_cast<std::size_t>(X.cols()) != smooth.size())
        throw ArgumentError("AdditiveQuantileModel: feature count mismatch");
    Eigen::Index total = 1;
    for (std::size_t j = 0; j < smooth.size(); ++j)
        total += smooth[j] ? bases[j].dim : 1;
    Eigen::MatrixXd Z(X.rows(), total);
    Z.col(0).setOnes();
    Eigen::Index col = 1;
    for (std::size_t j = 0; j < smooth.size(); ++j) {
        auto jc = static_cast<Eigen::Index>(j);
        if (smooth[j]) {
            Z.middleCols(col, bases[j].dim) = bases[j].evaluate(X.col(jc));
            col += bases[j].dim;
        } else {
            Z.col(col++) = X.col(jc);
        }
    }
    return Z;
}

QuantileForecast AdditiveQuantileModel::predict(const Eigen::MatrixXd& X) const {
    Eigen::MatrixXd Z = expand(X);
    QuantileForecast qf;
    qf.levels = levels;
    qf.values.resize(X.rows(), static_cast<Eigen::Index>(levels.size()));
    for (std::size_t l = 0; l < levels.size(); ++l)
        qf.values.col(static_cast<Eigen::Index>(l)) =
            Z * coef.col(static_cast<Eigen::Index>(l));
    qf.rearrange();
    qf.set_point_from_median();
    return qf;
}

namespace {

AdditiveQuantileModel fit_additive(const Eigen::MatrixXd& X,
                                   const Eigen::VectorXd& y,
                                   const std::vector<bool>& smooth,
                                   int basis_dim, double penalty_weight,
                                   const std::vector<double>& levels) {
    check_levels(levels);
    if (smooth.size() != static_cast<std::size_t>(X.cols()))
        throw ArgumentError("smooth-flag count must match feature count");

    AdditiveQuantileModel model;
    model.levels = levels;
    model.smooth = smooth;
    model.bases.resize(smooth.size());
    for (std::size_t j = 0; j < smooth.size(); ++j)
        if (smooth[j])
            model.bases[j] =
                SplineBasis::build(X.col(static_cast<Eigen::Index>(j)), basis_dim);

    Eigen::MatrixXd Z = model.expand(X);
    const Eigen::Index p = Z.cols();

    // Second-difference penalty per smooth block; linear terms unpenalized.
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(p, p);
    Eigen::Index col = 1;
    for (std::size_t j = 0; j < smooth.size(); ++j) {
        if (!smooth[j]) {
            ++col;
            continue;
        }
        int q = model.bases[j].dim;
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(q - 2, q);
        for (int r = 0; r < q - 2; ++r) {
            D(r, r) = 1;
            D(r, r + 1) = -2;
            D(r, r + 2) = 1;
        }
        P.block(col, col, q, q) = penalty_weight * (D.transpose() * D);
        // Small ridge keeps the intercept/partition-of-unity confound tame.
        P.block(col, col, q, q).diagonal().array() += 1e-8;
        col += q;
    }

    model.coef.resize(p, static_cast<Eigen::Index>(levels.size()));
    for (std::size_t l = 0; l < levels.size(); ++l)
        model.coef.col(static_cast<Eigen::Index>(l)) =
            solve_pinball(Z, y, levels[l], P);
    return model;
}

}  // namespace

AdditiveQuantileModel fit_aqr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const AqrSpec& spec,
                              const std::vector<double>& levels) {
    std::vector<bool> smooth = spec.smooth;
    if (smooth.empty()) smooth.assign(static_cast<std::size_t>(X.cols()), true);
    return fit_additive(X, y, smooth, spec.basis_dim, spec.penalty, levels);
}

AdditiveQuantileModel fit_plaqr(const Eigen::MatrixXd& X,
                                const Eigen::VectorXd& y,
                                const std::vector<bool>& smooth_features,
                                int basis_dim, double penalty,
                                const std::vector<double>& levels) {
    return fit_additive(X, y, smooth_features, basis_dim, penalty, levels);
}

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct QrnnParams {
    Eigen::MatrixXd w;  // m x (d+1), column 0 is the bias
    Eigen::VectorXd v;  // m+1, entry 0 is the bias
};

Eigen::VectorXd qrnn_forward(const QrnnParams& th, const Eigen::MatrixXd& X,
                             Eigen::MatrixXd* hidden_out = nullptr) {
    const Eigen::Index n = X.rows();
    const Eigen::Index m = th.w.rows();
    Eigen::MatrixXd A = (X * th.w.rightCols(X.cols()).transpose()).rowwise() +
                        th.w.col(0).transpose();
    Eigen::MatrixXd H = A.unaryExpr([](double z) { return sigmoid(z); });
    if (hidden_out) *hidden_out = H;
    Eigen::VectorXd f = Eigen::VectorXd::Constant(n, th.v(0));
    f += H * th.v.tail(m);
    return f;
}

// Huber-smoothed pinball: |tau - 1{u<0}| * h_eps(u).
double smoothed_pinball(double u, double tau, double eps) {
    double a = u >= 0 ? tau : 1.0 - tau;
    double h = std::abs(u) <= eps ? u * u / (2 * eps) : std::abs(u) - eps / 2;
    return a * h;
}

double smoothed_pinball_grad(double u, double tau, double eps) {
    double a = u >= 0 ? tau : 1.0 - tau;
    double dh = std::abs(u) <= eps ? u / eps : (u > 0 ? 1.0 : -1.0);
    return a * dh;
}

}  // namespace

Eigen::VectorXd QrnnModel::predict_level(const Eigen::MatrixXd& X,
                                         std::size_t l) const {
    if (x_mean.size() != X.cols())
        throw ArgumentError("QrnnModel::predict: feature count mismatch");
    Eigen::MatrixXd Z = X;
    for (Eigen::Index j = 0; j < Z.cols(); ++j)
        Z.col(j) = (Z.col(j).array() - x_mean(j)) / x_scale(j);
    QrnnParams th{hidden_w[l], output_w[l]};
    Eigen::VectorXd f = qrnn_forward(th, Z);
    return (f.array() * y_scale + y_mean).matrix();
}

QuantileForecast QrnnModel::predict(const Eigen::MatrixXd& X) const {
    QuantileForecast qf;
    qf.levels = levels;
    qf.values.resize(X.rows(), static_cast<Eigen::Index>(levels.size()));
    for (std::size_t l = 0; l < levels.size(); ++l)
        qf.values.col(static_cast<Eigen::Index>(l)) = predict_level(X, l);
    qf.rearrange();
    qf.set_point_from_median();
    return qf;
}

QrnnModel fit_qrnn(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const std::vector<double>& levels, const QrnnConfig& cfg) {
    check_levels(levels);
    if (cfg.hidden < 1) throw ArgumentError("QRNN needs at least one hidden unit");
    const Eigen::Index n = X.rows(), d = X.cols();
    const int m = cfg.hidden;

    QrnnModel model;
    model.levels = levels;
    model.x_mean.resize(d);
    model.x_scale.resize(d);
    Eigen::MatrixXd Z = X;
    for (Eigen::Index j = 0; j < d; ++j) {
        model.x_mean(j) = X.col(j).mean();
        double sd = n > 1 ? std::sqrt((X.col(j).array() - model.x_mean(j))
                                          .square()
                                          .sum() /
                                      (n - 1))
                          : 0.0;
        model.x_scale(j) = sd > 0 ? sd : 1.0;
        Z.col(j) = (X.col(j).array() - model.x_mean(j)) / model.x_scale(j);
    }
    model.y_mean = y.mean();
    double ysd =
        n > 1 ? std::sqrt((y.array() - model.y_mean).square().sum() / (n - 1))
              : 0.0;
    model.y_scale = ysd > 0 ? ysd : 1.0;
    Eigen::VectorXd ys = (y.array() - model.y_mean) / model.y_scale;

    auto loss = [&](const QrnnParams& th, double tau, double eps) {
        Eigen::VectorXd f = qrnn_forward(th, Z);
        double L = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            L += smoothed_pinball(ys(i) - f(i), tau, eps);
        L /= static_cast<double>(n);
        L += cfg.l1 * th.w.squaredNorm() + cfg.l2 * th.v.tail(m).squaredNorm();
        return L;
    };

    auto gradient = [&](const QrnnParams& th, double tau, double eps,
                        QrnnParams& g) {
        Eigen::MatrixXd H;
        Eigen::VectorXd f = qrnn_forward(th, Z, &H);
        Eigen::VectorXd dldf(n);
        for (Eigen::Index i = 0; i < n; ++i)
            dldf(i) = -smoothed_pinball_grad(ys(i) - f(i), tau, eps) /
                      static_cast<double>(n);
        g.v = Eigen::VectorXd::Zero(m + 1);
        g.v(0) = dldf.sum();
        g.v.tail(m) = H.transpose() * dldf + 2.0 * cfg.l2 * th.v.tail(m);
        Eigen::MatrixXd dH =
            (dldf * th.v.tail(m).transpose()).cwiseProduct(
                H.cwiseProduct((1.0 - H.array()).matrix()));
        g.w.resize(m, d + 1);
        g.w.col(0) = dH.colwise().sum().transpose();
        g.w.rightCols(d) = dH.transpose() * Z;
        g.w += 2.0 * cfg.l1 * th.w;
    };

    auto true_loss = [&](const QrnnParams& th, double tau) {
        Eigen::VectorXd f = qrnn_forward(th, Z);
        double L = 0;
        for (Eigen::Index i = 0; i < n; ++i) L += pinball(ys(i), f(i), tau);
        return L / static_cast<double>(n);
    };

    model.hidden_w.resize(levels.size());
    model.output_w.resize(levels.size());
    const std::array<double, 3> eps_schedule = {1.0, 0.1, 0.01};

    for (std::size_t l = 0; l < levels.size(); ++l) {
        double tau = levels[l];
        QrnnParams best_params;
        double best_final = std::numeric_limits<double>::infinity();
        for (int restart = 0; restart < cfg.restarts; ++restart) {
            Rng rng = derive_rng(cfg.seed, 4200 + 97 * l + restart);
            QrnnParams th;
            th.w = Eigen::MatrixXd::NullaryExpr(
                m, d + 1, [&]() { return 0.3 * rand_normal(rng); });
            th.v = Eigen::VectorXd::NullaryExpr(
                m + 1, [&]() { return 0.3 * rand_normal(rng); });

            int iters_per_stage = cfg.iters / static_cast<int>(eps_schedule.size());
            for (double eps : eps_schedule) {
                // Adam with learning-rate backoff on non-finite loss; the
                // best-seen parameters are restored at the end of each stage.
                double lr = 0.05;
                const double b1 = 0.9, b2 = 0.999;
                Eigen::MatrixXd mw = Eigen::MatrixXd::Zero(m, d + 1);
                Eigen::MatrixXd vw = mw;
                Eigen::VectorXd mv = Eigen::VectorXd::Zero(m + 1);
                Eigen::VectorXd vv = mv;
                QrnnParams best_stage = th;
                double best_stage_loss = loss(th, tau, eps);
                int backoffs = 0;
                QrnnParams g;
                for (int it = 1; it <= iters_per_stage; ++it) {
                    gradient(th, tau, eps, g);
                    mw = b1 * mw + (1 - b1) * g.w;
                    vw = b2 * vw + (1 - b2) * g.w.cwiseAbs2();
                    mv = b1 * mv + (1 - b1) * g.v;
                    vv = b2 * vv + (1 - b2) * g.v.cwiseAbs2();
                    double c1 = 1 - std::pow(b1, it), c2 = 1 - std::pow(b2, it);
                    th.w -= lr * (mw / c1).cwiseQuotient(
                                     ((vw / c2).cwiseSqrt().array() + 1e-8)
                                         .matrix());
                    th.v -= lr * (mv / c1).cwiseQuotient(
                                     ((vv / c2).cwiseSqrt().array() + 1e-8)
                                         .matrix());
                    double cl = loss(th, tau, eps);
                    if (!std::isfinite(cl)) {
                        if (++backoffs > 30)
                            throw NumericalError(
                                "QRNN training loss stayed non-finite");
                        lr *= 0.5;
                        th = best_stage;
                        mw.setZero(); vw.setZero();
                        mv.setZero(); vv.setZero();
                        continue;
                    }
                    if (cl < best_stage_loss) {
                        best_stage_loss = cl;
                        best_stage = th;
                    }
                }
                th = best_stage;
            }
            double final = true_loss(th, tau);
            if (final < best_final) {
                best_final = final;
                best_params = th;
            }
        }
        if (!std::isfinite(best_final))
            throw NumericalError("QRNN training produced no finite loss");
        model.hidden_w[l] = best_params.w;
        model.output_w[l] = best_params.v;
    }
    return model;
}

CombineResult combine(const std::map<std::string, std::vector<double>>& experts,
                      const std::vector<double>& actual, CombineMethod method,
                      const CombineOptions& opts) {
    if (experts.empty()) throw ArgumentError("combine: no expert forecasts");
    const std::size_t n = actual.size();
    for (const auto& [name, col] : experts)
        if (col.size() != n)
            throw ArgumentError("combine: expert '" + name +
                                "' not aligned with actuals");

    auto n_fit =
        static_cast<std::size_t>(opts.train_fraction * static_cast<double>(n));
    if (n_fit == 0 || n_fit >= n)
        throw ArgumentError("combine: window too short to split");

    const auto k = static_cast<Eigen::Index>(experts.size());
    Eigen::MatrixXd Xall(static_cast<Eigen::Index>(n), k);
    std::vector<std::string> names;
    {
        Eigen::Index j = 0;
        for (const auto& [name, col] : experts) {
            names.push_back(name);
            for (std::size_t i = 0; i < n; ++i)
                Xall(static_cast<Eigen::Index>(i), j) = col[i];
            ++j;
        }
    }

    // Fit rows: leading window, optionally with night hours removed.
    std::vector<std::size_t> fit_rows;
    for (std::size_t i = 0; i < n_fit; ++i)
        if (!opts.exclude_night_from_fit || actual[i] > 0.0)
            fit_rows.push_back(i);
    if (fit_rows.size() < experts.size() + 2)
        throw ArgumentError("combine: too few rows left to fit the combiner");

    Eigen::MatrixXd Xfit(static_cast<Eigen::Index>(fit_rows.size()), k);
    Eigen::VectorXd yfit(static_cast<Eigen::Index>(fit_rows.size()));
    for (std::size_t r = 0; r < fit_rows.size(); ++r) {
        Xfit.row(static_cast<Eigen::Index>(r)) =
            Xall.row(static_cast<Eigen::Index>(fit_rows[r]));
        yfit(static_cast<Eigen::Index>(r)) = actual[fit_rows[r]];
    }
    Eigen::MatrixXd Xeval = Xall.bottomRows(static_cast<Eigen::Index>(n - n_fit));

    CombineResult res;
    res.eval_begin = n_fit;
    res.expert_names = names;
    switch (method) {
        case CombineMethod::kQra: {
            LqrModel m = fit_lqr(Xfit, yfit, opts.levels);
            res.forecast = m.predict(Xeval);
            break;
        }
        case CombineMethod::kQrnn: {
            QrnnConfig cfg;
            cfg.seed = opts.seed;
            QrnnModel m = fit_qrnn(Xfit, yfit, opts.levels, cfg);
            res.forecast = m.predict(Xeval);
            break;
        }
        case CombineMethod::kPlaqr: {
            // First expert enters through a smooth, the rest linearly.
            std::vector<bool> smooth(experts.size(), false);
            smooth[0] = true;
            AdditiveQuantileModel m =
                fit_plaqr(Xfit, yfit, smooth, 10, 1.0, opts.levels);
            res.forecast = m.predict(Xeval);
            break;
        }
    }
    return res;
}

}  // namespace solarcast
