#include "solarcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "solarcast/bsts.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/dgp.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/fetch.hpp"
#include "solarcast/gbr.hpp"
#include "solarcast/gp.hpp"
#include "solarcast/svg.hpp"
#include "solarcast/varsel.hpp"

namespace solarcast {

namespace {

const std::set<std::string> kKnownModels = {"GPR", "GBR", "BSTS_long",
                                            "BSTS_short", "DGP"};
const std::set<std::string> kKnownCombiners = {"QRA", "QRNN", "PLAQR"};
const std::set<std::string> kKnownSelections = {"gbr", "lasso", "elasticnet",
                                                "none"};

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<double> tau_grid_of(const PipelineConfig& cfg) {
    return cfg.tau_grid.empty() ? default_tau_grid() : cfg.tau_grid;
}

}  // namespace

void PipelineConfig::validate() const {
    if (source != "synthetic" && source != "csv" && source != "url")
        throw ConfigError("config: unknown data source '" + source + "'");
    if (source != "synthetic" && path.empty())
        throw ConfigError("config: data source '" + source + "' needs a path");
    if (source == "synthetic" && synthetic_days < 2)
        throw ConfigError("config: synthetic_days must be >= 2");
    if (!(split_ratio > 0 && split_ratio < 1))
        throw ConfigError("config: split_ratio must lie in (0,1)");
    if (!kKnownSelections.count(selection))
        throw ConfigError("config: unknown selection method '" + selection + "'");
    if (models.empty()) throw ConfigError("config: model roster is empty");
    for (const std::string& m : models)
        if (!kKnownModels.count(m))
            throw ConfigError("config: unknown model '" + m + "'");
    if (horizon < 1) throw ConfigError("config: horizon must be >= 1");
    for (const std::string& c : combiners)
        if (!kKnownCombiners.count(c))
            throw ConfigError("config: unknown combiner '" + c + "'");
    for (double t : tau_grid)
        if (!(t > 0 && t < 1))
            throw ConfigError("config: tau levels must lie in (0,1)");
    if (!std::is_sorted(tau_grid.begin(), tau_grid.end()))
        throw ConfigError("config: tau grid must be increasing");
    if (output_dir.empty()) throw ConfigError("config: output_dir is empty");
    if (gp_restarts < 1 || gbr_trees < 1 || bsts_iterations <= bsts_burn_in ||
        bsts_thin < 1 || bsts_short_days < 2 ||
        dgp_iterations <= dgp_burn_in || dgp_thin < 1)
        throw ConfigError("config: invalid model budget");
}

std::string PipelineConfig::to_json() const {
    nlohmann::json j;
    j["data"] = {{"source", source},
                 {"path", path},
                 {"synthetic_days", synthetic_days}};
    j["split_ratio"] = split_ratio;
    j["selection"] = selection;
    j["models"] = models;
    j["horizon"] = horizon;
    j["combiners"] = combiners;
    j["tau_grid"] = tau_grid_of(*this);
    j["scoring"] = {
        {"exclude_night_hours", scoring.exclude_night_hours},
        {"gamma_shift", scoring.gamma_shift},
        {"gamma_mode", scoring.gamma_mode == GammaMode::kForecastValues
                           ? "forecast_values"
                           : "predictive_errors"}};
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["persistence_covariates"] = persistence_covariates;
    j["budgets"] = {{"gp_restarts", gp_restarts},
                    {"gbr_trees", gbr_trees},
                    {"bsts_iterations", bsts_iterations},
                    {"bsts_burn_in", bsts_burn_in},
                    {"bsts_thin", bsts_thin},
                    {"bsts_short_days", bsts_short_days},
                    {"dgp_iterations", dgp_iterations},
                    {"dgp_burn_in", dgp_burn_in},
                    {"dgp_thin", dgp_thin}};
    return j.dump(2);
}

PipelineConfig PipelineConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    PipelineConfig cfg;
    try {
        if (j.contains("data")) {
            const auto& d = j["data"];
            cfg.source = d.value("source", cfg.source);
            cfg.path = d.value("path", cfg.path);
            cfg.synthetic_days = d.value("synthetic_days", cfg.synthetic_days);
        }
        cfg.split_ratio = j.value("split_ratio", cfg.split_ratio);
        cfg.selection = j.value("selection", cfg.selection);
        if (j.contains("models"))
            cfg.models = j["models"].get<std::vector<std::string>>();
        cfg.horizon = j.value("horizon", cfg.horizon);
        if (j.contains("combiners"))
            cfg.combiners = j["combiners"].get<std::vector<std::string>>();
        if (j.contains("tau_grid"))
            cfg.tau_grid = j["tau_grid"].get<std::vector<double>>();
        if (j.contains("scoring")) {
            const auto& s = j["scoring"];
            cfg.scoring.exclude_night_hours =
                s.value("exclude_night_hours", cfg.scoring.exclude_night_hours);
            cfg.scoring.gamma_shift =
                s.value("gamma_shift", cfg.scoring.gamma_shift);
            std::string mode = s.value("gamma_mode", "forecast_values");
            if (mode == "forecast_values")
                cfg.scoring.gamma_mode = GammaMode::kForecastValues;
            else if (mode == "predictive_errors")
                cfg.scoring.gamma_mode = GammaMode::kPredictiveErrors;
            else
                throw ConfigError("config: unknown gamma_mode '" + mode + "'");
        }
        cfg.output_dir = j.value("output_dir", cfg.output_dir);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.persistence_covariates =
            j.value("persistence_covariates", cfg.persistence_covariates);
        if (j.contains("budgets")) {
            const auto& b = j["budgets"];
            cfg.gp_restarts = b.value("gp_restarts", cfg.gp_restarts);
            cfg.gbr_trees = b.value("gbr_trees", cfg.gbr_trees);
            cfg.bsts_iterations = b.value("bsts_iterations", cfg.bsts_iterations);
            cfg.bsts_burn_in = b.value("bsts_burn_in", cfg.bsts_burn_in);
            cfg.bsts_thin = b.value("bsts_thin", cfg.bsts_thin);
            cfg.bsts_short_days = b.value("bsts_short_days", cfg.bsts_short_days);
            cfg.dgp_iterations = b.value("dgp_iterations", cfg.dgp_iterations);
            cfg.dgp_burn_in = b.value("dgp_burn_in", cfg.dgp_burn_in);
            cfg.dgp_thin = b.value("dgp_thin", cfg.dgp_thin);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad field: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

std::vector<double> rolling_forecast(const BlockForecaster& forecast_block,
                                     const TimeSeriesFrame& test, int horizon) {
    if (horizon < 1) throw ArgumentError("rolling_forecast: horizon must be >= 1");
    if (test.empty()) throw ArgumentError("rolling_forecast: empty test window");
    const std::size_t n = test.rows();
    const std::size_t h = static_cast<std::size_t>(horizon);
    if (n < h)
        std::cerr << "warning: test window (" << n
                  << " rows) shorter than the forecast horizon (" << h
                  << "); emitting a single truncated block\n";

    std::vector<double> out;
    out.reserve(n);
    for (std::size_t origin = 0; origin < n; origin += h) {
        std::size_t end = std::min(origin + h, n);
        TimeSeriesFrame block = test.slice(origin, end);
        std::vector<double> f = forecast_block(block, origin);
        if (f.size() != end - origin)
            throw NumericalError("rolling_forecast: block forecast size mismatch");
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

std::vector<double> model_forecast(const std::string& model,
                                   const DatasetSplit& split,
                                   const std::vector<std::string>& features,
                                   const TimeSeriesFrame& test_covariates,
                                   const PipelineConfig& cfg) {
    const TimeSeriesFrame& train = split.train;

    if (model == "GPR" || model == "DGP") {
        DesignMatrix dm = design_matrix(train, features, true);
        if (model == "GPR") {
            GpFitOptions opt;
            opt.restarts = cfg.gp_restarts;
            opt.seed = cfg.seed;
            GpModel gp = GpModel::fit(dm.X, dm.y, KernelParams{}, opt);
            return rolling_forecast(
                [&](const TimeSeriesFrame& block, std::size_t) {
                    Eigen::MatrixXd Xb =
                        dm.transform(covariate_matrix(block, features));
                    GpModel::Prediction p = gp.predict(Xb);
                    return std::vector<double>(p.mean.data(),
                                               p.mean.data() + p.mean.size());
                },
                test_covariates, cfg.horizon);
        }
        DgpFitConfig dc;
        dc.iterations = cfg.dgp_iterations;
        dc.burn_in = cfg.dgp_burn_in;
        dc.thin = cfg.dgp_thin;
        dc.seed = cfg.seed;
        DgpModel dgp = DgpModel::fit(dm.X, dm.y, dc);
        double y_mean = dm.y.mean();
        (void)y_mean;
        return rolling_forecast(
            [&](const TimeSeriesFrame& block, std::size_t) {
                Eigen::MatrixXd Xb =
                    dm.transform(covariate_matrix(block, features));
                DgpModel::Prediction p = dgp.predict(Xb);
                return std::vector<double>(p.mean.data(),
                                           p.mean.data() + p.mean.size());
            },
            test_covariates, cfg.horizon);
    }

    if (model == "GBR") {
        Eigen::MatrixXd X = covariate_matrix(train, features);
        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
            train.ghi.data(), static_cast<Eigen::Index>(train.rows()));
        GbrConfig gc;
        gc.n_trees = cfg.gbr_trees;
        gc.seed = cfg.seed;
        GbrModel gbr = GbrModel::fit(X, y, gc);
        return rolling_forecast(
            [&](const TimeSeriesFrame& block, std::size_t) {
                Eigen::VectorXd p =
                    gbr.predict(covariate_matrix(block, features));
                return std::vector<double>(p.data(), p.data() + p.size());
            },
            test_covariates, cfg.horizon);
    }

    if (model == "BSTS_long" || model == "BSTS_short") {
        TimeSeriesFrame fit_window = train;
        StateSpaceSpec spec;
        spec.level = true;
        spec.slope = true;
        spec.seasonal24 = model == "BSTS_long";
        if (model == "BSTS_short") {
            std::size_t keep =
                std::min<std::size_t>(train.rows(),
                                      static_cast<std::size_t>(cfg.bsts_short_days) * 24);
            fit_window = train.slice(train.rows() - keep, train.rows());
        }
        spec.state_noise_var =
            Eigen::VectorXd::Constant(spec.disturbance_dim(), 1.0);

        Eigen::MatrixXd X = covariate_matrix(fit_window, features);
        Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
            fit_window.ghi.data(), static_cast<Eigen::Index>(fit_window.rows()));
        SpikeSlabPrior prior =
            SpikeSlabPrior::standard(static_cast<int>(features.size()));
        BstsMcmcConfig mc;
        mc.iterations = cfg.bsts_iterations;
        mc.burn_in = cfg.bsts_burn_in;
        mc.thin = cfg.bsts_thin;
        mc.seed = cfg.seed;
        BstsModel bsts = BstsModel::fit(X, y, spec, prior, mc);

        // Posterior-mean parameters for the filtering point forecast.
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
        double obs_var = 0;
        Eigen::VectorXd svars =
            Eigen::VectorXd::Zero(spec.disturbance_dim());
        for (const BstsDraw& d : bsts.draws()) {
            beta += d.beta;
            obs_var += d.obs_var;
            svars += d.state_vars;
        }
        double nd = static_cast<double>(bsts.draws().size());
        beta /= nd;
        obs_var /= nd;
        svars /= nd;
        StateSpaceSpec fspec = spec;
        fspec.obs_noise_var = obs_var;
        fspec.state_noise_var = svars;

        const Eigen::VectorXd Z = fspec.observation();
        const Eigen::MatrixXd T = fspec.transition();

        // Filter once over the fit window; per block, advance the filter
        // through the already-observed test rows before the origin, then
        // extrapolate the state deterministically through the block.
        return rolling_forecast(
            [&, Z, T](const TimeSeriesFrame& block, std::size_t origin) {
                KalmanState s = initial_state(fspec);
                auto feed = [&](const TimeSeriesFrame& fr, std::size_t upto) {
                    for (std::size_t t = 0; t < upto; ++t) {
                        Eigen::VectorXd x =
                            covariate_matrix(fr.slice(t, t + 1), features)
                                .row(0);
                        KalmanStepResult step =
                            kalman_step(s, fspec, fr.ghi[t], x, beta);
                        s = step.state;
                    }
                };
                feed(fit_window, fit_window.rows());
                feed(test_covariates, origin);

                Eigen::MatrixXd Xb = covariate_matrix(block, features);
                std::vector<double> out(block.rows());
                Eigen::VectorXd alpha = s.state_mean;  // one-step-ahead
                for (std::size_t h = 0; h < block.rows(); ++h) {
                    out[h] = Z.dot(alpha) +
                             beta.dot(Xb.row(static_cast<Eigen::Index>(h)));
                    alpha = T * alpha;
                }
                return out;
            },
            test_covariates, cfg.horizon);
    }

    throw ConfigError("unknown model '" + model + "'");
}

namespace {

/// Replace covariates by their value `horizon` hours earlier (train tail
/// fills the first rows), so forecast-time inputs predate each origin.
TimeSeriesFrame persistence_view(const TimeSeriesFrame& train,
                                 const TimeSeriesFrame& test, int horizon) {
    TimeSeriesFrame out = test;
    const std::size_t h = static_cast<std::size_t>(horizon);
    for (int c = 0; c < kNumCovariates; ++c) {
        for (std::size_t t = 0; t < out.rows(); ++t) {
            if (t >= h) {
                out.covariates[c][t] = test.covariates[c][t - h];
            } else {
                std::size_t back = h - t;
                std::size_t src =
                    train.rows() >= back ? train.rows() - back : 0;
                out.covariates[c][t] = train.covariates[c][src];
            }
        }
    }
    return out;
}

void write_selection_csv(const std::string& path, const SelectionResult& sel) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "method,feature,weight,selected,eval_mae\n";
    for (std::size_t j = 0; j < kCovariateNames.size(); ++j) {
        bool chosen = std::find(sel.selected.begin(), sel.selected.end(),
                                kCovariateNames[j]) != sel.selected.end();
        out << sel.method << ',' << kCovariateNames[j] << ','
            << num(sel.weights[j]) << ',' << (chosen ? 1 : 0) << ','
            << num(sel.mae) << '\n';
    }
}

void write_forecast_csv(const std::string& path, const TimeSeriesFrame& test,
                        const std::vector<double>& forecast) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "timestamp,actual,forecast\n";
    for (std::size_t t = 0; t < test.rows(); ++t)
        out << format_iso8601(test.timestamps[t], test.utc_offset_minutes)
            << ',' << num(test.ghi[t]) << ',' << num(forecast[t]) << '\n';
}

void write_combined_csv(const std::string& path, const TimeSeriesFrame& test,
                        const CombineResult& res) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "timestamp,actual";
    for (double tau : res.forecast.levels) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "q%02d", static_cast<int>(100 * tau + 0.5));
        out << ',' << buf;
    }
    out << ",point\n";
    for (std::size_t t = 0; t < res.forecast.times(); ++t) {
        std::size_t row = res.eval_begin + t;
        out << format_iso8601(test.timestamps[row], test.utc_offset_minutes)
            << ',' << num(test.ghi[row]);
        for (Eigen::Index l = 0; l < res.forecast.values.cols(); ++l)
            out << ',' << num(res.forecast.values(static_cast<Eigen::Index>(t), l));
        out << ',' << num(res.forecast.point[t]) << '\n';
    }
}

void write_scores_csv(const std::string& path, const ScoreReport& report) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "model,mae,rmse,crps,logs,dss,pinball,zero_density\n";
    for (const ScoreRow& r : report.rows)
        out << r.model << ',' << num(r.mae) << ',' << num(r.rmse) << ','
            << num(r.crps) << ',' << num(r.logs) << ',' << num(r.dss) << ','
            << num(r.pinball) << ',' << r.zero_density_count << '\n';
}

void write_murphy_csv(const std::string& path,
                      const std::vector<MurphyCurve>& curves) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path);
    out << "model,tau,theta,mean_score\n";
    for (const MurphyCurve& c : curves)
        for (std::size_t i = 0; i < c.thetas.size(); ++i)
            out << c.model << ',' << num(c.tau) << ',' << num(c.thetas[i])
                << ',' << num(c.mean_scores[i]) << '\n';
}

}  // namespace

RunResult run(const PipelineConfig& config) {
    config.validate();
    namespace fs = std::filesystem;
    fs::create_directories(config.output_dir);
    auto at = [&](const std::string& name) {
        return (fs::path(config.output_dir) / name).string();
    };
    // A fresh run clears any stale failure marker.
    fs::remove(at("FAILED"));

    std::string stage = "ingest";
    RunResult result;
    try {
        // --- ingest ---
        TimeSeriesFrame raw;
        if (config.source == "synthetic") {
            raw = make_synthetic_frame(config.synthetic_days, config.seed);
        } else if (config.source == "csv") {
            raw = load_csv(config.path, CsvSchema::canonical());
        } else {
            raw = fetch_remote(config.path, DateWindow{}, CsvSchema::canonical());
        }
        TimeSeriesFrame cleaned = clean(raw, GapPolicy{});
        validate_clean(cleaned);
        write_csv(cleaned, at("cleaned.csv"));
        result.artifacts.push_back("cleaned.csv");

        // --- split ---
        stage = "split";
        DatasetSplit ds = split(cleaned, config.split_ratio);

        // --- variable selection ---
        stage = "select";
        std::vector<std::string> features(kCovariateNames.begin(),
                                          kCovariateNames.end());
        SelectionResult sel;
        if (config.selection == "none") {
            sel.method = "none";
            sel.selected = features;
            sel.weights.assign(features.size(), 1.0);
            sel.mae = evaluate_selection(features, ds);
        } else {
            SelectionMethod m = config.selection == "gbr"
                                    ? SelectionMethod::kGbr
                                    : config.selection == "lasso"
                                          ? SelectionMethod::kLasso
                                          : SelectionMethod::kElasticNet;
            SelectionConfig sc;
            sc.seed = config.seed;
            sel = select(m, ds, sc);
            features = sel.selected;
        }
        write_selection_csv(at("selection.csv"), sel);
        result.artifacts.push_back("selection.csv");

        // --- fit + rolling forecasts ---
        stage = "forecast";
        TimeSeriesFrame test_inputs =
            config.persistence_covariates
                ? persistence_view(ds.train, ds.test, config.horizon)
                : ds.test;
        std::map<std::string, std::vector<double>> forecasts;
        for (const std::string& model : config.models) {
            forecasts[model] =
                model_forecast(model, ds, features, test_inputs, config);
            std::string name = "forecast_" + model + ".csv";
            write_forecast_csv(at(name), ds.test, forecasts[model]);
            result.artifacts.push_back(name);
        }

        // --- combine ---
        stage = "combine";
        std::map<std::string, CombineResult> combined;
        for (const std::string& comb : config.combiners) {
            CombineMethod method = comb == "QRA" ? CombineMethod::kQra
                                   : comb == "QRNN" ? CombineMethod::kQrnn
                                                    : CombineMethod::kPlaqr;
            CombineOptions co;
            co.levels = tau_grid_of(config);
            co.seed = config.seed;
            combined[comb] = combine(forecasts, ds.test.ghi, method, co);
            std::string name = "combined_" + comb + ".csv";
            write_combined_csv(at(name), ds.test, combined[comb]);
            result.artifacts.push_back(name);
        }

        // --- score ---
        stage = "score";
        result.scores.window = "test";
        result.scores.night_policy =
            config.scoring.exclude_night_hours ? "excluded" : "included";
        for (const std::string& model : config.models)
            result.scores.rows.push_back(score_model(
                model, forecasts[model], nullptr, ds.test.ghi, config.scoring));
        for (const std::string& comb : config.combiners) {
            const CombineResult& cr = combined[comb];
            std::vector<double> actual(
                ds.test.ghi.begin() +
                    static_cast<std::ptrdiff_t>(cr.eval_begin),
                ds.test.ghi.end());
            result.scores.rows.push_back(score_model(
                comb, cr.forecast.point, &cr.forecast, actual, config.scoring));
        }
        write_scores_csv(at("scores.csv"), result.scores);
        result.artifacts.push_back("scores.csv");

        // --- Murphy diagrams ---
        stage = "murphy";
        std::vector<MurphyCurve> curves;
        for (const std::string& model : config.models)
            curves.push_back(murphy(model, forecasts[model], ds.test.ghi, 0.5));
        for (const std::string& comb : config.combiners) {
            const CombineResult& cr = combined[comb];
            std::vector<double> actual(
                ds.test.ghi.begin() +
                    static_cast<std::ptrdiff_t>(cr.eval_begin),
                ds.test.ghi.end());
            curves.push_back(murphy(comb, cr.forecast.point, actual, 0.5));
        }
        write_murphy_csv(at("murphy.csv"), curves);
        result.artifacts.push_back("murphy.csv");
        {
            std::vector<Series> series;
            for (const MurphyCurve& c : curves)
                series.push_back(Series{c.model, c.thetas, c.mean_scores});
            ChartOptions opts;
            opts.title = "Murphy diagram (tau = 0.5)";
            opts.x_label = "threshold";
            opts.y_label = "mean elementary score";
            write_line_chart(at("murphy.svg"), series, opts);
            result.artifacts.push_back("murphy.svg");
        }

        // --- forecast and density plots ---
        stage = "plots";
        {
            std::size_t span = std::min<std::size_t>(ds.test.rows(), 168);
            std::vector<double> hours(span);
            for (std::size_t t = 0; t < span; ++t)
                hours[t] = static_cast<double>(t);
            std::vector<Series> series;
            series.push_back(Series{
                "actual", hours,
                std::vector<double>(ds.test.ghi.begin(),
                                    ds.test.ghi.begin() +
                                        static_cast<std::ptrdiff_t>(span))});
            for (const std::string& model : config.models)
                series.push_back(Series{
                    model, hours,
                    std::vector<double>(
                        forecasts[model].begin(),
                        forecasts[model].begin() +
                            static_cast<std::ptrdiff_t>(span))});
            ChartOptions opts;
            opts.title = "Test-window forecasts (first week)";
            opts.x_label = "hour";
            opts.y_label = "GHI (W/m^2)";
            write_line_chart(at("forecast.svg"), series, opts);
            result.artifacts.push_back("forecast.svg");
        }
        {
            std::vector<Series> dens;
            dens.push_back(kernel_density(ds.test.ghi, "actual"));
            for (const std::string& model : config.models)
                dens.push_back(kernel_density(forecasts[model], model));
            ChartOptions opts;
            opts.title = "Forecast density overlays";
            opts.x_label = "GHI (W/m^2)";
            opts.y_label = "density";
            write_line_chart(at("density.svg"), dens, opts);
            result.artifacts.push_back("density.svg");
        }

        // --- manifest ---
        stage = "manifest";
        {
            nlohmann::json manifest;
            manifest["config"] = nlohmann::json::parse(config.to_json());
            manifest["seed"] = config.seed;
            manifest["versions"] = {
                {"solarcast", "0.1.0"},
                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                              std::to_string(EIGEN_MINOR_VERSION)}};
            bool ordered = ds.train.timestamps.back() <
                           ds.test.timestamps.front();
            if (!ordered)
                throw DataError("manifest: training rows do not precede test rows");
            manifest["audit"] = {
                {"train_rows", ds.train.rows()},
                {"test_rows", ds.test.rows()},
                {"train_start", format_iso8601(ds.train.timestamps.front(),
                                               ds.train.utc_offset_minutes)},
                {"train_end", format_iso8601(ds.train.timestamps.back(),
                                             ds.train.utc_offset_minutes)},
                {"test_start", format_iso8601(ds.test.timestamps.front(),
                                              ds.test.utc_offset_minutes)},
                {"test_end", format_iso8601(ds.test.timestamps.back(),
                                            ds.test.utc_offset_minutes)},
                {"train_precedes_test", ordered}};
            std::ofstream out(at("manifest.json"));
            if (!out) throw DataError("cannot write manifest.json");
            out << manifest.dump(2) << '\n';
            result.artifacts.push_back("manifest.json");
        }

        // --- report ---
        stage = "report";
        report(config.output_dir);
        result.artifacts.push_back("report.txt");
    } catch (const std::exception& e) {
        std::ofstream marker(at("FAILED"));
        marker << "stage: " << stage << '\n' << "cause: " << e.what() << '\n';
        throw;
    }
    return result;
}

namespace {

struct ParsedScoreRow {
    std::string model;
    double mae, rmse, crps;
};

std::string round12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void best_by(std::ostringstream& out, const std::vector<ParsedScoreRow>& rows,
             const std::string& metric,
             const std::function<double(const ParsedScoreRow&)>& get) {
    double best = std::numeric_limits<double>::infinity();
    for (const ParsedScoreRow& r : rows)
        if (std::isfinite(get(r))) best = std::min(best, get(r));
    if (!std::isfinite(best)) {
        out << "  " << metric << ": no finite values\n";
        return;
    }
    std::vector<std::string> winners;
    for (const ParsedScoreRow& r : rows)
        if (round12(get(r)) == round12(best)) winners.push_back(r.model);
    out << "  " << metric << ": ";
    if (winners.size() == 1) {
        out << winners[0];
    } else {
        out << "tie between ";
        for (std::size_t i = 0; i < winners.size(); ++i)
            out << (i ? ", " : "") << winners[i];
    }
    out << " (" << round12(best) << ")\n";
}

}  // namespace

std::string report(const std::string& output_dir) {
    namespace fs = std::filesystem;
    std::ostringstream out;
    out << "Forecast workbench run summary\n"
        << "==============================\n\n";

    // Artifact index.
    std::vector<std::string> expected = {"cleaned.csv",  "selection.csv",
                                         "scores.csv",   "murphy.csv",
                                         "murphy.svg",   "forecast.svg",
                                         "density.svg",  "manifest.json"};
    std::vector<std::string> dynamic;
    if (fs::exists(output_dir))
        for (const auto& entry : fs::directory_iterator(output_dir)) {
            std::string name = entry.path().filename().string();
            if (name.rfind("forecast_", 0) == 0 ||
                name.rfind("combined_", 0) == 0)
                dynamic.push_back(name);
        }
    std::sort(dynamic.begin(), dynamic.end());

    out << "Artifacts:\n";
    std::vector<std::string> missing;
    for (const std::string& name : expected) {
        bool present = fs::exists(fs::path(output_dir) / name);
        out << "  [" << (present ? 'x' : ' ') << "] " << name << '\n';
        if (!present) missing.push_back(name);
    }
    for (const std::string& name : dynamic) out << "  [x] " << name << '\n';
    if (!missing.empty()) {
        out << "Missing artifacts:";
        for (const std::string& name : missing) out << ' ' << name;
        out << '\n';
    }
    out << '\n';

    // Verdicts from the score table.
    std::ifstream scores(fs::path(output_dir) / "scores.csv");
    if (scores) {
        std::vector<ParsedScoreRow> rows;
        std::string line;
        std::getline(scores, line);  // header
        while (std::getline(scores, line)) {
            std::istringstream ls(line);
            ParsedScoreRow r;
            std::string field;
            std::getline(ls, r.model, ',');
            std::getline(ls, field, ',');
            r.mae = std::strtod(field.c_str(), nullptr);
            std::getline(ls, field, ',');
            r.rmse = std::strtod(field.c_str(), nullptr);
            std::getline(ls, field, ',');
            r.crps = std::strtod(field.c_str(), nullptr);
            if (!r.model.empty()) rows.push_back(r);
        }
        out << "Scores:\n  model  MAE  RMSE  CRPS\n";
        for (const ParsedScoreRow& r : rows)
            out << "  " << r.model << "  " << round12(r.mae) << "  "
                << round12(r.rmse) << "  " << round12(r.crps) << '\n';
        out << "\nBest model per metric:\n";
        best_by(out, rows, "MAE", [](const ParsedScoreRow& r) { return r.mae; });
        best_by(out, rows, "RMSE",
                [](const ParsedScoreRow& r) { return r.rmse; });
        best_by(out, rows, "CRPS",
                [](const ParsedScoreRow& r) { return r.crps; });
    } else {
        out << "Scores: scores.csv missing, no verdicts\n";
    }

    std::string text = out.str();
    std::ofstream file(fs::path(output_dir) / "report.txt");
    if (!file) throw DataError("cannot write report.txt");
    file << text;
    return text;
}

}  // namespace solarcast
