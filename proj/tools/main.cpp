// Command-line front end for the forecasting workbench. Subcommands mirror
// the pipeline stages; `run` executes the whole workflow from one config.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "solarcast/bsts.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/dgp.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/fetch.hpp"
#include "solarcast/gbr.hpp"
#include "solarcast/gp.hpp"
#include "solarcast/pipeline.hpp"
#include "solarcast/quantile.hpp"
#include "solarcast/scoring.hpp"
#include "solarcast/svg.hpp"
#include "solarcast/varsel.hpp"

namespace {

using namespace solarcast;
namespace fs = std::filesystem;

struct GlobalArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
};

PipelineConfig load_config(const GlobalArgs& g) {
    PipelineConfig cfg = g.config_path.empty()
                             ? PipelineConfig{}
                             : PipelineConfig::from_file(g.config_path);
    if (g.seed_set) cfg.seed = g.seed;
    if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
    cfg.validate();
    return cfg;
}

std::string out_path(const PipelineConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

TimeSeriesFrame ingest_frame(const PipelineConfig& cfg, CleanReport* rep) {
    TimeSeriesFrame raw;
    if (cfg.source == "synthetic")
        raw = make_synthetic_frame(cfg.synthetic_days, cfg.seed);
    else if (cfg.source == "csv")
        raw = load_csv(cfg.path, CsvSchema::canonical());
    else
        raw = fetch_remote(cfg.path, DateWindow{}, CsvSchema::canonical());
    TimeSeriesFrame cleaned = clean(raw, GapPolicy{}, rep);
    validate_clean(cleaned);
    return cleaned;
}

struct StageData {
    TimeSeriesFrame cleaned;
    DatasetSplit ds;
    std::vector<std::string> features;
};

StageData prepare(const PipelineConfig& cfg) {
    StageData st;
    st.cleaned = ingest_frame(cfg, nullptr);
    st.ds = split(st.cleaned, cfg.split_ratio);
    st.features.assign(kCovariateNames.begin(), kCovariateNames.end());
    if (cfg.selection != "none") {
        SelectionMethod m = cfg.selection == "gbr" ? SelectionMethod::kGbr
                            : cfg.selection == "lasso"
                                ? SelectionMethod::kLasso
                                : SelectionMethod::kElasticNet;
        SelectionConfig sc;
        sc.seed = cfg.seed;
        st.features = select(m, st.ds, sc).selected;
    }
    return st;
}

std::map<std::string, std::vector<double>> forecasts_for(
    const PipelineConfig& cfg, const StageData& st) {
    std::map<std::string, std::vector<double>> out;
    for (const std::string& model : cfg.models)
        out[model] = model_forecast(model, st.ds, st.features, st.ds.test, cfg);
    return out;
}

int cmd_ingest(const PipelineConfig& cfg) {
    CleanReport rep;
    TimeSeriesFrame raw;
    if (cfg.source == "synthetic")
        raw = make_synthetic_frame(cfg.synthetic_days, cfg.seed);
    else if (cfg.source == "csv")
        raw = load_csv(cfg.path, CsvSchema::canonical());
    else
        raw = fetch_remote(cfg.path, DateWindow{}, CsvSchema::canonical());
    TimeSeriesFrame cleaned = clean(raw, GapPolicy{}, &rep);
    validate_clean(cleaned);
    write_csv(cleaned, out_path(cfg, "cleaned.csv"));
    std::cout << "rows in: " << raw.rows() << "\nrows out: " << cleaned.rows()
              << "\ninterpolated values: " << rep.values_interpolated
              << "\ndropped rows: " << rep.rows_dropped
              << "\nclamped GHI values: " << rep.ghi_clamped
              << "\nwrote " << out_path(cfg, "cleaned.csv") << '\n';
    return 0;
}

int cmd_select(const PipelineConfig& cfg) {
    TimeSeriesFrame cleaned = ingest_frame(cfg, nullptr);
    DatasetSplit ds = split(cleaned, cfg.split_ratio);
    SelectionConfig sc;
    sc.seed = cfg.seed;

    std::cout << "method      selected features                      eval MAE\n";
    std::ofstream csv(out_path(cfg, "selection.csv"));
    csv << "method,feature,weight,selected,eval_mae\n";
    for (SelectionMethod m : {SelectionMethod::kGbr, SelectionMethod::kLasso,
                              SelectionMethod::kElasticNet}) {
        SelectionResult r = select(m, ds, sc);
        std::cout << r.method << ":  ";
        for (const std::string& f : r.selected) std::cout << f << ' ';
        std::cout << " MAE=" << r.mae << '\n';
        for (std::size_t j = 0; j < kCovariateNames.size(); ++j) {
            bool chosen = std::find(r.selected.begin(), r.selected.end(),
                                    kCovariateNames[j]) != r.selected.end();
            csv << r.method << ',' << kCovariateNames[j] << ',' << r.weights[j]
                << ',' << (chosen ? 1 : 0) << ',' << r.mae << '\n';
        }
    }
    std::cout << "wrote " << out_path(cfg, "selection.csv") << '\n';
    return 0;
}

int cmd_fit(const PipelineConfig& cfg) {
    StageData st = prepare(cfg);
    for (const std::string& model : cfg.models) {
        if (model == "GPR") {
            DesignMatrix dm = design_matrix(st.ds.train, st.features, true);
            GpFitOptions opt;
            opt.restarts = cfg.gp_restarts;
            opt.seed = cfg.seed;
            GpModel gp = GpModel::fit(dm.X, dm.y, KernelParams{}, opt);
            std::ofstream(out_path(cfg, "model_GPR.json")) << gp.to_json();
        } else if (model == "DGP") {
            DesignMatrix dm = design_matrix(st.ds.train, st.features, true);
            DgpFitConfig dc;
            dc.iterations = cfg.dgp_iterations;
            dc.burn_in = cfg.dgp_burn_in;
            dc.thin = cfg.dgp_thin;
            dc.seed = cfg.seed;
            DgpModel dgp = DgpModel::fit(dm.X, dm.y, dc);
            std::ofstream(out_path(cfg, "model_DGP.json")) << dgp.to_json();
        } else if (model == "GBR") {
            Eigen::MatrixXd X = covariate_matrix(st.ds.train, st.features);
            Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
                st.ds.train.ghi.data(),
                static_cast<Eigen::Index>(st.ds.train.rows()));
            GbrConfig gc;
            gc.n_trees = cfg.gbr_trees;
            gc.seed = cfg.seed;
            GbrModel gbr = GbrModel::fit(X, y, gc);
            std::ofstream(out_path(cfg, "model_GBR.json")) << gbr.to_json();
        } else {  // BSTS_long / BSTS_short
            TimeSeriesFrame window = st.ds.train;
            StateSpaceSpec spec;
            spec.seasonal24 = model == "BSTS_long";
            if (model == "BSTS_short") {
                std::size_t keep = std::min<std::size_t>(
                    window.rows(),
                    static_cast<std::size_t>(cfg.bsts_short_days) * 24);
                window = window.slice(window.rows() - keep, window.rows());
            }
            spec.state_noise_var =
                Eigen::VectorXd::Constant(spec.disturbance_dim(), 1.0);
            Eigen::MatrixXd X = covariate_matrix(window, st.features);
            Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(
                window.ghi.data(), static_cast<Eigen::Index>(window.rows()));
            BstsMcmcConfig mc;
            mc.iterations = cfg.bsts_iterations;
            mc.burn_in = cfg.bsts_burn_in;
            mc.thin = cfg.bsts_thin;
            mc.seed = cfg.seed;
            BstsModel bsts = BstsModel::fit(
                X, y, spec,
                SpikeSlabPrior::standard(static_cast<int>(st.features.size())),
                mc);
            bsts.save(out_path(cfg, "model_" + model + ".csv"),
                      out_path(cfg, "model_" + model + ".meta.json"));
        }
        std::cout << "fitted " << model << '\n';
    }
    return 0;
}

int cmd_forecast(const PipelineConfig& cfg) {
    StageData st = prepare(cfg);
    auto forecasts = forecasts_for(cfg, st);
    for (const auto& [model, values] : forecasts) {
        std::string name = "forecast_" + model + ".csv";
        std::ofstream out(out_path(cfg, name));
        out << "timestamp,actual,forecast\n";
        for (std::size_t t = 0; t < st.ds.test.rows(); ++t)
            out << format_iso8601(st.ds.test.timestamps[t],
                                  st.ds.test.utc_offset_minutes)
                << ',' << st.ds.test.ghi[t] << ',' << values[t] << '\n';
        std::cout << "wrote " << out_path(cfg, name) << '\n';
    }
    return 0;
}

int cmd_combine(const PipelineConfig& cfg) {
    StageData st = prepare(cfg);
    auto forecasts = forecasts_for(cfg, st);
    std::vector<double> grid =
        cfg.tau_grid.empty() ? default_tau_grid() : cfg.tau_grid;
    for (const std::string& comb : cfg.combiners) {
        CombineMethod method = comb == "QRA" ? CombineMethod::kQra
                               : comb == "QRNN" ? CombineMethod::kQrnn
                                                : CombineMethod::kPlaqr;
        CombineOptions co;
        co.levels = grid;
        co.seed = cfg.seed;
        CombineResult res = combine(forecasts, st.ds.test.ghi, method, co);
        std::string name = "combined_" + comb + ".csv";
        std::ofstream out(out_path(cfg, name));
        out << "timestamp,actual";
        for (double tau : res.forecast.levels) out << ",q" << tau;
        out << ",point\n";
        for (std::size_t t = 0; t < res.forecast.times(); ++t) {
            std::size_t row = res.eval_begin + t;
            out << format_iso8601(st.ds.test.timestamps[row],
                                  st.ds.test.utc_offset_minutes)
                << ',' << st.ds.test.ghi[row];
            for (Eigen::Index l = 0; l < res.forecast.values.cols(); ++l)
                out << ','
                    << res.forecast.values(static_cast<Eigen::Index>(t), l);
            out << ',' << res.forecast.point[t] << '\n';
        }
        std::cout << "wrote " << out_path(cfg, name) << '\n';
    }
    return 0;
}

int cmd_score(const PipelineConfig& cfg) {
    StageData st = prepare(cfg);
    auto forecasts = forecasts_for(cfg, st);
    std::cout << "model,mae,rmse,crps,logs,dss\n";
    std::ofstream out(out_path(cfg, "scores.csv"));
    out << "model,mae,rmse,crps,logs,dss,pinball,zero_density\n";
    for (const auto& [model, values] : forecasts) {
        ScoreRow r =
            score_model(model, values, nullptr, st.ds.test.ghi, cfg.scoring);
        std::cout << r.model << ',' << r.mae << ',' << r.rmse << ',' << r.crps
                  << ',' << r.logs << ',' << r.dss << '\n';
        out << r.model << ',' << r.mae << ',' << r.rmse << ',' << r.crps << ','
            << r.logs << ',' << r.dss << ',' << r.pinball << ','
            << r.zero_density_count << '\n';
    }
    std::cout << "wrote " << out_path(cfg, "scores.csv") << '\n';
    return 0;
}

int cmd_murphy(const PipelineConfig& cfg) {
    StageData st = prepare(cfg);
    auto forecasts = forecasts_for(cfg, st);
    std::vector<Series> series;
    std::ofstream csv(out_path(cfg, "murphy.csv"));
    csv << "model,tau,theta,mean_score\n";
    for (const auto& [model, values] : forecasts) {
        MurphyCurve c = murphy(model, values, st.ds.test.ghi, 0.5);
        for (std::size_t i = 0; i < c.thetas.size(); ++i)
            csv << c.model << ',' << c.tau << ',' << c.thetas[i] << ','
                << c.mean_scores[i] << '\n';
        series.push_back(Series{c.model, c.thetas, c.mean_scores});
    }
    ChartOptions opts;
    opts.title = "Murphy diagram (tau = 0.5)";
    opts.x_label = "threshold";
    opts.y_label = "mean elementary score";
    write_line_chart(out_path(cfg, "murphy.svg"), series, opts);
    std::cout << "wrote " << out_path(cfg, "murphy.csv") << " and "
              << out_path(cfg, "murphy.svg") << '\n';
    return 0;
}

int cmd_run(const PipelineConfig& cfg) {
    RunResult res = run(cfg);
    std::cout << "run complete; " << res.artifacts.size()
              << " artifacts in " << cfg.output_dir << '\n';
    for (const ScoreRow& r : res.scores.rows)
        std::cout << "  " << r.model << ": MAE " << r.mae << ", RMSE " << r.rmse
                  << '\n';
    return 0;
}

int cmd_report(const PipelineConfig& cfg) {
    std::cout << report(cfg.output_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic solar irradiance forecasting workbench"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "Pipeline configuration (JSON)");
    auto* seed_opt = app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--out", g.out_dir, "Output directory");

    std::map<std::string, std::pair<std::string, int (*)(const PipelineConfig&)>>
        commands = {
            {"ingest", {"Load, clean, and write the dataset", cmd_ingest}},
            {"select", {"Compare variable-selection methods", cmd_select}},
            {"fit", {"Fit the model roster and persist the models", cmd_fit}},
            {"forecast", {"Rolling point forecasts over the test window",
                          cmd_forecast}},
            {"combine", {"Fit quantile combiners on the forecasts", cmd_combine}},
            {"score", {"Score the roster on the test window", cmd_score}},
            {"murphy", {"Murphy diagrams for the roster", cmd_murphy}},
            {"run", {"Full pipeline: ingest through report", cmd_run}},
            {"report", {"Summarize an existing output bundle", cmd_report}},
        };
    // Fallthrough lets the global options appear after the subcommand
    // (e.g. `solarcast run --config cfg.json`).
    for (auto& [name, entry] : commands)
        app.add_subcommand(name, entry.first)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // malformed invocation is a configuration error
    }

    try {
        g.seed_set = seed_opt->count() > 0;
        PipelineConfig cfg = load_config(g);
        for (auto& [name, entry] : commands)
            if (app.get_subcommand(name)->parsed()) return entry.second(cfg);
        return 2;
    } catch (const solarcast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const solarcast::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const solarcast::TransportError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const solarcast::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const solarcast::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
