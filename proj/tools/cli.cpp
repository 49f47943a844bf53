#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "report.hpp"
#include "wardwatt/arima.hpp"
#include "wardwatt/error.hpp"
#include "wardwatt/evaluation.hpp"
#include "wardwatt/forecast.hpp"
#include "wardwatt/ga.hpp"
#include "wardwatt/lstm.hpp"
#include "wardwatt/metrics.hpp"
#include "wardwatt/seasonal_trend.hpp"
#include "wardwatt/synthetic.hpp"
#include "wardwatt/tune_lstm.hpp"

namespace wardwatt::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Failure inside a named pipeline stage.
struct StageError : std::runtime_error {
    StageError(std::string stage, const std::string& what) : std::runtime_error(what), stage(std::move(stage)) {}
    std::string stage;
};

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string input;
    std::string output;
    std::string model;
    std::optional<std::size_t> horizon;
    std::string strategy = "steady";
    std::string from;
    std::vector<std::string> columns;
    std::optional<std::size_t> hours;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

ojson read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    return ojson::parse(in);
}

std::vector<std::string> instant_strings(std::span<const Instant> ts) {
    std::vector<std::string> out;
    out.reserve(ts.size());
    for (auto t : ts) out.push_back(format_instant(t));
    return out;
}

class Runner {
public:
    Runner(Options opt, std::ostream& out, std::ostream& err) : opt_(std::move(opt)), out_(out), err_(err) {}

    // Resolves config, seed precedence and paths before any stage runs.
    void setup() {
        if (!opt_.config_path.empty()) cfg_ = load_config(opt_.config_path);
        std::uint64_t seed = cfg_.seed;
        if (opt_.seed) {
            seed = *opt_.seed;
        } else if (const char* env = std::getenv("WARDWATT_SEED"); env && *env) {
            char* end = nullptr;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0' || env[0] == '-') throw ConfigError("WARDWATT_SEED", "expected a non-negative integer");
            seed = v;
        }
        apply_seed(cfg_, seed);
        if (!opt_.input.empty()) cfg_.input.path = opt_.input;
        if (!opt_.output.empty()) cfg_.output_dir = opt_.output;
        validate(cfg_);
    }

    const PipelineConfig& config() const { return cfg_; }
    fs::path out_dir() const { return cfg_.output_dir; }

    template <class Fn>
    auto stage(const std::string& name, Fn&& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if constexpr (std::is_void_v<decltype(fn())>) {
                fn();
                timings_.push_back({name, seconds_since(t0)});
            } else {
                auto r = fn();
                timings_.push_back({name, seconds_since(t0)});
                return r;
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(name, e.what());
        }
    }

    void ensure_out_dir() {
        std::error_code ec;
        fs::create_directories(out_dir(), ec);
        if (ec) throw StageError("output", "cannot create '" + out_dir().string() + "': " + ec.message());
    }

    IngestedSeries ingest_raw() {
        if (cfg_.input.path.empty()) throw ConfigError("input.path", "no input file (use --input or the config)");
        if (!fs::exists(cfg_.input.path)) {
            throw ConfigError("input.path", "file '" + cfg_.input.path + "' does not exist");
        }
        return stage("ingest", [&] {
            if (!cfg_.input.timestamp_column.empty() || !cfg_.input.value_column.empty()) {
                if (cfg_.input.timestamp_column.empty() || cfg_.input.value_column.empty()) {
                    throw ConfigError("input", "set both timestamp_column and value_column, or neither");
                }
                return load_series(cfg_.input.path, cfg_.input.timestamp_column, cfg_.input.value_column);
            }
            return load_series(cfg_.input.path);
        });
    }

    TimeSeries series() {
        if (!series_) {
            const auto raw = ingest_raw();
            series_ = stage("preprocess", [&] { return preprocess(raw.series, {cfg_.forward_fill, false}); });
        }
        return *series_;
    }

    // ---- subcommands ----

    int ingest() {
        const auto raw = ingest_raw();
        const auto clean = stage("preprocess", [&] { return preprocess(raw.series, {cfg_.forward_fill, false}); });
        ensure_out_dir();
        write_series_csv(out_dir() / "clean.csv", clean);
        ojson j;
        j["rows"] = clean.size();
        j["start"] = format_instant(clean.start());
        j["end"] = format_instant(clean.end());
        auto& w = j["warnings"] = ojson::array();
        for (const auto& x : raw.warnings) w.push_back({{"row", x.row}, {"kind", x.kind}, {"message", x.message}});
        write_text(out_dir() / "ingest.json", j.dump(2) + "\n");
        out_ << j.dump() << "\n";
        return 0;
    }

    int forecast() {
        const std::string model = opt_.model;
        const auto s = series();
        const auto& ev = cfg_.evaluation;
        Forecast f;
        std::string model_json;
        if (model == "arima") {
            const auto m = stage("fit_arima", [&] {
                return arima::fit_arima(preprocess(s, {true, ev.arima_outlier_3sigma}), ev.arima_order, ev.arima_budget);
            });
            f = stage("forecast", [&] { return arima::forecast_arima(m, opt_.horizon.value_or(ev.arima_forecast_horizon)); });
            model_json = arima::to_json(m);
        } else if (model == "seasonal") {
            const auto m = stage("fit_seasonal", [&] {
                return seasonal::fit_st(preprocess(s, {true, ev.seasonal_outlier_3sigma}), ev.st);
            });
            f = stage("forecast", [&] {
                if (opt_.horizon) return seasonal::forecast_st(m, *opt_.horizon);
                return seasonal::forecast_st(m, ev.seasonal_forecast_horizon)
                    .head(std::min(ev.seasonal_forecast_take, ev.seasonal_forecast_horizon));
            });
        } else {
            const auto clean = preprocess(s, {true, ev.lstm_outlier_3sigma});
            const auto scaler = ScalerParams::fit(clean.values());
            const auto trained = stage("fit_lstm", [&] {
                const auto lags = make_lag_matrix(scaler.transform(clean.values()), lstm::kWindow);
                return lstm::train(lstm::init_network(ev.lstm_hp, ev.lstm_train.seed), lags, ev.lstm_train);
            });
            f = stage("forecast", [&] {
                return lstm::predict_multi(trained.network, clean, opt_.horizon.value_or(ev.lstm_forecast_horizon),
                                           scaler);
            });
            model_json = lstm::to_json(trained.network);
        }
        ensure_out_dir();
        const fs::path path = out_dir() / ("forecast_" + model + ".csv");
        write_forecast_csv(path.string(), f);
        if (!model_json.empty()) write_text(out_dir() / ("model_" + model + ".json"), model_json + "\n");
        out_ << ojson{{"model", model}, {"rows", f.size()}, {"file", path.string()}}.dump() << "\n";
        return 0;
    }

    ga::BalanceResult run_balance(const std::string& strategy, std::span<const double> forecast) {
        return stage("balance", [&] {
            return strategy == "worst" ? ga::run_worst_replacement(forecast, cfg_.ga)
                                       : ga::run_steady_state(forecast, cfg_.ga);
        });
    }

    int balance() {
        if (opt_.from.empty()) throw ConfigError("--from", "a forecast CSV is required");
        const Forecast f = stage("read_forecast", [&] { return read_forecast_csv(opt_.from); });
        const auto r = run_balance(opt_.strategy, f.values);
        ensure_out_dir();
        ojson j;
        j["strategy"] = opt_.strategy;
        j["source"] = opt_.from;
        j["seed"] = cfg_.ga.seed;
        j["genes"] = r.best_solution.size();
        j["best_fitness"] = r.best_fitness;
        j["initial_best_fitness"] = r.initial_best_fitness;
        j["best_solution"] = r.best_solution;
        j["fitness_history"] = r.fitness_history;
        write_text(out_dir() / ("balance_" + opt_.strategy + ".json"), j.dump(2) + "\n");
        write_text(out_dir() / ("allocation_" + opt_.strategy + ".csv"), ga::allocation_csv(r, f.values));
        out_ << ojson{{"strategy", opt_.strategy},
                      {"genes", r.best_solution.size()},
                      {"best_fitness", r.best_fitness},
                      {"initial_best_fitness", r.initial_best_fitness}}
                    .dump()
             << "\n";
        return 0;
    }

    int tune_lstm() {
        const auto s = series();
        const auto split = stage("split", [&] { return split_chronological(s, cfg_.train_fraction); });
        const auto result = stage("tune_lstm", [&] {
            const auto scaler = ScalerParams::fit(split.train.values());
            const auto train_scaled = scaler.transform(split.train.values());
            // Test windows start with the last training hours.
            std::vector<double> test_scaled(train_scaled.end() - static_cast<long>(lstm::kWindow), train_scaled.end());
            const auto tail = scaler.transform(split.test.values());
            test_scaled.insert(test_scaled.end(), tail.begin(), tail.end());
            return ga::tune_lstm(cfg_.lstm_space, make_lag_matrix(train_scaled, lstm::kWindow),
                                 make_lag_matrix(test_scaled, lstm::kWindow), scaler, cfg_.tune_lstm);
        });
        auto hp_json = [](const lstm::LstmHyperparams& hp) {
            return ojson{{"units1", hp.units1},
                         {"units2", hp.units2},
                         {"dropout1_gene", hp.dropout1_gene},
                         {"dropout2_gene", hp.dropout2_gene}};
        };
        ojson j;
        j["best"] = hp_json(result.best);
        j["best_test_mae_kw"] = -result.best_fitness;
        auto& log = j["log"] = ojson::array();
        for (const auto& e : result.log) {
            log.push_back({{"generation", e.generation}, {"hyperparams", hp_json(e.hyperparams)}, {"fitness", e.fitness}});
        }
        ensure_out_dir();
        write_text(out_dir() / "tune_lstm.json", j.dump(2) + "\n");
        out_ << ojson{{"best", j["best"]}, {"best_test_mae_kw", j["best_test_mae_kw"]}}.dump() << "\n";
        return 0;
    }

    int tune_seasonal() {
        const auto s = series();
        const auto split = stage("split", [&] { return split_chronological(s, cfg_.train_fraction); });
        const auto& ev = cfg_.evaluation;
        const auto result = stage("tune_seasonal", [&] {
            return seasonal::tune_st(preprocess(split.train, {true, ev.seasonal_outlier_3sigma}), cfg_.seasonal_ranges,
                                     ev.st, cfg_.tune_seasonal_generations, cfg_.tune_seasonal);
        });
        ojson j;
        j["changepoint_prior_scale"] = result.config.changepoint_prior_scale;
        j["seasonality_prior_scale"] = result.config.seasonality_prior_scale;
        j["holdout_rmse"] = result.holdout_rmse;
        j["generations"] = result.generations;
        auto& log = j["log"] = ojson::array();
        for (const auto& e : result.log) {
            log.push_back({{"generation", e.generation},
                           {"changepoint_prior_scale", e.changepoint_prior_scale},
                           {"seasonality_prior_scale", e.seasonality_prior_scale},
                           {"holdout_rmse", e.holdout_rmse}});
        }
        ensure_out_dir();
        write_text(out_dir() / "tune_seasonal.json", j.dump(2) + "\n");
        out_ << ojson{{"changepoint_prior_scale", j["changepoint_prior_scale"]},
                      {"seasonality_prior_scale", j["seasonality_prior_scale"]},
                      {"holdout_rmse", j["holdout_rmse"]}}
                    .dump()
             << "\n";
        return 0;
    }

    int explain() {
        const auto kind = explain::parse_model_kind(opt_.model);
        const auto s = series();
        const auto split = stage("split", [&] { return split_chronological(s, cfg_.train_fraction); });
        const auto& ev = cfg_.evaluation;
        const auto input = stage("fit_" + opt_.model, [&] {
            switch (kind) {
                case explain::ModelKind::arima: {
                    const auto m = arima::fit_arima(preprocess(split.train, {true, ev.arima_outlier_3sigma}),
                                                    ev.arima_order, ev.arima_budget);
                    return arima_surrogate_input(m, s);
                }
                case explain::ModelKind::seasonal_trend: {
                    const auto m = seasonal::fit_st(preprocess(split.train, {true, ev.seasonal_outlier_3sigma}), ev.st);
                    return seasonal_surrogate_input(m, s);
                }
                case explain::ModelKind::lstm: break;
            }
            const auto train = preprocess(split.train, {true, ev.lstm_outlier_3sigma});
            const auto scaler = ScalerParams::fit(train.values());
            const auto lags = make_lag_matrix(scaler.transform(train.values()), lstm::kWindow);
            const auto trained = lstm::train(lstm::init_network(ev.lstm_hp, ev.lstm_train.seed), lags, ev.lstm_train);
            return lstm_surrogate_input(trained.network, scaler, s);
        });
        const auto report = stage("explain", [&] { return explain::shap_report(kind, input, cfg_.shap); });
        ensure_out_dir();
        const std::string name = explain::model_kind_name(kind);
        write_text(out_dir() / ("shap_" + name + ".json"), explain::to_json(report) + "\n");
        write_text(out_dir() / ("shap_" + name + "_instances.csv"), explain::per_instance_csv(report));
        for (const auto& w : report.warnings) err_ << "wardwatt: warning[explain]: " << one_line(w) << "\n";
        ojson top = ojson::array();
        for (std::size_t i = 0; i < std::min<std::size_t>(5, report.ranking.size()); ++i) {
            top.push_back({{"name", report.ranking[i].name}, {"mean_abs_shap", report.ranking[i].mean_abs_shap}});
        }
        out_ << ojson{{"model", name}, {"surrogate_r2", report.surrogate_r2}, {"top", top}}.dump() << "\n";
        return 0;
    }

    int evaluate() {
        const auto s = series();
        EvaluationConfig ev = cfg_.evaluation;
        ev.train_fraction = cfg_.train_fraction;
        auto has = [&](const char* m) { return std::find(cfg_.models.begin(), cfg_.models.end(), m) != cfg_.models.end(); };
        const auto split = stage("split", [&] { return split_chronological(s, ev.train_fraction); });
        const std::size_t n_train = split.train.size();

        ojson j;
        j["seed"] = cfg_.seed;
        j["config"] = to_json(cfg_);
        j["dataset"] = {{"rows", s.size()}, {"start", format_instant(s.start())}, {"end", format_instant(s.end())}};
        j["split"] = {{"train_fraction", ev.train_fraction},
                      {"train_size", n_train},
                      {"test_size", split.test.size()},
                      {"evaluation_horizon", ev.horizon}};
        j["test"] = {{"timestamps", instant_strings(split.test.timestamps())}, {"actual", split.test.values()}};
        auto& models = j["models"] = ojson::array();
        ojson summary = ojson::object();
        auto record = [&](const ModelEvaluation& m) {
            models.push_back({{"model", m.model},
                              {"mae", m.metrics.mae},
                              {"rmse", m.metrics.rmse},
                              {"origins", m.origins},
                              {"predicted", m.predicted},
                              {"forecast",
                               {{"timestamps", instant_strings(m.forecast.timestamps)}, {"values", m.forecast.values}}}});
            summary[m.model] = {{"mae", m.metrics.mae}, {"rmse", m.metrics.rmse}};
        };
        if (has("arima")) record(stage("evaluate_arima", [&] { return evaluate_arima(s, n_train, ev); }));
        if (has("seasonal")) record(stage("evaluate_seasonal", [&] { return evaluate_seasonal(s, n_train, ev); }));
        if (has("lstm")) record(stage("evaluate_lstm", [&] { return evaluate_lstm(s, n_train, ev); }));

        ensure_out_dir();
        write_text(out_dir() / "evaluation.json", j.dump(2) + "\n");
        std::string csv = "model,mae,rmse\n";
        for (const auto& m : models) {
            char buf[128];
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", m["mae"].get<double>(), m["rmse"].get<double>());
            csv += m["model"].get<std::string>() + buf;
        }
        write_text(out_dir() / "comparison.csv", csv);
        out_ << summary.dump() << "\n";
        return 0;
    }

    int correlate() {
        if (cfg_.input.path.empty()) throw ConfigError("input.path", "no input file (use --input or the config)");
        if (opt_.columns.size() < 2) throw ConfigError("--columns", "name at least two columns");
        const auto cols = stage("ingest", [&] { return load_columns(cfg_.input.path, opt_.columns); });
        const auto corr = stage("correlate", [&] { return pearson_corr(cols); });
        ensure_out_dir();
        const std::string text = wardwatt::to_json(corr);
        write_text(out_dir() / "correlation.json", text + "\n");
        out_ << text << "\n";
        return 0;
    }

    int report() {
        const fs::path source = opt_.from.empty() ? out_dir() / "evaluation.json" : fs::path(opt_.from);
        if (!fs::exists(source)) {
            throw StageError("report", "'" + source.string() + "' not found; run `wardwatt evaluate` first");
        }
        const ojson ev = stage("read_evaluation", [&] { return read_json(source); });
        RunReport r;
        r.seed = ev.at("seed").get<std::uint64_t>();
        r.config = ev.at("config");
        r.split = ev.at("split");
        // The balance stage uses the evaluated run's GA settings and seed.
        PipelineConfig echo = parse_config(nlohmann::json::parse(r.config.dump()));
        const auto actual = ev.at("test").at("actual").get<std::vector<double>>();
        for (const auto& m : ev.at("models")) {
            const std::string name = m.at("model").get<std::string>();
            r.models.push_back({name, m.at("mae").get<double>(), m.at("rmse").get<double>(),
                                m.at("origins").get<std::size_t>()});
            r.charts.push_back({"forecast_vs_actual_" + name + ".svg",
                                name + ": test forecast vs actual (kW)",
                                {{"actual", actual}, {name, m.at("predicted").get<std::vector<double>>()}}});

            const auto forecast = m.at("forecast").at("values").get<std::vector<double>>();
            const std::string strategy = name == "seasonal" ? "worst" : "steady";
            const auto b = stage("balance_" + name, [&] {
                return strategy == "worst" ? ga::run_worst_replacement(forecast, echo.ga)
                                           : ga::run_steady_state(forecast, echo.ga);
            });
            BalanceSummary bs{name, strategy, forecast, b.best_solution, b.best_fitness, b.initial_best_fitness,
                              0.0, 0.0};
            for (std::size_t i = 0; i < forecast.size(); ++i) {
                const double d = std::abs(b.best_solution[i] - forecast[i]);
                bs.mean_abs_deviation += d / static_cast<double>(forecast.size());
                bs.max_abs_deviation = std::max(bs.max_abs_deviation, d);
            }
            r.balance.push_back(bs);
            r.charts.push_back({"allocation_vs_forecast_" + name + ".svg",
                                name + ": GA allocation vs forecast (kW)",
                                {{"forecast", forecast}, {"allocation", b.best_solution}}});

            const fs::path shap = out_dir() / ("shap_" + name + ".json");
            if (fs::exists(shap)) r.shap.push_back({name, read_json(shap)});
        }
        r.timings = timings_;
        const auto manifest = stage("emit_report", [&] { return emit_report(r, out_dir()); });
        ojson files = ojson::array();
        for (const auto& e : manifest) files.push_back({{"file", e.file}, {"bytes", e.bytes}});
        out_ << ojson{{"output_dir", out_dir().string()}, {"files", files}}.dump() << "\n";
        return 0;
    }

    int synth() {
        SyntheticParams p;
        if (opt_.seed) p.seed = *opt_.seed;
        if (opt_.hours) p.hours = *opt_.hours;
        const auto s = stage("synth", [&] { return generate_synthetic(p); });
        ensure_out_dir();
        const fs::path csv = out_dir() / "synthetic_hospital.csv";
        write_series_csv(csv, s, "kw");
        write_text(out_dir() / "synthetic_hospital.json", to_json(p) + "\n");
        out_ << ojson{{"file", csv.string()}, {"rows", s.size()}}.dump() << "\n";
        return 0;
    }

private:
    Options opt_;
    std::ostream& out_;
    std::ostream& err_;
    PipelineConfig cfg_;
    std::optional<TimeSeries> series_;
    std::vector<StageTiming> timings_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Hourly facility demand forecasting, load balancing and attribution", "wardwatt"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--config", opt.config_path, "JSON pipeline config");
    app.add_option("--seed", opt.seed, "Global seed (overrides WARDWATT_SEED and the config)");
    app.add_option("--input", opt.input, "Input CSV (timestamp and kW columns)");
    app.add_option("--output", opt.output, "Output directory");

    auto* ingest = app.add_subcommand("ingest", "Validate and clean the input, write clean.csv");
    auto* forecast = app.add_subcommand("forecast", "Fit one model on the full series and forecast ahead");
    forecast->add_option("--model", opt.model, "arima | seasonal | lstm")
        ->required()
        ->check(CLI::IsMember({"arima", "seasonal", "lstm"}));
    forecast->add_option("--horizon", opt.horizon, "Steps to forecast")->check(CLI::PositiveNumber);
    auto* tune_lstm = app.add_subcommand("tune-lstm", "GA search over LSTM units and dropout");
    auto* tune_seasonal = app.add_subcommand("tune-seasonal", "GA search over the seasonal-trend prior scales");
    auto* balance = app.add_subcommand("balance", "GA load allocation against a forecast CSV");
    balance->add_option("--strategy", opt.strategy, "steady | worst")->check(CLI::IsMember({"steady", "worst"}));
    balance->add_option("--from", opt.from, "Forecast CSV produced by `forecast`")->required();
    auto* explain = app.add_subcommand("explain", "Surrogate SHAP attribution over lag features");
    explain->add_option("--model", opt.model, "arima | seasonal | lstm")
        ->required()
        ->check(CLI::IsMember({"arima", "seasonal", "lstm"}));
    auto* evaluate = app.add_subcommand("evaluate", "Score all models on the chronological test split");
    auto* correlate = app.add_subcommand("correlate", "Pearson correlation between input columns");
    correlate->add_option("--columns", opt.columns, "Column names")->required()->delimiter(',');
    auto* report = app.add_subcommand("report", "Bundle report.json, comparison.csv and SVG charts");
    report->add_option("--from", opt.from, "evaluation.json (default: <output>/evaluation.json)");
    auto* synth = app.add_subcommand("synth", "Write the bundled synthetic hospital dataset");
    synth->add_option("--hours", opt.hours, "Length in hours")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "wardwatt: error[usage]: " << one_line(e.what()) << " (see `wardwatt --help`)\n";
        return 2;
    }

    Runner runner(opt, out, err);
    try {
        runner.setup();
        if (ingest->parsed()) return runner.ingest();
        if (forecast->parsed()) return runner.forecast();
        if (tune_lstm->parsed()) return runner.tune_lstm();
        if (tune_seasonal->parsed()) return runner.tune_seasonal();
        if (balance->parsed()) return runner.balance();
        if (explain->parsed()) return runner.explain();
        if (evaluate->parsed()) return runner.evaluate();
        if (correlate->parsed()) return runner.correlate();
        if (report->parsed()) return runner.report();
        if (synth->parsed()) return runner.synth();
    } catch (const ConfigError& e) {
        err << "wardwatt: error[config]: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const StageError& e) {
        err << "wardwatt: error[stage:" << e.stage << "]: " << one_line(e.what()) << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "wardwatt: error[internal]: " << one_line(e.what()) << "\n";
        return 1;
    }
    return 2;
}

}  // namespace wardwatt::cli
