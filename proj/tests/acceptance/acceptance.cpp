// Acceptance suite: one PASS/FAIL line per criterion, each with its
// runtime budget. Run with no arguments for all criteria or with criterion
// numbers to select a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "wardwatt/arima.hpp"
#include "wardwatt/evaluation.hpp"
#include "wardwatt/explain/kernel_shap.hpp"
#include "wardwatt/explain/shap_report.hpp"
#include "wardwatt/forecast.hpp"
#include "wardwatt/ga.hpp"
#include "wardwatt/lstm.hpp"
#include "wardwatt/metrics.hpp"
#include "wardwatt/seasonal_trend.hpp"
#include "wardwatt/synthetic.hpp"

namespace fs = std::filesystem;
using namespace wardwatt;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
        pass = pass && ok;
    }
};

std::string num(double v, const char* f = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Instant t0() { return *parse_instant("2021-01-01T00:00"); }

// ---------------------------------------------------------------- 1
Outcome metric_exactness() {
    Outcome o;
    const std::vector<double> a{1, 2, 3}, p{2, 2, 2};
    const Metrics m = score(a, p);
    // Hand formula: errors (1, 0, 1) -> mae 2/3, rmse sqrt(2/3).
    o.check(std::abs(m.mae - 2.0 / 3.0) <= 1e-9, "mae " + num(m.mae, "%.9f"));
    o.check(std::abs(m.rmse - std::sqrt(2.0 / 3.0)) <= 1e-9, "rmse " + num(m.rmse, "%.9f"));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 10.0);
    std::uniform_int_distribution<int> len(1, 50);
    int violations = 0;
    for (int k = 0; k < 10000; ++k) {
        const int n = len(rng);
        std::vector<double> x(n), y(n);
        for (int i = 0; i < n; ++i) x[i] = g(rng), y[i] = g(rng);
        const Metrics r = score(x, y);
        if (!(r.mae <= r.rmse)) ++violations;
    }
    o.check(violations == 0, "mae<=rmse violations " + std::to_string(violations) + "/10000");
    return o;
}

// ---------------------------------------------------------------- 2
Outcome ga_mechanics() {
    Outcome o;
    ga::Rng rng(2);
    std::uniform_real_distribution<double> gene(80.0, 120.0);
    double worst = 0.0;
    for (int k = 0; k < 100000; ++k) {
        ga::Individual p1{{gene(rng), gene(rng), gene(rng), gene(rng)}};
        ga::Individual p2{{gene(rng), gene(rng), gene(rng), gene(rng)}};
        const auto [c1, c2] = ga::sbx_crossover(p1, p2, 2.0, rng);
        for (std::size_t j = 0; j < 4; ++j) {
            worst = std::max(worst, std::abs(0.5 * (c1.genes[j] + c2.genes[j]) - 0.5 * (p1.genes[j] + p2.genes[j])));
        }
    }
    o.check(worst <= 1e-12, "SBX max mean drift " + num(worst));

    ga::Individual zero{std::vector<double>(100000, 0.0)};
    const auto mutated = ga::adaptive_mutate(zero, 50, 100, 0.2, 1.0, rng);
    std::size_t changed = 0;
    for (double g : mutated.genes) changed += g != 0.0;
    const double freq = static_cast<double>(changed) / 1e5;
    o.check(std::abs(freq - 0.1) <= 0.003, "mutation frequency " + num(freq, "%.5f"));

    std::vector<double> forecast(48);
    std::uniform_real_distribution<double> level(10.0, 500.0);
    for (auto& f : forecast) f = level(rng);
    const auto pop = ga::init_population(1000, forecast, rng);
    bool inside = true;
    for (const auto& ind : pop) {
        for (std::size_t j = 0; j < forecast.size(); ++j) {
            inside = inside && ind.genes[j] >= 0.8 * forecast[j] && ind.genes[j] <= 1.2 * forecast[j];
        }
    }
    o.check(inside, "init genes within [0.8f, 1.2f] (48000 genes)");
    return o;
}

// ---------------------------------------------------------------- 3
Outcome ga_convergence() {
    Outcome o;
    const std::vector<double> forecast(48, 100.0);
    ga::GaConfig cfg;  // population 20, 100 generations
    const auto r = ga::run_steady_state(forecast, cfg);
    const double improvement = (r.best_fitness - r.initial_best_fitness) / -r.initial_best_fitness;
    o.check(improvement >= 0.8, "improvement " + num(100 * improvement, "%.1f") + "% (initial " +
                                    num(r.initial_best_fitness, "%.1f") + ", final " + num(r.best_fitness, "%.2f") +
                                    ")");
    bool monotone = r.fitness_history.size() == 100;
    for (std::size_t g = 1; g < r.fitness_history.size(); ++g) {
        monotone = monotone && r.fitness_history[g] >= r.fitness_history[g - 1];
    }
    o.check(monotone, "best-fitness history non-decreasing");

    // Two genes on a 41-point grid per axis; a one-sided penalty moves the
    // optimum off the forecast to (95, 60).
    const std::vector<double> tiny{100.0, 60.0};
    ga::GaConfig tc;
    tc.penalty = [](std::span<const double> s) { return 3.0 * std::max(0.0, s[0] - 95.0); };
    auto fitness = [&](double a, double b) {
        const std::vector<double> s{a, b};
        return ga::load_balance_fitness(s, tiny) - tc.penalty(s);
    };
    double best = -INFINITY, best_a = 0, best_b = 0;
    const double step_a = 0.4 * tiny[0] / 40, step_b = 0.4 * tiny[1] / 40;
    for (int i = 0; i <= 40; ++i) {
        for (int k = 0; k <= 40; ++k) {
            const double a = 0.8 * tiny[0] + i * step_a, b = 0.8 * tiny[1] + k * step_b;
            const double f = fitness(a, b);
            if (f > best) best = f, best_a = a, best_b = b;
        }
    }
    const auto tr = ga::run_steady_state(tiny, tc);
    const bool near = std::abs(tr.best_solution[0] - best_a) <= step_a && std::abs(tr.best_solution[1] - best_b) <= step_b;
    o.check(near, "tiny GA (" + num(tr.best_solution[0], "%.3f") + ", " + num(tr.best_solution[1], "%.3f") +
                      ") vs grid optimum (" + num(best_a, "%.1f") + ", " + num(best_b, "%.1f") + ")");
    return o;
}

// ---------------------------------------------------------------- 4
Outcome arima_recovery() {
    Outcome o;
    std::mt19937_64 rng(4);
    std::normal_distribution<double> e(0.0, 1.0);
    std::vector<double> x(2000 + 200, 0.0);
    for (std::size_t t = 2; t < x.size(); ++t) x[t] = 0.5 * x[t - 1] - 0.3 * x[t - 2] + e(rng);
    x.erase(x.begin(), x.begin() + 200);  // burn-in
    const auto series = TimeSeries::hourly(t0(), x);
    const auto m = arima::fit_arima(series, {2, 0, 0});
    o.check(std::abs(m.ar_coeffs[0] - 0.5) <= 0.1, "phi1 " + num(m.ar_coeffs[0], "%.4f"));
    o.check(std::abs(m.ar_coeffs[1] + 0.3) <= 0.1, "phi2 " + num(m.ar_coeffs[1], "%.4f"));
    const auto os = arima::one_step_predictions(m, series);
    double model_mae = 0.0, naive_mae = 0.0;
    for (std::size_t k = 0; k < os.values.size(); ++k) {
        const std::size_t t = os.first + k;
        model_mae += std::abs(x[t] - os.values[k]);
        naive_mae += std::abs(x[t] - x[t - 1]);
    }
    model_mae /= static_cast<double>(os.values.size());
    naive_mae /= static_cast<double>(os.values.size());
    o.check(model_mae <= naive_mae, "one-step MAE " + num(model_mae, "%.4f") + " vs persistence " + num(naive_mae, "%.4f"));
    return o;
}

// ---------------------------------------------------------------- 5
Outcome seasonal_recovery() {
    Outcome o;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> e(0.0, 1.0);
    const std::size_t n_train = 24 * 28, n_test = 24 * 7;
    std::vector<double> y(n_train + n_test);
    for (std::size_t t = 0; t < y.size(); ++t) {
        y[t] = 2.0 * static_cast<double>(t) + 10.0 * std::sin(2.0 * M_PI * static_cast<double>(t) / 24.0) + e(rng);
    }
    const auto series = TimeSeries::hourly(t0(), y);
    const auto model = seasonal::fit_st(series.slice(0, n_train));
    o.check(std::abs(model.slope_per_hour() - 2.0) <= 0.1, "slope " + num(model.slope_per_hour(), "%.5f") + " kW/h");
    o.check(std::abs(model.seasonal_coeffs[0] - 10.0) <= 0.5, "daily sin1 " + num(model.seasonal_coeffs[0], "%.4f"));
    const std::span<const Instant> ts(series.timestamps().data() + n_train, n_test);
    const auto pred = seasonal::predict(model, ts);
    const Metrics m = score(std::span<const double>(y).subspan(n_train), pred);
    o.check(m.rmse <= 1.5, "out-of-sample RMSE " + num(m.rmse, "%.4f") + " (limit 1.5)");
    return o;
}

// ---------------------------------------------------------------- 6
LagMatrix sine_task() {
    std::vector<double> v(24 * 20);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = 0.5 * std::sin(2.0 * M_PI * static_cast<double>(t) / 24.0) + 0.5;
    return make_lag_matrix(v, 24);
}

Outcome lstm_correctness() {
    Outcome o;
    lstm::LstmShape tiny;
    tiny.units1 = 2;
    tiny.units2 = 2;
    tiny.dropout1 = tiny.dropout2 = 0.0;
    const auto net = lstm::init_network(tiny, 6);
    const auto data = sine_task();
    const double err = lstm::gradient_check(net, data.rows[3], data.targets[3]);
    o.check(err < 1e-4, "gradient check max rel err " + num(err, "%.3e"));

    lstm::TrainConfig cfg;  // 50 epochs, batch 32, lr 1e-3
    const auto first = lstm::train(lstm::init_network(lstm::LstmHyperparams{}, 6), data, cfg);
    const double ratio = first.epoch_loss.back() / first.epoch_loss.front();
    o.check(ratio <= 0.1, "epoch 50 / epoch 1 loss " + num(ratio, "%.4f"));
    const auto second = lstm::train(lstm::init_network(lstm::LstmHyperparams{}, 6), data, cfg);
    o.check(first.epoch_loss == second.epoch_loss, "loss trace bit-identical across runs");
    return o;
}

// ---------------------------------------------------------------- 7
Outcome table3_ordering() {
    Outcome o;
    const auto series = generate_synthetic();
    const auto r = evaluate_models(series, EvaluationConfig{});
    const double arima = r.models[0].metrics.mae, st = r.models[1].metrics.mae, lstm = r.models[2].metrics.mae;
    o.check(lstm < st && st < arima, "test MAE lstm " + num(lstm, "%.2f") + " < seasonal " + num(st, "%.2f") +
                                         " < arima " + num(arima, "%.2f"));
    return o;
}

// ---------------------------------------------------------------- 8
Outcome shap_soundness() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t m = 8;
    std::vector<double> beta(m), x(m);
    for (auto& b : beta) b = g(rng);
    for (auto& v : x) v = g(rng);
    explain::FeatureRows bg(40, std::vector<double>(m));
    for (auto& row : bg) {
        for (auto& v : row) v = g(rng);
    }
    const explain::Predictor linear = [&](std::span<const double> z) {
        return std::inner_product(beta.begin(), beta.end(), z.begin(), 0.25);
    };
    const auto sv = explain::kernel_shap(linear, x, bg);
    double worst = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        double mean = 0.0;
        for (const auto& row : bg) mean += row[j];
        mean /= static_cast<double>(bg.size());
        worst = std::max(worst, std::abs(sv.phi[j] - beta[j] * (x[j] - mean)));
    }
    o.check(sv.exact && worst <= 1e-8, "linear closed form max error " + num(worst, "%.2e"));

    // Persistence forecaster on the pinned dataset.
    const auto series = generate_synthetic();
    explain::SurrogateInput in;
    in.lags = make_lag_matrix(series, 24);
    for (const auto& row : in.lags.rows) in.predictions.push_back(row.back());
    const auto rep = explain::shap_report(explain::ModelKind::lstm, in);
    double eff = 0.0;
    for (std::size_t i = 0; i < rep.instance_rows.size(); ++i) {
        const auto& phi = rep.per_instance_values[i];
        const double total = rep.base_value + std::accumulate(phi.begin(), phi.end(), 0.0);
        eff = std::max(eff, std::abs(total - rep.surrogate_predictions[i]));
    }
    o.check(eff < 1e-6, "efficiency max gap " + num(eff, "%.2e") + " over " +
                            std::to_string(rep.instance_rows.size()) + " instances");
    const double mass = std::accumulate(rep.mean_abs.begin(), rep.mean_abs.end(), 0.0);
    const double share = rep.mean_abs[0] / mass;
    o.check(share >= 0.95, "persistence lag_1 share " + num(share, "%.4f") + " (boosted surrogate, R^2 " +
                               num(rep.surrogate_r2, "%.4f") + ")");
    return o;
}

// ---------------------------------------------------------------- 9
Outcome correlation_sanity() {
    Outcome o;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::size_t n = 10000;
    std::vector<double> x(n), z(n), y2(n), yneg(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = g(rng);
        z[i] = g(rng);
        y2[i] = 2.0 * x[i];
        yneg[i] = -x[i];
    }
    const std::vector<NamedColumn> cols{{"x", x}, {"y2", y2}, {"yneg", yneg}, {"z", z}};
    const auto c = pearson_corr(cols);
    o.check(std::abs(c.at(0, 1) - 1.0) <= 1e-12, "corr(x,2x) " + num(c.at(0, 1), "%.15f"));
    o.check(std::abs(c.at(0, 2) + 1.0) <= 1e-12, "corr(x,-x) " + num(c.at(0, 2), "%.15f"));
    o.check(std::abs(c.at(0, 3)) < 0.05, "corr(x,z) " + num(c.at(0, 3), "%.4f"));
    return o;
}

// ---------------------------------------------------------------- 10
int cli(std::vector<std::string> args, std::string* out_text = nullptr) {
    args.insert(args.begin(), "wardwatt");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int rc = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (rc != 0) std::fprintf(stderr, "%s", err.str().c_str());
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome end_to_end() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "wardwatt_acceptance_e2e";
    fs::remove_all(root);
    const std::string data = (root / "data").string();
    o.check(cli({"synth", "--output", data}) == 0, "synth");
    const std::string csv = (root / "data" / "synthetic_hospital.csv").string();

    std::string report[2];
    for (int run = 0; run < 2; ++run) {
        const std::string out = (root / ("run" + std::to_string(run))).string();
        const bool ok = cli({"evaluate", "--input", csv, "--output", out, "--seed", "42"}) == 0 &&
                        cli({"report", "--output", out, "--seed", "42"}) == 0;
        o.check(ok, "evaluate+report run " + std::to_string(run + 1));
        report[run] = slurp(fs::path(out) / "report.json");
        if (run == 0) {
            std::size_t svgs = 0;
            for (const auto& e : fs::directory_iterator(out)) svgs += e.path().extension() == ".svg";
            o.check(fs::exists(fs::path(out) / "manifest.json") && fs::exists(fs::path(out) / "comparison.csv") &&
                        svgs >= 2,
                    std::to_string(svgs) + " SVG charts");
        }
    }
    o.check(!report[0].empty() && report[0] == report[1],
            "report.json byte-identical (" + std::to_string(report[0].size()) + " bytes)");

    const fs::path fdir = root / "fc";
    o.check(cli({"forecast", "--model", "arima", "--horizon", "48", "--input", csv, "--output", fdir.string()}) == 0,
            "forecast arima");
    const auto f = read_forecast_csv((fdir / "forecast_arima.csv").string());
    o.check(f.size() == 48, "arima forecast rows " + std::to_string(f.size()));

    o.check(cli({"forecast", "--model", "seasonal", "--input", csv, "--output", fdir.string()}) == 0,
            "forecast seasonal");
    const auto fs50 = read_forecast_csv((fdir / "forecast_seasonal.csv").string());
    o.check(cli({"balance", "--strategy", "worst", "--from", (fdir / "forecast_seasonal.csv").string(), "--output",
                 fdir.string()}) == 0,
            "balance worst");
    std::ifstream bj(fdir / "balance_worst.json");
    std::string text((std::istreambuf_iterator<char>(bj)), std::istreambuf_iterator<char>());
    const auto genes_pos = text.find("\"genes\": ");
    const int genes = genes_pos == std::string::npos ? -1 : std::atoi(text.c_str() + genes_pos + 9);
    o.check(fs50.size() == 50 && genes == 50, "balance over " + std::to_string(fs50.size()) + "-row forecast -> " +
                                                  std::to_string(genes) + " genes");
    fs::remove_all(root);
    return o;
}

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "metric exactness", 1, metric_exactness},
        {2, "GA mechanics", 10, ga_mechanics},
        {3, "GA convergence", 30, ga_convergence},
        {4, "ARIMA recovery", 30, arima_recovery},
        {5, "seasonal-trend recovery", 10, seasonal_recovery},
        {6, "LSTM correctness", 300, lstm_correctness},
        {7, "model ordering on the pinned dataset", 600, table3_ordering},
        {8, "SHAP soundness", 120, shap_soundness},
        {9, "correlation sanity", 1, correlation_sanity},
        {10, "end-to-end CLI", 900, end_to_end},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& c : all) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = sec < c.budget_seconds;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("criterion %2d %s  %s: %s [%.2fs / %.0fs budget%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), sec, c.budget_seconds, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
