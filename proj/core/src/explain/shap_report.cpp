#include "wardwatt/explain/shap_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace wardwatt::explain {

namespace {

// Distinct indices from [0, n), ascending.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, Rng& rng) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    if (count >= n) return idx;
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::arima: return "arima";
        case ModelKind::seasonal_trend: return "seasonal";
        case ModelKind::lstm: return "lstm";
    }
    return "unknown";
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "arima") return ModelKind::arima;
    if (name == "seasonal" || name == "seasonal-trend" || name == "seasonal_trend") return ModelKind::seasonal_trend;
    if (name == "lstm") return ModelKind::lstm;
    throw std::invalid_argument("unknown model '" + name + "' (expected arima, seasonal or lstm)");
}

ShapReport shap_report(ModelKind kind, const SurrogateInput& input, const ShapConfig& cfg) {
    const std::size_t n = input.lags.size();
    const std::size_t window = input.lags.window;
    if (input.predictions.size() != n) throw std::invalid_argument("shap_report: one prediction per lag row required");
    if (!input.extra.empty() && input.extra.size() != n) {
        throw std::invalid_argument("shap_report: extra features must cover every lag row");
    }
    const std::size_t n_extra = input.extra.empty() ? 0 : input.extra.front().size();
    if (input.extra_names.size() != n_extra) throw std::invalid_argument("shap_report: extra feature names mismatch");
    if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
        throw std::invalid_argument("shap_report: holdout_fraction must lie in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(std::floor((1.0 - cfg.holdout_fraction) * static_cast<double>(n)));
    if (n_train < 2 || n - n_train < 2) throw std::invalid_argument("shap_report: too few lag rows to hold out");

    ShapReport report;
    report.kind = kind;
    for (std::size_t k = 1; k <= window; ++k) report.feature_names.push_back("lag_" + std::to_string(k));
    for (const auto& name : input.extra_names) report.feature_names.push_back(name);
    const std::size_t m = report.feature_names.size();

    // Column k is lag_(k+1): reverse the oldest-first lag rows.
    FeatureRows features(n, std::vector<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& row = input.lags.rows[i];
        for (std::size_t k = 0; k < window; ++k) features[i][k] = row[window - 1 - k];
        for (std::size_t e = 0; e < n_extra; ++e) features[i][window + e] = input.extra[i][e];
    }
    const FeatureRows train(features.begin(), features.begin() + static_cast<long>(n_train));
    const std::span<const double> train_targets(input.predictions.data(), n_train);

    Predictor predict;
    ForestSurrogate forest;
    BoostedSurrogate boosted;
    if (kind == ModelKind::lstm) {
        boosted = fit_gbt(train, train_targets, cfg.boost);
        predict = [&boosted](std::span<const double> x) { return boosted.predict(x); };
    } else {
        forest = fit_forest(train, train_targets, cfg.forest);
        predict = [&forest](std::span<const double> x) { return forest.predict(x); };
    }

    std::vector<double> held_pred;
    for (std::size_t i = n_train; i < n; ++i) held_pred.push_back(predict(features[i]));
    report.surrogate_r2 = r_squared(std::span<const double>(input.predictions).subspan(n_train), held_pred);
    if (!(report.surrogate_r2 >= cfg.min_r2)) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "surrogate R^2 %.4f on held-out rows is below %.2f", report.surrogate_r2,
                      cfg.min_r2);
        report.warnings.emplace_back(buf);
    }

    Rng rng(cfg.seed);
    FeatureRows background;
    for (auto i : sample_rows(n_train, cfg.background_rows, rng)) background.push_back(features[i]);
    report.instance_rows = sample_rows(n, cfg.instances, rng);

    std::vector<const RegressionTree*> trees;
    for (const auto& t : kind == ModelKind::lstm ? boosted.trees() : forest.trees()) trees.push_back(&t);
    TreeEnsembleExpectation expectation =
        kind == ModelKind::lstm
            ? TreeEnsembleExpectation(trees, boosted.learning_rate(), boosted.base_prediction(), background)
            : TreeEnsembleExpectation(trees, 1.0 / static_cast<double>(trees.size()), 0.0, background);

    KernelShapOptions shap_opt;
    shap_opt.n_coalitions = cfg.n_coalitions;
    report.mean_abs.assign(m, 0.0);
    for (std::size_t r : report.instance_rows) {
        shap_opt.seed = cfg.seed + 0x9e3779b97f4a7c15ULL * (r + 1);
        const ShapValues sv = kernel_shap(expectation.bind(features[r]), m, shap_opt);
        report.base_value = sv.base_value;
        report.surrogate_predictions.push_back(sv.prediction);
        for (std::size_t j = 0; j < m; ++j) report.mean_abs[j] += std::abs(sv.phi[j]);
        report.per_instance_values.push_back(sv.phi);
    }
    if (!report.instance_rows.empty()) {
        for (auto& v : report.mean_abs) v /= static_cast<double>(report.instance_rows.size());
    }
    for (std::size_t j = 0; j < m; ++j) report.ranking.push_back({report.feature_names[j], report.mean_abs[j]});
    std::stable_sort(report.ranking.begin(), report.ranking.end(),
                     [](const auto& a, const auto& b) { return a.mean_abs_shap > b.mean_abs_shap; });
    return report;
}

std::string to_json(const ShapReport& report) {
    nlohmann::json j;
    j["model"] = model_kind_name(report.kind);
    j["base_value"] = report.base_value;
    j["surrogate_r2"] = report.surrogate_r2;
    j["instances"] = report.instance_rows.size();
    j["warnings"] = report.warnings;
    auto& features = j["features"] = nlohmann::json::array();
    for (const auto& f : report.ranking) features.push_back({{"name", f.name}, {"mean_abs_shap", f.mean_abs_shap}});
    return j.dump(2);
}

std::string per_instance_csv(const ShapReport& report) {
    std::ostringstream out;
    out << "row";
    for (const auto& name : report.feature_names) out << ',' << name;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < report.instance_rows.size(); ++i) {
        out << report.instance_rows[i];
        for (double v : report.per_instance_values[i]) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace wardwatt::explain
