#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wardwatt/explain/ensemble.hpp"
#include "wardwatt/explain/kernel_shap.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt::explain {

enum class ModelKind { arima, seasonal_trend, lstm };

const char* model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

struct ShapConfig {
    std::size_t background_rows = 100;
    std::size_t instances = 100;
    std::size_t n_coalitions = 2048;
    // Trailing fraction of rows held out to score the surrogate.
    double holdout_fraction = 0.2;
    double min_r2 = 0.7;
    std::uint64_t seed = 42;
    ForestOptions forest;
    BoostOptions boost;
};

// What the surrogate imitates: lag rows (oldest first, as produced by
// make_lag_matrix), the forecaster's one-step prediction for each row's
// target hour, and optional extra per-row features.
struct SurrogateInput {
    LagMatrix lags;
    std::vector<double> predictions;
    FeatureRows extra;
    std::vector<std::string> extra_names;
};

struct FeatureImportance {
    std::string name;
    double mean_abs_shap = 0.0;
};

struct ShapReport {
    ModelKind kind = ModelKind::arima;
    // lag_1 (most recent hour) .. lag_W, then any extra features.
    std::vector<std::string> feature_names;
    std::vector<std::size_t> instance_rows;             // indices into the lag matrix
    std::vector<std::vector<double>> per_instance_values;  // kW, one row per instance
    std::vector<double> surrogate_predictions;          // per instance
    double base_value = 0.0;
    std::vector<double> mean_abs;                       // per feature, in feature order
    std::vector<FeatureImportance> ranking;             // descending
    double surrogate_r2 = 0.0;                          // on the held-out rows
    std::vector<std::string> warnings;
};

// Forest surrogate for ARIMA and seasonal-trend, boosted for the LSTM.
ShapReport shap_report(ModelKind kind, const SurrogateInput& input, const ShapConfig& config = {});

// {"model", "base_value", "surrogate_r2", "warnings", "features": [{name, mean_abs_shap}]}
std::string to_json(const ShapReport& report);
// Header "row,<feature names...>", one line per explained instance.
std::string per_instance_csv(const ShapReport& report);

}  // namespace wardwatt::explain
