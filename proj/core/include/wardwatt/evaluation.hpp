#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wardwatt/arima.hpp"
#include "wardwatt/explain/shap_report.hpp"
#include "wardwatt/forecast.hpp"
#include "wardwatt/lstm.hpp"
#include "wardwatt/metrics.hpp"
#include "wardwatt/seasonal_trend.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt {

struct EvaluationConfig {
    double train_fraction = 0.8;
    std::size_t horizon = 48;
    arima::ArimaOrder arima_order;
    int arima_budget = 5000;
    seasonal::StConfig st;
    // The 3-sigma outlier pass is applied per model to its training split.
    bool arima_outlier_3sigma = false;
    bool seasonal_outlier_3sigma = true;
    bool lstm_outlier_3sigma = false;
    // Horizons of the forecast each model issues at the end of the training
    // split (the seasonal model forecasts `seasonal_forecast_horizon` hours
    // and keeps the first `seasonal_forecast_take`).
    std::size_t arima_forecast_horizon = 48;
    std::size_t seasonal_forecast_horizon = 720;
    std::size_t seasonal_forecast_take = 50;
    std::size_t lstm_forecast_horizon = 48;
    lstm::LstmHyperparams lstm_hp;
    lstm::TrainConfig lstm_train;
    bool run_arima = true;
    bool run_seasonal = true;
    bool run_lstm = true;
};

// Test-set results of one model. Forecasts are issued from rolling origins
// every `horizon` hours across the test split; each origin sees the actual
// history up to that point.
struct ModelEvaluation {
    std::string model;
    Metrics metrics;
    std::size_t origins = 0;
    std::vector<double> predicted;  // concatenated over origins, aligned with the test split
    Forecast forecast;              // issued at the end of the training split, model horizon
};

struct EvaluationResult {
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::vector<Instant> test_timestamps;
    std::vector<double> test_actual;
    std::vector<ModelEvaluation> models;
};

// Number of points each origin scores: min(horizon, points left).
std::vector<std::size_t> rolling_origins(std::size_t train_size, std::size_t total, std::size_t horizon);

ModelEvaluation evaluate_arima(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg);
ModelEvaluation evaluate_seasonal(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg);
ModelEvaluation evaluate_lstm(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg);

EvaluationResult evaluate_models(const TimeSeries& series, const EvaluationConfig& cfg);

// Surrogate inputs: lag rows over `series` and the model's one-step
// prediction of each row's target hour.
explain::SurrogateInput arima_surrogate_input(const arima::ArimaModel& model, const TimeSeries& series,
                                              std::size_t window = 24);
// Adds the trend, daily and weekly components at each target hour.
explain::SurrogateInput seasonal_surrogate_input(const seasonal::StModel& model, const TimeSeries& series,
                                                 std::size_t window = 24);
explain::SurrogateInput lstm_surrogate_input(const lstm::LstmNetwork& net, const ScalerParams& scaler,
                                             const TimeSeries& series);

}  // namespace wardwatt
