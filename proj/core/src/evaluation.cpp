#include "wardwatt/evaluation.hpp"

#include <algorithm>
#include <stdexcept>

namespace wardwatt {

namespace {

TimeSeries training_series(const TimeSeries& series, std::size_t train_size, bool outliers) {
    return preprocess(series.slice(0, train_size), {true, outliers});
}

void finish(ModelEvaluation& ev, const TimeSeries& series, std::size_t train_size) {
    const auto& v = series.values();
    const std::span<const double> actual(v.data() + train_size, v.size() - train_size);
    ev.metrics = score(actual, ev.predicted);
}

}  // namespace

std::vector<std::size_t> rolling_origins(std::size_t train_size, std::size_t total, std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("rolling_origins: horizon must be >= 1");
    std::vector<std::size_t> steps;
    for (std::size_t origin = train_size; origin < total; origin += horizon) {
        steps.push_back(std::min(horizon, total - origin));
    }
    return steps;
}

ModelEvaluation evaluate_arima(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg) {
    ModelEvaluation ev;
    ev.model = "arima";
    const auto model =
        arima::fit_arima(training_series(series, train_size, cfg.arima_outlier_3sigma), cfg.arima_order, cfg.arima_budget);
    ev.forecast = arima::forecast_arima(model, cfg.arima_forecast_horizon);
    std::size_t origin = train_size;
    for (std::size_t steps : rolling_origins(train_size, series.size(), cfg.horizon)) {
        const auto conditioned = arima::condition_on(model, series.slice(0, origin));
        const auto f = arima::forecast_arima(conditioned, cfg.horizon);
        ev.predicted.insert(ev.predicted.end(), f.values.begin(), f.values.begin() + static_cast<long>(steps));
        origin += steps;
        ++ev.origins;
    }
    finish(ev, series, train_size);
    return ev;
}

ModelEvaluation evaluate_seasonal(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg) {
    ModelEvaluation ev;
    ev.model = "seasonal";
    const auto model = seasonal::fit_st(training_series(series, train_size, cfg.seasonal_outlier_3sigma), cfg.st);
    // The model does not condition on recent history, so every origin's
    // forecast agrees with a single prediction over the test timestamps.
    const std::span<const Instant> ts(series.timestamps().data() + train_size, series.size() - train_size);
    ev.predicted = seasonal::predict(model, ts);
    ev.origins = rolling_origins(train_size, series.size(), cfg.horizon).size();
    ev.forecast = seasonal::forecast_st(model, cfg.seasonal_forecast_horizon)
                      .head(std::min(cfg.seasonal_forecast_take, cfg.seasonal_forecast_horizon));
    finish(ev, series, train_size);
    return ev;
}

ModelEvaluation evaluate_lstm(const TimeSeries& series, std::size_t train_size, const EvaluationConfig& cfg) {
    ModelEvaluation ev;
    ev.model = "lstm";
    const TimeSeries train = training_series(series, train_size, cfg.lstm_outlier_3sigma);
    const ScalerParams scaler = ScalerParams::fit(train.values());
    const auto scaled = scaler.transform(train.values());
    const LagMatrix lags = make_lag_matrix(scaled, lstm::kWindow);
    auto net = lstm::init_network(cfg.lstm_hp, cfg.lstm_train.seed);
    const auto trained = lstm::train(std::move(net), lags, cfg.lstm_train);
    ev.forecast = lstm::predict_multi(trained.network, train, cfg.lstm_forecast_horizon, scaler);
    std::size_t origin = train_size;
    for (std::size_t steps : rolling_origins(train_size, series.size(), cfg.horizon)) {
        const auto f = lstm::predict_multi(trained.network, series.slice(0, origin), cfg.horizon, scaler);
        ev.predicted.insert(ev.predicted.end(), f.values.begin(), f.values.begin() + static_cast<long>(steps));
        origin += steps;
        ++ev.origins;
    }
    finish(ev, series, train_size);
    return ev;
}

EvaluationResult evaluate_models(const TimeSeries& series, const EvaluationConfig& cfg) {
    const SeriesSplit split = split_chronological(series, cfg.train_fraction);
    EvaluationResult out;
    out.train_size = split.train.size();
    out.test_size = split.test.size();
    out.test_timestamps = split.test.timestamps();
    out.test_actual = split.test.values();
    if (cfg.run_arima) out.models.push_back(evaluate_arima(series, out.train_size, cfg));
    if (cfg.run_seasonal) out.models.push_back(evaluate_seasonal(series, out.train_size, cfg));
    if (cfg.run_lstm) out.models.push_back(evaluate_lstm(series, out.train_size, cfg));
    return out;
}

explain::SurrogateInput arima_surrogate_input(const arima::ArimaModel& model, const TimeSeries& series,
                                              std::size_t window) {
    explain::SurrogateInput in;
    in.lags = make_lag_matrix(series, window);
    const auto os = arima::one_step_predictions(model, series);
    if (os.first > window) throw std::invalid_argument("arima_surrogate_input: window shorter than d + p");
    in.predictions.reserve(in.lags.size());
    for (std::size_t i = 0; i < in.lags.size(); ++i) in.predictions.push_back(os.values[i + window - os.first]);
    return in;
}

explain::SurrogateInput seasonal_surrogate_input(const seasonal::StModel& model, const TimeSeries& series,
                                                 std::size_t window) {
    explain::SurrogateInput in;
    in.lags = make_lag_matrix(series, window);
    const std::span<const Instant> ts(series.timestamps().data() + window, series.size() - window);
    const auto c = seasonal::decompose(model, ts);
    in.predictions = c.total;
    in.extra_names = {"trend", "daily", "weekly"};
    for (std::size_t i = 0; i < ts.size(); ++i) in.extra.push_back({c.trend[i], c.daily[i], c.weekly[i]});
    return in;
}

explain::SurrogateInput lstm_surrogate_input(const lstm::LstmNetwork& net, const ScalerParams& scaler,
                                             const TimeSeries& series) {
    explain::SurrogateInput in;
    const std::size_t window = net.shape().window;
    in.lags = make_lag_matrix(series, window);
    const auto scaled = scaler.transform(series.values());
    const auto scaled_lags = make_lag_matrix(scaled, window);
    for (const auto& row : scaled_lags.rows) in.predictions.push_back(scaler.inverse(lstm::predict_one(net, row)));
    return in;
}

}  // namespace wardwatt
