#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wardwatt/forecast.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt::seasonal {

struct StConfig {
    int n_changepoints = 25;
    int daily_order = 4;
    int weekly_order = 3;
    double changepoint_prior_scale = 0.05;
    double seasonality_prior_scale = 10.0;
    // Changepoints are spread over this leading fraction of the history.
    double changepoint_range = 0.8;

    void validate() const;
    int design_width() const { return 2 + n_changepoints + 2 * (daily_order + weekly_order); }
};

// Maps instants onto model time: t = hours since t0 / time_scale_hours.
struct StGeometry {
    Instant t0{};
    double time_scale_hours = 1.0;
    std::vector<double> changepoints;  // model time, ascending
    int daily_order = 0;
    int weekly_order = 0;

    double model_time(Instant t) const;
    int width() const { return 2 + static_cast<int>(changepoints.size()) + 2 * (daily_order + weekly_order); }
};

struct Design {
    StGeometry geometry;
    // Columns: 1, t, max(t - cp_k, 0) per changepoint, then sin/cos pairs of
    // the daily (24 h) harmonics 1..daily_order and the weekly (168 h)
    // harmonics 1..weekly_order.
    Eigen::MatrixXd matrix;
};

// Geometry is derived from `timestamps` (the training history).
Design build_design(std::span<const Instant> timestamps, const StConfig& config);
Eigen::MatrixXd design_rows(const StGeometry& geometry, std::span<const Instant> timestamps);

struct StModel {
    StConfig config;
    StGeometry geometry;
    double offset = 0.0;      // kW
    double base_slope = 0.0;  // kW per unit model time
    std::vector<double> deltas;           // kW per unit model time, one per changepoint
    std::vector<double> seasonal_coeffs;  // kW, daily pairs then weekly pairs
    double y_scale = 1.0;                 // internal response scaling used during the solve
    Instant last_timestamp{};

    double slope_per_hour() const { return base_slope / geometry.time_scale_hours; }
    // Slope of the last trend segment, which forecasts extend.
    double final_slope_per_hour() const;
    Eigen::VectorXd coefficients() const;
};

struct Components {
    std::vector<double> trend;
    std::vector<double> daily;
    std::vector<double> weekly;
    std::vector<double> total;
};

Components decompose(const StModel& model, std::span<const Instant> timestamps);
std::vector<double> predict(const StModel& model, std::span<const Instant> timestamps);

StModel fit_st(const TimeSeries& series, const StConfig& config = {});

Forecast forecast_st(const StModel& model, std::size_t horizon);

// Gradient of the penalized least-squares objective at the fitted
// coefficients, in the solver's internal (scaled) units.
Eigen::VectorXd penalized_gradient(const StModel& model, const TimeSeries& series);

struct PriorRange {
    double lo = 0.001;
    double hi = 0.5;
};

struct StSearchRanges {
    PriorRange changepoint{0.001, 0.5};
    PriorRange seasonality{0.01, 10.0};
};

struct StTuneOptions {
    int population_size = 8;
    int parents = 4;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 42;
};

struct StTuneEntry {
    int generation = 0;
    double changepoint_prior_scale = 0.0;
    double seasonality_prior_scale = 0.0;
    double holdout_rmse = 0.0;
};

struct StTuneResult {
    StConfig config;
    double holdout_rmse = 0.0;
    std::vector<StTuneEntry> log;
    int generations = 0;
};

// Searches the two prior scales (log-uniform within `ranges`) for the pair
// with the lowest holdout RMSE on a chronological split. The base config,
// clamped into range, is part of the initial population.
StTuneResult tune_st(const TimeSeries& series, const StSearchRanges& ranges, const StConfig& base = {},
                     int ga_generations = 50, const StTuneOptions& options = {});

std::string components_csv(const StModel& model, std::span<const Instant> timestamps);

}  // namespace wardwatt::seasonal
