#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wardwatt/forecast.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt::arima {

struct ArimaOrder {
    int p = 2;
    int d = 1;
    int q = 2;

    // All orders non-negative and p + q >= 1.
    void validate() const;
};

struct ArimaModel {
    ArimaOrder order;
    std::vector<double> ar_coeffs;  // phi_1..phi_p
    std::vector<double> ma_coeffs;  // theta_1..theta_q
    double intercept = 0.0;         // on the differenced scale (drift when d = 1)
    double residual_variance = 1.0;

    // Forecast state, taken from the end of the conditioning history.
    std::vector<double> recent_differenced;  // last p differenced values, oldest first
    std::vector<double> recent_residuals;    // last q one-step residuals, oldest first
    std::vector<double> level_anchors;       // last value at difference levels 0..d-1
    Instant last_timestamp{};
};

// d passes of first differencing; length shrinks by d.
std::vector<double> difference(std::span<const double> values, int d);

// Last value at each difference level 0..d-1 of `tail` (needs >= d values).
std::vector<double> difference_anchors(std::span<const double> tail, int d);

// Inverse of `difference` for a continuation: given d-th differences that
// follow the point where `anchors` were taken, returns the level values.
std::vector<double> undifference(std::span<const double> diffs, std::span<const double> anchors);

// AR polynomial 1 - sum phi_i z^i has every root outside the unit circle.
bool is_stationary(std::span<const double> ar);
// MA polynomial 1 + sum theta_j z^j has every root outside the unit circle.
bool is_invertible(std::span<const double> ma);

// One-step residuals on the (already differenced) series with pre-sample
// residuals fixed at zero; the first p entries are conditioning points and
// are reported as zero.
std::vector<double> css_residuals(std::span<const double> differenced, double intercept,
                                  std::span<const double> ar, std::span<const double> ma);
double css_objective(std::span<const double> differenced, double intercept, std::span<const double> ar,
                     std::span<const double> ma);

ArimaModel fit_arima(const TimeSeries& series, const ArimaOrder& order = {}, int optimizer_budget = 5000);

// Predicted d-th differences for the next `horizon` steps (future shocks 0).
std::vector<double> forecast_differenced(const ArimaModel& model, std::size_t horizon);

Forecast forecast_arima(const ArimaModel& model, std::size_t horizon = 48);

// Same coefficients, forecast state recomputed from `history`.
ArimaModel condition_on(const ArimaModel& model, const TimeSeries& history);

// One-step-ahead level predictions for history[first..n), where
// first = d + p. Entry k predicts history[first + k] from earlier values.
struct OneStepPredictions {
    std::size_t first = 0;
    std::vector<double> values;
};
OneStepPredictions one_step_predictions(const ArimaModel& model, const TimeSeries& history);

std::string to_json(const ArimaModel& model);

}  // namespace wardwatt::arima
