#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wardwatt/series.hpp"
#include "wardwatt/timestamp.hpp"

namespace wardwatt {

// Horizon-indexed predicted demand (kW).
struct Forecast {
    std::string model;
    std::vector<Instant> timestamps;
    std::vector<double> values;
    // Set when the producing model worked on min-max scaled data.
    std::optional<ScalerParams> scaler;

    std::size_t size() const noexcept { return values.size(); }

    // First `n` steps (n <= size()).
    Forecast head(std::size_t n) const;
};

std::vector<Instant> future_timestamps(Instant last_observed, std::size_t horizon);

// CSV: "timestamp,predicted_kw", values at 17 significant digits.
void write_forecast_csv(const std::string& path, const Forecast& f);
Forecast read_forecast_csv(const std::string& path);
std::string to_json(const Forecast& f);

}  // namespace wardwatt
