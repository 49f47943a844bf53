#pragma once

#include <cstdint>
#include <string>

#include "wardwatt/series.hpp"

namespace wardwatt {

// Hospital-like hourly demand used in place of the restricted facility
// data. Bump `kSyntheticVersion` whenever a default below changes.
inline constexpr int kSyntheticVersion = 1;

struct SyntheticParams {
    std::string start = "2021-01-01T00:00";
    std::size_t hours = 24 * 7 * 12;
    double base_kw = 600.0;
    double trend_kw_per_hour = 0.02;
    // Occupancy-driven load: a steep morning ramp, a day plateau and two
    // short activity peaks, all reduced on weekends.
    double occupancy_kw = 120.0;
    double peak_kw = 60.0;
    double weekend_factor = 0.85;
    // Outdoor temperature: daily swing plus a slowly wandering AR(1)
    // weather anomaly. Cooling load grows quadratically above the setpoint.
    double temp_mean_c = 21.0;
    double temp_daily_swing_c = 5.0;
    double weather_phi = 0.999;
    double weather_sigma_c = 0.15;
    double cooling_setpoint_c = 19.0;
    double cooling_kw_per_c2 = 2.5;
    double noise_kw = 6.0;
    std::uint64_t seed = 2021;
};

TimeSeries generate_synthetic(const SyntheticParams& params = {});

// JSON echo of the parameters including the version.
std::string to_json(const SyntheticParams& params);

}  // namespace wardwatt
