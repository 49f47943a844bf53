#include "wardwatt/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace wardwatt {

namespace {

// Fraction of peak occupancy at hour-of-day h: ramps from 06:00, plateaus
// through the day shift and decays into the night.
double occupancy(double h) {
    const double ramp = 1.0 / (1.0 + std::exp(-(h - 7.0) * 3.0));
    const double decay = 1.0 / (1.0 + std::exp((h - 20.0) * 2.0));
    return 0.15 + 0.85 * ramp * decay;
}

// Narrow bumps for the morning procedures block and the evening meal
// service, in units of peak occupancy.
double activity_peaks(double h) {
    const double a = (h - 10.0) / 1.2;
    const double b = (h - 17.5) / 1.0;
    return std::exp(-0.5 * a * a) + 0.7 * std::exp(-0.5 * b * b);
}

}  // namespace

TimeSeries generate_synthetic(const SyntheticParams& p) {
    if (p.hours < 2) throw std::invalid_argument("generate_synthetic: need at least 2 hours");
    const auto start = parse_instant(p.start);
    if (!start) throw std::invalid_argument("generate_synthetic: bad start '" + p.start + "'");

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double stationary_sd = p.weather_sigma_c / std::sqrt(1.0 - p.weather_phi * p.weather_phi);
    double weather = stationary_sd * gauss(rng);

    std::vector<double> values(p.hours);
    for (std::size_t i = 0; i < p.hours; ++i) {
        const Instant t = *start + static_cast<long>(i) * kHour;
        const auto day = std::chrono::floor<std::chrono::days>(t);
        const double hour = static_cast<double>((t - day).count()) / 3600.0;
        const unsigned wd = std::chrono::weekday{day}.c_encoding();
        const bool weekend = wd == 0 || wd == 6;

        weather = p.weather_phi * weather + p.weather_sigma_c * gauss(rng);
        const double temp =
            p.temp_mean_c + p.temp_daily_swing_c * std::sin(2.0 * std::numbers::pi * (hour - 9.0) / 24.0) + weather;
        const double excess = std::max(0.0, temp - p.cooling_setpoint_c);

        double v = p.base_kw + p.trend_kw_per_hour * static_cast<double>(i);
        v += (p.occupancy_kw * occupancy(hour) + p.peak_kw * activity_peaks(hour)) * (weekend ? p.weekend_factor : 1.0);
        v += p.cooling_kw_per_c2 * excess * excess;
        v += p.noise_kw * gauss(rng);
        values[i] = v;
    }
    return TimeSeries::hourly(*start, std::move(values));
}

std::string to_json(const SyntheticParams& p) {
    nlohmann::ordered_json j;
    j["version"] = kSyntheticVersion;
    j["start"] = p.start;
    j["hours"] = p.hours;
    j["base_kw"] = p.base_kw;
    j["trend_kw_per_hour"] = p.trend_kw_per_hour;
    j["occupancy_kw"] = p.occupancy_kw;
    j["peak_kw"] = p.peak_kw;
    j["weekend_factor"] = p.weekend_factor;
    j["temp_mean_c"] = p.temp_mean_c;
    j["temp_daily_swing_c"] = p.temp_daily_swing_c;
    j["weather_phi"] = p.weather_phi;
    j["weather_sigma_c"] = p.weather_sigma_c;
    j["cooling_setpoint_c"] = p.cooling_setpoint_c;
    j["cooling_kw_per_c2"] = p.cooling_kw_per_c2;
    j["noise_kw"] = p.noise_kw;
    j["seed"] = p.seed;
    return j.dump(2);
}

}  // namespace wardwatt
