#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "wardwatt/timestamp.hpp"

namespace wardwatt {

// Hourly demand series in kW. Timestamps are strictly increasing with a
// constant one-hour step and there are at least two observations. Missing
// readings are stored as NaN until `preprocess` fills them.
class TimeSeries {
public:
    TimeSeries(std::vector<Instant> timestamps, std::vector<double> values);

    static TimeSeries hourly(Instant start, std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<Instant>& timestamps() const noexcept { return timestamps_; }
    const std::vector<double>& values() const noexcept { return values_; }
    Instant start() const { return timestamps_.front(); }
    Instant end() const { return timestamps_.back(); }
    bool has_missing() const;

    // [first, first + count)
    TimeSeries slice(std::size_t first, std::size_t count) const;

    bool operator==(const TimeSeries&) const = default;

private:
    std::vector<Instant> timestamps_;
    std::vector<double> values_;
};

struct IngestWarning {
    std::size_t row;  // 1-based file line
    std::string kind;
    std::string message;
};

struct IngestedSeries {
    TimeSeries series;
    std::vector<IngestWarning> warnings;
};

// Reads a header-led, comma-delimited file. Blank or NA readings become NaN
// and are reported as warnings; bad timestamps, duplicates and irregular
// spacing are errors carrying the offending line number.
IngestedSeries load_series(const std::filesystem::path& path, const std::string& timestamp_column,
                           const std::string& value_column);

// Picks "ds"/"y" when present, otherwise the first two columns.
IngestedSeries load_series(const std::filesystem::path& path);

struct NamedColumn {
    std::string name;
    std::vector<double> values;
};

std::vector<NamedColumn> load_columns(const std::filesystem::path& path,
                                      const std::vector<std::string>& names);

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::string& value_header = "kw");

struct PreprocessOptions {
    bool forward_fill = true;
    bool outlier_3sigma = false;
};

// Outliers are judged against the mean/stddev of the raw (non-missing)
// observations in a single pass, deleted, then filled from the previous
// surviving reading (or the next one when the first reading is an outlier).
TimeSeries preprocess(const TimeSeries& series, const PreprocessOptions& options = {});

struct ScalerParams {
    double min = 0.0;
    double max = 1.0;

    static ScalerParams fit(std::span<const double> values);

    double transform(double v) const { return (v - min) / (max - min); }
    double inverse(double s) const { return s * (max - min) + min; }
    std::vector<double> transform(std::span<const double> values) const;
    std::vector<double> inverse(std::span<const double> values) const;

    bool operator==(const ScalerParams&) const = default;
};

struct ScaledSeries {
    TimeSeries scaled;
    ScalerParams params;
};

ScaledSeries minmax_scale(const TimeSeries& series);

// Row i holds values[i .. i+window) oldest-first, target is values[i+window].
struct LagMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::size_t window = 24;

    std::size_t size() const noexcept { return rows.size(); }
};

LagMatrix make_lag_matrix(std::span<const double> values, std::size_t window = 24);
inline LagMatrix make_lag_matrix(const TimeSeries& series, std::size_t window = 24) {
    return make_lag_matrix(series.values(), window);
}

struct SeriesSplit {
    TimeSeries train;
    TimeSeries test;
};

// Chronological split; the first floor(fraction * n) points train.
SeriesSplit split_chronological(const TimeSeries& series, double train_fraction);

}  // namespace wardwatt
