#include "wardwatt/series.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wardwatt/error.hpp"

namespace wardwatt {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string strip(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == ',' && !quoted) {
            fields.push_back(strip(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(strip(current));
    return fields;
}

bool is_missing_token(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan" || s == "null" ||
           s == "NULL";
}

// Returns false when the text is present but not a number.
bool parse_value(const std::string& s, double& out) {
    if (is_missing_token(s)) {
        out = kMissing;
        return true;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) return false;
    out = v;
    return true;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
};

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open input file '" + path.string() + "'");
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (strip(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (table.header.empty()) throw IngestError("input file '" + path.string() + "' is empty");
    return table;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
    auto it = std::find(table.header.begin(), table.header.end(), name);
    if (it == table.header.end()) throw IngestError("column '" + name + "' not found in header");
    return static_cast<std::size_t>(it - table.header.begin());
}

}  // namespace

TimeSeries::TimeSeries(std::vector<Instant> timestamps, std::vector<double> values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (timestamps_.size() != values_.size()) {
        throw std::invalid_argument("TimeSeries: timestamp and value counts differ");
    }
    if (values_.size() < 2) throw std::invalid_argument("TimeSeries: need at least 2 observations");
    for (std::size_t i = 1; i < timestamps_.size(); ++i) {
        if (timestamps_[i] - timestamps_[i - 1] != kHour) {
            throw std::invalid_argument("TimeSeries: timestamps must advance by exactly one hour (index " +
                                        std::to_string(i) + ")");
        }
    }
    for (double v : values_) {
        if (std::isinf(v)) throw std::invalid_argument("TimeSeries: infinite value");
    }
}

TimeSeries TimeSeries::hourly(Instant start, std::vector<double> values) {
    std::vector<Instant> ts(values.size());
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = start + static_cast<long>(i) * kHour;
    return TimeSeries(std::move(ts), std::move(values));
}

bool TimeSeries::has_missing() const {
    return std::any_of(values_.begin(), values_.end(), [](double v) { return std::isnan(v); });
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > size()) throw std::out_of_range("TimeSeries::slice out of range");
    return TimeSeries({timestamps_.begin() + first, timestamps_.begin() + first + count},
                      {values_.begin() + first, values_.begin() + first + count});
}

IngestedSeries load_series(const std::filesystem::path& path, const std::string& timestamp_column,
                           const std::string& value_column) {
    const CsvTable table = read_csv(path);
    const std::size_t ts_idx = column_index(table, timestamp_column);
    const std::size_t val_idx = column_index(table, value_column);

    std::vector<Instant> stamps;
    std::vector<double> values;
    std::vector<IngestWarning> warnings;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        const std::size_t line = table.line_numbers[r];
        if (fields.size() <= std::max(ts_idx, val_idx)) {
            throw IngestError("expected at least " + std::to_string(std::max(ts_idx, val_idx) + 1) +
                                  " fields",
                              line);
        }
        const auto t = parse_instant(fields[ts_idx]);
        if (!t) throw IngestError("unparseable timestamp '" + fields[ts_idx] + "'", line);
        if (!stamps.empty()) {
            if (*t == stamps.back()) throw IngestError("duplicated timestamp " + fields[ts_idx], line);
            if (*t < stamps.back()) throw IngestError("timestamp goes backwards: " + fields[ts_idx], line);
            if (*t - stamps.back() != kHour) {
                throw IngestError("irregular spacing before " + fields[ts_idx] +
                                      " (expected one-hour step)",
                                  line);
            }
        }
        double v = 0.0;
        if (!parse_value(fields[val_idx], v)) {
            throw IngestError("unparseable value '" + fields[val_idx] + "'", line);
        }
        if (std::isnan(v)) {
            warnings.push_back({line, "missing_value", "no reading at " + fields[ts_idx]});
        }
        stamps.push_back(*t);
        values.push_back(v);
    }
    if (values.size() < 2) throw IngestError("need at least 2 data rows, found " + std::to_string(values.size()));
    return {TimeSeries(std::move(stamps), std::move(values)), std::move(warnings)};
}

IngestedSeries load_series(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const auto& h = table.header;
    const bool prophet_frame =
        std::find(h.begin(), h.end(), "ds") != h.end() && std::find(h.begin(), h.end(), "y") != h.end();
    if (prophet_frame) return load_series(path, "ds", "y");
    if (h.size() < 2) throw IngestError("input needs a timestamp column and a value column");
    return load_series(path, h[0], h[1]);
}

std::vector<NamedColumn> load_columns(const std::filesystem::path& path,
                                      const std::vector<std::string>& names) {
    const CsvTable table = read_csv(path);
    std::vector<NamedColumn> out;
    for (const auto& name : names) {
        const std::size_t idx = column_index(table, name);
        NamedColumn col{name, {}};
        col.values.reserve(table.rows.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            double v = 0.0;
            if (idx >= table.rows[r].size() || !parse_value(table.rows[r][idx], v) || std::isnan(v)) {
                throw IngestError("column '" + name + "' has a missing or non-numeric entry",
                                  table.line_numbers[r]);
            }
            col.values.push_back(v);
        }
        out.push_back(std::move(col));
    }
    return out;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series,
                      const std::string& value_header) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "timestamp," << value_header << '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.values()[i]);
        out << format_instant(series.timestamps()[i]) << ',' << buf << '\n';
    }
}

TimeSeries preprocess(const TimeSeries& series, const PreprocessOptions& options) {
    std::vector<double> v = series.values();
    const auto present = [](double x) { return !std::isnan(x); };
    const std::size_t n_present = static_cast<std::size_t>(std::count_if(v.begin(), v.end(), present));
    if (n_present == 0) throw std::invalid_argument("preprocess: every value is missing");

    const bool had_missing = n_present != v.size();
    if (had_missing) {
        if (!options.forward_fill) {
            throw std::invalid_argument("preprocess: series has missing values and forward fill is off");
        }
        if (std::isnan(v.front())) {
            throw std::invalid_argument("preprocess: first value is missing; nothing to forward fill from");
        }
    }

    std::vector<bool> removed(v.size(), false);
    if (options.outlier_3sigma) {
        double mean = 0.0;
        for (double x : v)
            if (present(x)) mean += x;
        mean /= static_cast<double>(n_present);
        double ss = 0.0;
        for (double x : v)
            if (present(x)) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(n_present));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (present(v[i]) && std::abs(v[i] - mean) > 3.0 * sd) {
                v[i] = kMissing;
                removed[i] = true;
            }
        }
    }

    // Leading gap can only come from a removed outlier here: back-fill it.
    std::size_t first_valid = 0;
    while (first_valid < v.size() && !present(v[first_valid])) ++first_valid;
    if (first_valid == v.size()) throw std::invalid_argument("preprocess: no value survived outlier removal");
    for (std::size_t i = 0; i < first_valid; ++i) v[i] = v[first_valid];
    for (std::size_t i = first_valid + 1; i < v.size(); ++i) {
        if (!present(v[i])) v[i] = v[i - 1];
    }
    return TimeSeries(series.timestamps(), std::move(v));
}

ScalerParams ScalerParams::fit(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("ScalerParams::fit: empty input");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (!(*hi > *lo)) {
        throw std::invalid_argument("minmax scale: degenerate range (max == min == " + std::to_string(*lo) + ")");
    }
    return {*lo, *hi};
}

std::vector<double> ScalerParams::transform(std::span<const double> values) const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = transform(values[i]);
    return out;
}

std::vector<double> ScalerParams::inverse(std::span<const double> values) const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = inverse(values[i]);
    return out;
}

ScaledSeries minmax_scale(const TimeSeries& series) {
    const auto params = ScalerParams::fit(series.values());
    return {TimeSeries(series.timestamps(), params.transform(series.values())), params};
}

LagMatrix make_lag_matrix(std::span<const double> values, std::size_t window) {
    if (window == 0) throw std::invalid_argument("make_lag_matrix: window must be positive");
    if (values.size() <= window) {
        throw std::invalid_argument("make_lag_matrix: series length " + std::to_string(values.size()) +
                                    " must exceed window " + std::to_string(window));
    }
    LagMatrix m;
    m.window = window;
    const std::size_t n = values.size() - window;
    m.rows.reserve(n);
    m.targets.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.rows.emplace_back(values.begin() + static_cast<long>(i), values.begin() + static_cast<long>(i + window));
        m.targets.push_back(values[i + window]);
    }
    return m;
}

SeriesSplit split_chronological(const TimeSeries& series, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split fraction must lie in (0, 1)");
    }
    const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(series.size())));
    if (n_train < 2 || series.size() - n_train < 2) {
        throw std::invalid_argument("split leaves fewer than 2 points on one side");
    }
    return {series.slice(0, n_train), series.slice(n_train, series.size() - n_train)};
}

}  // namespace wardwatt
