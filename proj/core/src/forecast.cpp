#include "wardwatt/forecast.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "wardwatt/error.hpp"

namespace wardwatt {

Forecast Forecast::head(std::size_t n) const {
    if (n > size()) throw std::invalid_argument("Forecast::head: n exceeds horizon");
    Forecast out{model, {timestamps.begin(), timestamps.begin() + static_cast<long>(n)},
                 {values.begin(), values.begin() + static_cast<long>(n)}, scaler};
    return out;
}

std::vector<Instant> future_timestamps(Instant last_observed, std::size_t horizon) {
    std::vector<Instant> ts(horizon);
    for (std::size_t h = 0; h < horizon; ++h) ts[h] = last_observed + static_cast<long>(h + 1) * kHour;
    return ts;
}

void write_forecast_csv(const std::string& path, const Forecast& f) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write '" + path + "'");
    out << "timestamp,predicted_kw\n";
    char buf[64];
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", f.values[i]);
        out << format_instant(f.timestamps[i]) << ',' << buf << '\n';
    }
}

Forecast read_forecast_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open forecast file '" + path + "'");
    Forecast f;
    f.model = "file";
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 || line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IngestError("expected 'timestamp,predicted_kw'", line_no);
        const auto t = parse_instant(line.substr(0, comma));
        if (!t) throw IngestError("unparseable timestamp", line_no);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line.substr(comma + 1), &used);
        } catch (const std::exception&) {
            throw IngestError("unparseable forecast value", line_no);
        }
        f.timestamps.push_back(*t);
        f.values.push_back(v);
    }
    if (f.values.empty()) throw IngestError("forecast file '" + path + "' has no rows");
    return f;
}

std::string to_json(const Forecast& f) {
    nlohmann::json j;
    j["model"] = f.model;
    auto& steps = j["steps"] = nlohmann::json::array();
    for (std::size_t i = 0; i < f.size(); ++i) {
        steps.push_back({{"timestamp", format_instant(f.timestamps[i])}, {"predicted_kw", f.values[i]}});
    }
    if (f.scaler) j["scaler"] = {{"min", f.scaler->min}, {"max", f.scaler->max}};
    return j.dump(2);
}

}  // namespace wardwatt
