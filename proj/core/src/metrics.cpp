#include "wardwatt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace wardwatt {

Metrics score(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument("score: length mismatch (" + std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()) + ")");
    }
    if (actual.empty()) throw std::invalid_argument("score: empty inputs");
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        abs_sum += std::abs(e);
        sq_sum += e * e;
    }
    const auto n = static_cast<double>(actual.size());
    Metrics m{abs_sum / n, std::sqrt(sq_sum / n)};
    // Jensen guarantees mae <= rmse; rounding can break it by an ulp when all
    // errors are equal.
    m.rmse = std::max(m.rmse, m.mae);
    return m;
}

std::string to_json(const Metrics& m) {
    return nlohmann::json{{"mae", m.mae}, {"rmse", m.rmse}}.dump();
}

CorrMatrix pearson_corr(std::span<const NamedColumn> columns) {
    if (columns.size() < 2) throw std::invalid_argument("pearson_corr: need at least 2 columns");
    const std::size_t n = columns.front().values.size();
    if (n < 3) throw std::invalid_argument("pearson_corr: need at least 3 observations");

    const std::size_t k = columns.size();
    std::vector<std::vector<double>> centered(k);
    std::vector<double> norms(k);
    for (std::size_t c = 0; c < k; ++c) {
        const auto& v = columns[c].values;
        if (v.size() != n) {
            throw std::invalid_argument("pearson_corr: column '" + columns[c].name + "' has a different length");
        }
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(n);
        centered[c].resize(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            centered[c][i] = v[i] - mean;
            ss += centered[c][i] * centered[c][i];
        }
        if (!(ss > 0.0)) {
            throw std::invalid_argument("pearson_corr: column '" + columns[c].name + "' has zero variance");
        }
        norms[c] = std::sqrt(ss);
    }

    CorrMatrix out;
    out.entries.assign(k, std::vector<double>(k, 1.0));
    for (const auto& c : columns) out.labels.push_back(c.name);
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += centered[a][i] * centered[b][i];
            const double r = std::clamp(dot / (norms[a] * norms[b]), -1.0, 1.0);
            out.entries[a][b] = r;
            out.entries[b][a] = r;
        }
    }
    return out;
}

std::string to_json(const CorrMatrix& m) {
    return nlohmann::json{{"labels", m.labels}, {"entries", m.entries}}.dump();
}

}  // namespace wardwatt
