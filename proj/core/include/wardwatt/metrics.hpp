#pragma once

#include <span>
#include <string>
#include <vector>

#include "wardwatt/series.hpp"

namespace wardwatt {

struct Metrics {
    double mae = 0.0;   // kW
    double rmse = 0.0;  // kW
};

Metrics score(std::span<const double> actual, std::span<const double> predicted);

// {"mae": ..., "rmse": ...}
std::string to_json(const Metrics& m);

struct CorrMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> entries;

    double at(std::size_t i, std::size_t j) const { return entries[i][j]; }
};

CorrMatrix pearson_corr(std::span<const NamedColumn> columns);

std::string to_json(const CorrMatrix& m);

}  // namespace wardwatt
