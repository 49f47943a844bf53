#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace wardwatt::cli {

struct ModelSummary {
    std::string model;
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t origins = 0;
};

struct BalanceSummary {
    std::string model;
    std::string strategy;
    std::vector<double> forecast;
    std::vector<double> allocation;
    double best_fitness = 0.0;
    double initial_best_fitness = 0.0;
    double mean_abs_deviation = 0.0;
    double max_abs_deviation = 0.0;
};

struct ShapSummary {
    std::string model;
    nlohmann::ordered_json report;  // as written by `explain`
};

struct ChartSeries {
    std::string label;
    std::vector<double> values;
};

struct Chart {
    std::string file;   // relative to the output directory
    std::string title;
    std::vector<ChartSeries> series;
};

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

struct RunReport {
    nlohmann::ordered_json config;  // null when no config was involved
    std::uint64_t seed = 0;
    nlohmann::ordered_json split;   // train/test sizes
    std::vector<ModelSummary> models;
    std::vector<BalanceSummary> balance;
    std::vector<ShapSummary> shap;
    std::vector<Chart> charts;
    std::vector<StageTiming> timings;  // written to the manifest only
};

struct ManifestEntry {
    std::string file;
    std::uintmax_t bytes = 0;
};

// Deterministic serialisation; timings are excluded.
nlohmann::ordered_json to_json(const RunReport& report);

// Static line chart: one polyline per series, axes with min/max labels.
std::string render_svg(const Chart& chart);

// Writes report.json, comparison.csv, one SVG per chart and manifest.json
// (files with sizes, plus stage timings). Returns the manifest entries.
std::vector<ManifestEntry> emit_report(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace wardwatt::cli
