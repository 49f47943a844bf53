#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wardwatt/evaluation.hpp"
#include "wardwatt/explain/shap_report.hpp"
#include "wardwatt/ga.hpp"
#include "wardwatt/seasonal_trend.hpp"
#include "wardwatt/series.hpp"
#include "wardwatt/tune_lstm.hpp"

namespace wardwatt::cli {

// A config value that fails validation; `field` is its dotted path.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error("field '" + field + "': " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct InputConfig {
    std::string path;
    std::string timestamp_column;  // empty: autodetect
    std::string value_column;
};

struct PipelineConfig {
    InputConfig input;
    bool forward_fill = true;
    double train_fraction = 0.8;
    std::uint64_t seed = 42;
    std::string output_dir = "wardwatt-out";
    std::vector<std::string> models{"arima", "seasonal", "lstm"};

    EvaluationConfig evaluation;  // model parameters and horizons
    ga::GaConfig ga;
    ga::LstmSearchSpace lstm_space;
    ga::LstmTuneConfig tune_lstm;
    seasonal::StSearchRanges seasonal_ranges;
    seasonal::StTuneOptions tune_seasonal;
    int tune_seasonal_generations = 50;
    explain::ShapConfig shap;
};

// Reads the JSON config; unknown keys and out-of-range values are errors.
PipelineConfig parse_config(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Propagates the global seed into every stage's RNG stream.
void apply_seed(PipelineConfig& cfg, std::uint64_t seed);

void validate(const PipelineConfig& cfg);

// Canonical echo (all fields, fixed key order).
nlohmann::ordered_json to_json(const PipelineConfig& cfg);

}  // namespace wardwatt::cli
