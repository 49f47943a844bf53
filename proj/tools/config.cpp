#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <type_traits>

namespace wardwatt::cli {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown fields.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void read(const std::string& key, double& out) {
        if (const json* v = find(key)) {
            if (!v->is_number()) throw ConfigError(field(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out)) throw ConfigError(field(key), "must be finite");
        }
    }
    void read(const std::string& key, int& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
            out = v->get<int>();
        }
    }
    // Also reads seeds: std::size_t and std::uint64_t coincide here.
    static_assert(std::is_same_v<std::size_t, std::uint64_t>);
    void read(const std::string& key, std::size_t& out) {
        if (const json* v = find(key)) {
            if (!v->is_number_integer() || v->get<long long>() < 0) {
                throw ConfigError(field(key), "expected a non-negative integer");
            }
            out = v->get<std::size_t>();
        }
    }
    void read(const std::string& key, bool& out) {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) throw ConfigError(field(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void read(const std::string& key, std::string& out) {
        if (const json* v = find(key)) {
            if (!v->is_string()) throw ConfigError(field(key), "expected a string");
            out = v->get<std::string>();
        }
    }
    void read(const std::string& key, ga::GeneBounds& out) {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
                throw ConfigError(field(key), "expected [lo, hi]");
            }
            out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
            if (!(out.lo <= out.hi)) throw ConfigError(field(key), "lo must not exceed hi");
        }
    }
    void read(const std::string& key, seasonal::PriorRange& out) {
        ga::GeneBounds b{out.lo, out.hi};
        read(key, b);
        out = {b.lo, b.hi};
    }

    template <class Fn>
    void section(const std::string& key, Fn&& fn) {
        if (const json* v = find(key)) {
            Section sub(*v, field(key));
            fn(sub);
            sub.finish();
        }
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw ConfigError(field(key), "unknown field");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

}  // namespace

PipelineConfig parse_config(const nlohmann::json& j) {
    PipelineConfig cfg;
    Section root(j, "");
    root.section("input", [&](Section& s) {
        s.read("path", cfg.input.path);
        s.read("timestamp_column", cfg.input.timestamp_column);
        s.read("value_column", cfg.input.value_column);
    });
    root.read("forward_fill", cfg.forward_fill);
    root.read("train_fraction", cfg.train_fraction);
    root.read("seed", cfg.seed);
    root.read("output_dir", cfg.output_dir);
    if (const json* models = root.find("models")) {
        if (!models->is_array()) throw ConfigError("models", "expected a list of model names");
        cfg.models.clear();
        for (const auto& m : *models) {
            if (!m.is_string()) throw ConfigError("models", "expected a list of model names");
            cfg.models.push_back(m.get<std::string>());
        }
    }

    auto& ev = cfg.evaluation;
    root.section("horizons", [&](Section& s) {
        s.read("evaluation", ev.horizon);
        s.read("arima", ev.arima_forecast_horizon);
        s.read("seasonal", ev.seasonal_forecast_horizon);
        s.read("seasonal_take", ev.seasonal_forecast_take);
        s.read("lstm", ev.lstm_forecast_horizon);
    });
    root.section("arima", [&](Section& s) {
        s.read("p", ev.arima_order.p);
        s.read("d", ev.arima_order.d);
        s.read("q", ev.arima_order.q);
        s.read("optimizer_budget", ev.arima_budget);
        s.read("outlier_3sigma", ev.arima_outlier_3sigma);
    });
    root.section("seasonal", [&](Section& s) {
        s.read("n_changepoints", ev.st.n_changepoints);
        s.read("daily_order", ev.st.daily_order);
        s.read("weekly_order", ev.st.weekly_order);
        s.read("changepoint_prior_scale", ev.st.changepoint_prior_scale);
        s.read("seasonality_prior_scale", ev.st.seasonality_prior_scale);
        s.read("changepoint_range", ev.st.changepoint_range);
        s.read("outlier_3sigma", ev.seasonal_outlier_3sigma);
    });
    root.section("lstm", [&](Section& s) {
        s.read("units1", ev.lstm_hp.units1);
        s.read("units2", ev.lstm_hp.units2);
        s.read("dropout1_gene", ev.lstm_hp.dropout1_gene);
        s.read("dropout2_gene", ev.lstm_hp.dropout2_gene);
        s.read("epochs", ev.lstm_train.epochs);
        s.read("batch_size", ev.lstm_train.batch_size);
        s.read("learning_rate", ev.lstm_train.learning_rate);
        s.read("outlier_3sigma", ev.lstm_outlier_3sigma);
    });
    root.section("ga", [&](Section& s) {
        s.read("population_size", cfg.ga.population_size);
        s.read("generations", cfg.ga.generations);
        s.read("tournament_k", cfg.ga.tournament_k);
        s.read("sbx_eta", cfg.ga.sbx_eta);
        s.read("base_mutation_prob", cfg.ga.base_mutation_prob);
        if (const json* v = s.find("mutation_std")) {
            if (!v->is_null()) {
                if (!v->is_number()) throw ConfigError(s.field("mutation_std"), "expected a number or null");
                cfg.ga.mutation_std = v->get<double>();
            }
        }
    });
    root.section("tune_lstm", [&](Section& s) {
        s.read("population_size", cfg.tune_lstm.population_size);
        s.read("parents", cfg.tune_lstm.parents);
        s.read("generations", cfg.tune_lstm.generations);
        s.read("epochs", cfg.tune_lstm.epochs);
        s.read("batch_size", cfg.tune_lstm.batch_size);
        s.read("learning_rate", cfg.tune_lstm.learning_rate);
        s.read("sbx_eta", cfg.tune_lstm.sbx_eta);
        s.read("base_mutation_prob", cfg.tune_lstm.base_mutation_prob);
        s.read("units1", cfg.lstm_space.units1);
        s.read("units2", cfg.lstm_space.units2);
        s.read("dropout1", cfg.lstm_space.dropout1);
        s.read("dropout2", cfg.lstm_space.dropout2);
    });
    root.section("tune_seasonal", [&](Section& s) {
        s.read("population_size", cfg.tune_seasonal.population_size);
        s.read("parents", cfg.tune_seasonal.parents);
        s.read("generations", cfg.tune_seasonal_generations);
        s.read("holdout_fraction", cfg.tune_seasonal.holdout_fraction);
        s.read("changepoint_prior_scale", cfg.seasonal_ranges.changepoint);
        s.read("seasonality_prior_scale", cfg.seasonal_ranges.seasonality);
    });
    root.section("explain", [&](Section& s) {
        s.read("background_rows", cfg.shap.background_rows);
        s.read("instances", cfg.shap.instances);
        s.read("n_coalitions", cfg.shap.n_coalitions);
        s.read("holdout_fraction", cfg.shap.holdout_fraction);
        s.read("min_r2", cfg.shap.min_r2);
        s.read("forest_trees", cfg.shap.forest.n_trees);
        s.read("forest_max_depth", cfg.shap.forest.max_depth);
        s.read("boost_rounds", cfg.shap.boost.n_rounds);
        s.read("boost_max_depth", cfg.shap.boost.max_depth);
        s.read("boost_learning_rate", cfg.shap.boost.learning_rate);
    });
    root.finish();
    apply_seed(cfg, cfg.seed);
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

void apply_seed(PipelineConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.evaluation.lstm_train.seed = seed;
    cfg.ga.seed = seed;
    cfg.tune_lstm.seed = seed;
    cfg.tune_seasonal.seed = seed;
    cfg.shap.seed = seed;
    cfg.shap.forest.seed = seed;
    cfg.shap.boost.seed = seed;
}

void validate(const PipelineConfig& cfg) {
    require(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0, "train_fraction", "must lie in (0, 1)");
    const auto& ev = cfg.evaluation;
    require(ev.horizon >= 1, "horizons.evaluation", "must be >= 1");
    require(ev.arima_forecast_horizon >= 1, "horizons.arima", "must be >= 1");
    require(ev.seasonal_forecast_horizon >= 1, "horizons.seasonal", "must be >= 1");
    require(ev.seasonal_forecast_take >= 1, "horizons.seasonal_take", "must be >= 1");
    require(ev.lstm_forecast_horizon >= 1, "horizons.lstm", "must be >= 1");
    for (const auto& m : cfg.models) {
        require(m == "arima" || m == "seasonal" || m == "lstm", "models", "unknown model '" + m + "'");
    }
    auto wrap = [](const std::string& field, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(field, e.what());
        }
    };
    wrap("arima", [&] { ev.arima_order.validate(); });
    require(ev.arima_budget >= 1, "arima.optimizer_budget", "must be >= 1");
    wrap("seasonal", [&] { ev.st.validate(); });
    wrap("lstm", [&] { ev.lstm_hp.validate(); });
    wrap("lstm", [&] { ev.lstm_train.validate(); });
    wrap("ga", [&] { cfg.ga.validate(); });
    require(cfg.tune_lstm.population_size >= 2, "tune_lstm.population_size", "must be >= 2");
    require(cfg.tune_lstm.parents >= 1 && cfg.tune_lstm.parents <= cfg.tune_lstm.population_size,
            "tune_lstm.parents", "must lie in [1, population_size]");
    require(cfg.tune_lstm.generations >= 1, "tune_lstm.generations", "must be >= 1");
    require(cfg.tune_lstm.epochs >= 1, "tune_lstm.epochs", "must be >= 1");
    require(cfg.tune_seasonal.population_size >= 2, "tune_seasonal.population_size", "must be >= 2");
    require(cfg.tune_seasonal.parents >= 1 && cfg.tune_seasonal.parents <= cfg.tune_seasonal.population_size,
            "tune_seasonal.parents", "must lie in [1, population_size]");
    require(cfg.tune_seasonal_generations >= 1, "tune_seasonal.generations", "must be >= 1");
    require(cfg.seasonal_ranges.changepoint.lo > 0.0, "tune_seasonal.changepoint_prior_scale", "must be positive");
    require(cfg.seasonal_ranges.seasonality.lo > 0.0, "tune_seasonal.seasonality_prior_scale", "must be positive");
    require(cfg.shap.background_rows >= 1, "explain.background_rows", "must be >= 1");
    require(cfg.shap.instances >= 1, "explain.instances", "must be >= 1");
    require(cfg.shap.n_coalitions >= 2, "explain.n_coalitions", "must be >= 2");
    require(cfg.shap.holdout_fraction > 0.0 && cfg.shap.holdout_fraction < 1.0, "explain.holdout_fraction",
            "must lie in (0, 1)");
}

nlohmann::ordered_json to_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["input"] = {{"path", cfg.input.path},
                  {"timestamp_column", cfg.input.timestamp_column},
                  {"value_column", cfg.input.value_column}};
    j["forward_fill"] = cfg.forward_fill;
    j["train_fraction"] = cfg.train_fraction;
    j["seed"] = cfg.seed;
    j["models"] = cfg.models;
    const auto& ev = cfg.evaluation;
    j["horizons"] = {{"evaluation", ev.horizon},
                     {"arima", ev.arima_forecast_horizon},
                     {"seasonal", ev.seasonal_forecast_horizon},
                     {"seasonal_take", ev.seasonal_forecast_take},
                     {"lstm", ev.lstm_forecast_horizon}};
    j["arima"] = {{"p", ev.arima_order.p},
                  {"d", ev.arima_order.d},
                  {"q", ev.arima_order.q},
                  {"optimizer_budget", ev.arima_budget},
                  {"outlier_3sigma", ev.arima_outlier_3sigma}};
    j["seasonal"] = {{"n_changepoints", ev.st.n_changepoints},
                     {"daily_order", ev.st.daily_order},
                     {"weekly_order", ev.st.weekly_order},
                     {"changepoint_prior_scale", ev.st.changepoint_prior_scale},
                     {"seasonality_prior_scale", ev.st.seasonality_prior_scale},
                     {"changepoint_range", ev.st.changepoint_range},
                     {"outlier_3sigma", ev.seasonal_outlier_3sigma}};
    j["lstm"] = {{"units1", ev.lstm_hp.units1},
                 {"units2", ev.lstm_hp.units2},
                 {"dropout1_gene", ev.lstm_hp.dropout1_gene},
                 {"dropout2_gene", ev.lstm_hp.dropout2_gene},
                 {"epochs", ev.lstm_train.epochs},
                 {"batch_size", ev.lstm_train.batch_size},
                 {"learning_rate", ev.lstm_train.learning_rate},
                 {"outlier_3sigma", ev.lstm_outlier_3sigma}};
    nlohmann::ordered_json ga = {{"population_size", cfg.ga.population_size},
                                 {"generations", cfg.ga.generations},
                                 {"tournament_k", cfg.ga.tournament_k},
                                 {"sbx_eta", cfg.ga.sbx_eta},
                                 {"base_mutation_prob", cfg.ga.base_mutation_prob}};
    ga["mutation_std"] = cfg.ga.mutation_std ? nlohmann::ordered_json(*cfg.ga.mutation_std) : nullptr;
    j["ga"] = ga;
    j["tune_lstm"] = {{"population_size", cfg.tune_lstm.population_size},
                      {"parents", cfg.tune_lstm.parents},
                      {"generations", cfg.tune_lstm.generations},
                      {"epochs", cfg.tune_lstm.epochs},
                      {"batch_size", cfg.tune_lstm.batch_size},
                      {"learning_rate", cfg.tune_lstm.learning_rate},
                      {"sbx_eta", cfg.tune_lstm.sbx_eta},
                      {"base_mutation_prob", cfg.tune_lstm.base_mutation_prob},
                      {"units1", {cfg.lstm_space.units1.lo, cfg.lstm_space.units1.hi}},
                      {"units2", {cfg.lstm_space.units2.lo, cfg.lstm_space.units2.hi}},
                      {"dropout1", {cfg.lstm_space.dropout1.lo, cfg.lstm_space.dropout1.hi}},
                      {"dropout2", {cfg.lstm_space.dropout2.lo, cfg.lstm_space.dropout2.hi}}};
    j["tune_seasonal"] = {
        {"population_size", cfg.tune_seasonal.population_size},
        {"parents", cfg.tune_seasonal.parents},
        {"generations", cfg.tune_seasonal_generations},
        {"holdout_fraction", cfg.tune_seasonal.holdout_fraction},
        {"changepoint_prior_scale", {cfg.seasonal_ranges.changepoint.lo, cfg.seasonal_ranges.changepoint.hi}},
        {"seasonality_prior_scale", {cfg.seasonal_ranges.seasonality.lo, cfg.seasonal_ranges.seasonality.hi}}};
    j["explain"] = {{"background_rows", cfg.shap.background_rows},
                    {"instances", cfg.shap.instances},
                    {"n_coalitions", cfg.shap.n_coalitions},
                    {"holdout_fraction", cfg.shap.holdout_fraction},
                    {"min_r2", cfg.shap.min_r2},
                    {"forest_trees", cfg.shap.forest.n_trees},
                    {"forest_max_depth", cfg.shap.forest.max_depth},
                    {"boost_rounds", cfg.shap.boost.n_rounds},
                    {"boost_max_depth", cfg.shap.boost.max_depth},
                    {"boost_learning_rate", cfg.shap.boost.learning_rate}};
    return j;
}

}  // namespace wardwatt::cli
