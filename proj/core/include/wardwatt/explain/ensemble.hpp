#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wardwatt/explain/tree.hpp"

namespace wardwatt::explain {

struct ForestOptions {
    int n_trees = 100;
    int max_depth = 8;
    std::size_t min_samples_leaf = 1;
    // 0 means ceil(M / 3).
    std::size_t features_per_split = 0;
    bool bootstrap = true;
    std::uint64_t seed = 42;
};

class ForestSurrogate {
public:
    ForestSurrogate() = default;
    explicit ForestSurrogate(std::vector<RegressionTree> trees) : trees_(std::move(trees)) {}

    double predict(std::span<const double> x) const;
    std::size_t n_trees() const noexcept { return trees_.size(); }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

private:
    std::vector<RegressionTree> trees_;
};

// Each tree sees a same-size bootstrap sample and a fresh random feature
// subset per split; tree t draws from its own stream derived from the seed.
ForestSurrogate fit_forest(const FeatureRows& features, std::span<const double> targets, const ForestOptions& options);

struct BoostOptions {
    int n_rounds = 200;
    int max_depth = 4;
    std::size_t min_samples_leaf = 1;
    double learning_rate = 0.1;
    std::uint64_t seed = 42;
};

class BoostedSurrogate {
public:
    BoostedSurrogate() = default;
    BoostedSurrogate(double base, double learning_rate, std::vector<RegressionTree> trees,
                     std::vector<double> training_mse)
        : base_(base), learning_rate_(learning_rate), trees_(std::move(trees)), training_mse_(std::move(training_mse)) {}

    double predict(std::span<const double> x) const;
    double base_prediction() const noexcept { return base_; }
    double learning_rate() const noexcept { return learning_rate_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    // Entry 0 is the constant model; entry t follows round t.
    const std::vector<double>& training_mse() const noexcept { return training_mse_; }

private:
    double base_ = 0.0;
    double learning_rate_ = 0.1;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_mse_;
};

// Squared-error gradient boosting: each round fits a depth-limited tree to
// the current residuals and adds learning_rate times its output.
BoostedSurrogate fit_gbt(const FeatureRows& features, std::span<const double> targets, const BoostOptions& options);

double r_squared(std::span<const double> actual, std::span<const double> predicted);

}  // namespace wardwatt::explain
