#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wardwatt/explain/tree.hpp"

namespace wardwatt::explain {

using Predictor = std::function<double(std::span<const double>)>;
// Expected prediction when only the features flagged in `present` take the
// explained instance's values and the rest come from the background.
using MaskedValue = std::function<double(std::span<const char> present)>;

struct KernelShapOptions {
    // Coalition budget for sampled mode.
    std::size_t n_coalitions = 2048;
    // Up to this many features every coalition is enumerated.
    std::size_t exact_max_features = 12;
    std::uint64_t seed = 0;
};

struct ShapValues {
    std::vector<double> phi;
    double base_value = 0.0;  // mean prediction over the background
    double prediction = 0.0;  // f(instance)
    bool exact = false;
};

// Kernel SHAP: "absent" features take background values and the masked
// prediction is averaged over the background rows. Attributions solve the
// Shapley-kernel weighted least squares with the efficiency constraint
// sum(phi) = f(x) - base imposed exactly. A ridge of 1e-10 times the mean
// diagonal is added to the normal equations; a system that is still
// singular raises NumericalError.
ShapValues kernel_shap(const Predictor& predict, std::span<const double> instance, const FeatureRows& background,
                       const KernelShapOptions& options = {});

// Same estimator driven directly by a coalition value function over M
// features. The all-present and all-absent coalitions give the prediction
// and the base value.
ShapValues kernel_shap(const MaskedValue& value, std::size_t m, const KernelShapOptions& options = {});

// Coalition values of an additive tree ensemble
//   f(x) = bias + scale * sum_t tree_t(x)
// averaged over a background set. Background rows are pushed down each
// tree together, so every row is visited once per split on an absent
// feature. Holds scratch space; one evaluator per thread.
class TreeEnsembleExpectation {
public:
    TreeEnsembleExpectation(std::vector<const RegressionTree*> trees, double scale, double bias,
                            const FeatureRows& background);

    // Binds the explained instance; returns a value function for kernel_shap.
    MaskedValue bind(std::span<const double> instance);
    double value(std::span<const char> present, std::span<const double> instance);

private:
    double descend(const RegressionTree& tree, int node, std::size_t lo, std::size_t hi,
                   std::span<const char> present, std::span<const double> instance);

    std::vector<const RegressionTree*> trees_;
    double scale_;
    double bias_;
    std::size_t n_rows_;
    std::size_t n_features_ = 0;
    std::vector<double> columns_;  // feature-major background
    std::vector<std::size_t> rows_;
    std::vector<double> instance_;
};

// (M - 1) / (C(M, s) * s * (M - s))
double shapley_kernel_weight(std::size_t m, std::size_t s);

}  // namespace wardwatt::explain
