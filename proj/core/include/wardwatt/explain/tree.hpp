#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace wardwatt::explain {

using Rng = std::mt19937_64;
// Row-major feature table: rows[i][j] is feature j of sample i.
using FeatureRows = std::vector<std::vector<double>>;

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;
    double value = 0.0;  // mean target of the node's samples

    bool is_leaf() const noexcept { return feature < 0; }
};

struct TreeOptions {
    int max_depth = 8;
    std::size_t min_samples_leaf = 1;
    // Features examined per split, drawn without replacement; 0 means all.
    std::size_t features_per_split = 0;
};

class RegressionTree {
public:
    RegressionTree() = default;
    explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

    double predict(std::span<const double> x) const;
    int depth() const;
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }

private:
    std::vector<TreeNode> nodes_;
};

// Greedy variance-reduction CART. Candidate thresholds are midpoints
// between consecutive distinct sorted values; ties go to the lowest
// feature index, then the lowest threshold.
RegressionTree fit_cart(const FeatureRows& features, std::span<const double> targets, const TreeOptions& options,
                        Rng& rng);
// Same, trained on the multiset `sample` of row indices.
RegressionTree fit_cart(const FeatureRows& features, std::span<const double> targets,
                        std::span<const std::size_t> sample, const TreeOptions& options, Rng& rng);

}  // namespace wardwatt::explain
