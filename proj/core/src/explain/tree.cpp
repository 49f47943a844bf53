#include "wardwatt/explain/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace wardwatt::explain {

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes_.empty()) throw std::logic_error("RegressionTree::predict on an unfitted tree");
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
        const auto& n = nodes_[static_cast<std::size_t>(i)];
        i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(i)].value;
}

int RegressionTree::depth() const {
    if (nodes_.empty()) return 0;
    std::vector<int> d(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        if (n.is_leaf()) continue;
        d[static_cast<std::size_t>(n.left)] = d[i] + 1;
        d[static_cast<std::size_t>(n.right)] = d[i] + 1;
        deepest = std::max(deepest, d[i] + 1);
    }
    return deepest;
}

namespace {

struct Builder {
    const FeatureRows& x;
    std::span<const double> y;
    const TreeOptions& opt;
    Rng& rng;
    std::size_t n_features;
    std::vector<TreeNode> nodes;

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gain = 0.0;
        std::size_t left_count = 0;
    };

    Split best_split(std::vector<std::size_t>& idx) {
        std::vector<std::size_t> features(n_features);
        std::iota(features.begin(), features.end(), 0);
        if (opt.features_per_split > 0 && opt.features_per_split < n_features) {
            // Partial Fisher-Yates, then examine in ascending order so ties
            // still resolve to the lowest feature index.
            for (std::size_t k = 0; k < opt.features_per_split; ++k) {
                std::uniform_int_distribution<std::size_t> pick(k, n_features - 1);
                std::swap(features[k], features[pick(rng)]);
            }
            features.resize(opt.features_per_split);
            std::sort(features.begin(), features.end());
        }
        const auto n = idx.size();
        double total = 0.0;
        for (auto i : idx) total += y[i];
        const double parent_term = total * total / static_cast<double>(n);

        Split best;
        std::vector<std::size_t> order = idx;
        for (auto f : features) {
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a][f] < x[b][f]; });
            double left_sum = 0.0;
            for (std::size_t k = 0; k + 1 < n; ++k) {
                left_sum += y[order[k]];
                const double lo = x[order[k]][f];
                const double hi = x[order[k + 1]][f];
                if (!(lo < hi)) continue;
                const std::size_t nl = k + 1;
                const std::size_t nr = n - nl;
                if (nl < opt.min_samples_leaf || nr < opt.min_samples_leaf) continue;
                const double right_sum = total - left_sum;
                const double gain = left_sum * left_sum / static_cast<double>(nl) +
                                    right_sum * right_sum / static_cast<double>(nr) - parent_term;
                if (gain > best.gain + 1e-12 * std::abs(best.gain) + 1e-300 || (best.feature < 0 && gain > 0.0)) {
                    best = {static_cast<int>(f), 0.5 * (lo + hi), gain, nl};
                }
            }
        }
        return best;
    }

    int grow(std::vector<std::size_t> idx, int depth) {
        const auto node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        double mean = 0.0;
        for (auto i : idx) mean += y[i];
        mean /= static_cast<double>(idx.size());
        double sse = 0.0, scale = 0.0;
        for (auto i : idx) {
            sse += (y[i] - mean) * (y[i] - mean);
            scale += y[i] * y[i];
        }
        nodes[static_cast<std::size_t>(node_id)].value = mean;
        if (depth >= opt.max_depth || idx.size() < 2 * std::max<std::size_t>(opt.min_samples_leaf, 1) ||
            sse <= 1e-24 * (scale + 1.0)) {
            return node_id;
        }
        const Split s = best_split(idx);
        if (s.feature < 0) return node_id;

        std::vector<std::size_t> left, right;
        for (auto i : idx) (x[i][static_cast<std::size_t>(s.feature)] <= s.threshold ? left : right).push_back(i);
        idx.clear();
        idx.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& n = nodes[static_cast<std::size_t>(node_id)];
        n.feature = s.feature;
        n.threshold = s.threshold;
        n.left = l;
        n.right = r;
        return node_id;
    }
};

}  // namespace

RegressionTree fit_cart(const FeatureRows& features, std::span<const double> targets, const TreeOptions& options,
                        Rng& rng) {
    std::vector<std::size_t> all(features.size());
    std::iota(all.begin(), all.end(), 0);
    return fit_cart(features, targets, all, options, rng);
}

RegressionTree fit_cart(const FeatureRows& features, std::span<const double> targets,
                        std::span<const std::size_t> sample, const TreeOptions& options, Rng& rng) {
    if (features.empty() || sample.empty()) throw std::invalid_argument("fit_cart: empty data");
    if (features.size() != targets.size()) throw std::invalid_argument("fit_cart: feature/target count mismatch");
    if (options.max_depth < 0) throw std::invalid_argument("fit_cart: max_depth must be >= 0");
    const std::size_t m = features.front().size();
    for (const auto& row : features) {
        if (row.size() != m) throw std::invalid_argument("fit_cart: ragged feature rows");
    }
    Builder b{features, targets, options, rng, m, {}};
    b.grow({sample.begin(), sample.end()}, 0);
    return RegressionTree(std::move(b.nodes));
}

}  // namespace wardwatt::explain
