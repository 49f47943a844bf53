#include "wardwatt/explain/ensemble.hpp"

#include <cmath>
#include <stdexcept>

namespace wardwatt::explain {

namespace {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double ForestSurrogate::predict(std::span<const double> x) const {
    if (trees_.empty()) throw std::logic_error("ForestSurrogate::predict on an empty forest");
    double sum = 0.0;
    for (const auto& t : trees_) sum += t.predict(x);
    return sum / static_cast<double>(trees_.size());
}

ForestSurrogate fit_forest(const FeatureRows& features, std::span<const double> targets, const ForestOptions& opt) {
    if (features.empty()) throw std::invalid_argument("fit_forest: empty data");
    if (opt.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
    const std::size_t m = features.front().size();
    TreeOptions tree_opt;
    tree_opt.max_depth = opt.max_depth;
    tree_opt.min_samples_leaf = opt.min_samples_leaf;
    tree_opt.features_per_split = opt.features_per_split > 0 ? opt.features_per_split : (m + 2) / 3;

    const std::size_t n = features.size();
    std::vector<RegressionTree> trees;
    trees.reserve(static_cast<std::size_t>(opt.n_trees));
    std::vector<std::size_t> sample(n);
    for (int t = 0; t < opt.n_trees; ++t) {
        Rng rng(stream_seed(opt.seed, static_cast<std::uint64_t>(t)));
        if (opt.bootstrap) {
            std::uniform_int_distribution<std::size_t> pick(0, n - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            for (std::size_t i = 0; i < n; ++i) sample[i] = i;
        }
        trees.push_back(fit_cart(features, targets, sample, tree_opt, rng));
    }
    return ForestSurrogate(std::move(trees));
}

double BoostedSurrogate::predict(std::span<const double> x) const {
    double out = base_;
    for (const auto& t : trees_) out += learning_rate_ * t.predict(x);
    return out;
}

BoostedSurrogate fit_gbt(const FeatureRows& features, std::span<const double> targets, const BoostOptions& opt) {
    if (features.empty()) throw std::invalid_argument("fit_gbt: empty data");
    if (features.size() != targets.size()) throw std::invalid_argument("fit_gbt: feature/target count mismatch");
    if (opt.n_rounds < 0) throw std::invalid_argument("fit_gbt: n_rounds must be >= 0");
    if (!(opt.learning_rate > 0.0)) throw std::invalid_argument("fit_gbt: learning_rate must be > 0");
    const std::size_t n = features.size();
    double base = 0.0;
    for (double y : targets) base += y;
    base /= static_cast<double>(n);

    std::vector<double> current(n, base);
    std::vector<double> residual(n);
    auto mse = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (targets[i] - current[i]) * (targets[i] - current[i]);
        return s / static_cast<double>(n);
    };
    std::vector<double> history{mse()};
    TreeOptions tree_opt;
    tree_opt.max_depth = opt.max_depth;
    tree_opt.min_samples_leaf = opt.min_samples_leaf;
    Rng rng(opt.seed);
    std::vector<RegressionTree> trees;
    for (int round = 0; round < opt.n_rounds; ++round) {
        for (std::size_t i = 0; i < n; ++i) residual[i] = targets[i] - current[i];
        auto tree = fit_cart(features, residual, tree_opt, rng);
        for (std::size_t i = 0; i < n; ++i) current[i] += opt.learning_rate * tree.predict(features[i]);
        trees.push_back(std::move(tree));
        history.push_back(mse());
    }
    return BoostedSurrogate(base, opt.learning_rate, std::move(trees), std::move(history));
}

double r_squared(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size() || actual.empty()) throw std::invalid_argument("r_squared: bad lengths");
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ss_res += (actual[i] - predicted[i]) * (actual[i] - predicted[i]);
        ss_tot += (actual[i] - mean) * (actual[i] - mean);
    }
    if (ss_tot == 0.0) return ss_res == 0.0 ? 1.0 : 0.0;
    return 1.0 - ss_res / ss_tot;
}

}  // namespace wardwatt::explain
