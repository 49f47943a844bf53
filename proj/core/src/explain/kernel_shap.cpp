#include "wardwatt/explain/kernel_shap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "wardwatt/error.hpp"

namespace wardwatt::explain {

namespace {

double binomial(std::size_t n, std::size_t k) {
    return std::exp(std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
                    std::lgamma(static_cast<double>(n - k) + 1.0));
}

using Mask = std::vector<char>;

struct Coalitions {
    std::vector<Mask> masks;
    std::vector<double> weights;
};

void add(Coalitions& c, Mask m, double w) {
    c.masks.push_back(std::move(m));
    c.weights.push_back(w);
}

Coalitions enumerate_all(std::size_t m) {
    Coalitions c;
    const std::uint64_t total = std::uint64_t{1} << m;
    for (std::uint64_t bits = 1; bits + 1 < total; ++bits) {
        Mask mask(m);
        std::size_t s = 0;
        for (std::size_t j = 0; j < m; ++j) {
            mask[j] = static_cast<char>((bits >> j) & 1U);
            s += static_cast<std::size_t>(mask[j]);
        }
        add(c, std::move(mask), shapley_kernel_weight(m, s));
    }
    return c;
}

// Complete subset sizes are enumerated while the budget covers them (from
// the smallest/largest sizes inwards, paired with complements); the rest of
// the kernel mass is spread over randomly drawn subsets.
Coalitions sample_coalitions(std::size_t m, std::size_t budget, Rng& rng) {
    const std::size_t n_sizes = m / 2 + (m % 2);         // ceil((M-1)/2) sizes, counting from 1
    const std::size_t n_sizes_eff = (m - 1 + 1) / 2;     // ceil((M-1)/2)
    const std::size_t n_paired = (m - 1) / 2;            // floor((M-1)/2)
    (void)n_sizes;
    std::vector<double> weight(n_sizes_eff);
    for (std::size_t s = 1; s <= n_sizes_eff; ++s) {
        weight[s - 1] = static_cast<double>(m - 1) / static_cast<double>(s * (m - s));
        if (s <= n_paired) weight[s - 1] *= 2.0;
    }
    const double total_w = std::accumulate(weight.begin(), weight.end(), 0.0);
    for (auto& w : weight) w /= total_w;

    Coalitions c;
    double remaining_budget = static_cast<double>(budget);
    std::vector<double> remaining = weight;
    std::size_t full_sizes = 0;
    for (std::size_t s = 1; s <= n_sizes_eff; ++s) {
        double n_subsets = binomial(m, s);
        if (s <= n_paired) n_subsets *= 2.0;
        if (remaining_budget * remaining[s - 1] / n_subsets < 1.0 - 1e-8) break;
        ++full_sizes;
        remaining_budget -= n_subsets;
        const double mass_left = 1.0 - remaining[s - 1];
        if (mass_left > 0.0) {
            for (auto& r : remaining) r /= mass_left;
        }
        double w = weight[s - 1] / binomial(m, s);
        if (s <= n_paired) w /= 2.0;
        // Enumerate all size-s subsets via a combination index vector.
        std::vector<std::size_t> comb(s);
        std::iota(comb.begin(), comb.end(), 0);
        while (true) {
            Mask mask(m, 0);
            for (auto j : comb) mask[j] = 1;
            if (s <= n_paired) {
                Mask comp(m);
                for (std::size_t j = 0; j < m; ++j) comp[j] = static_cast<char>(1 - mask[j]);
                add(c, std::move(comp), w);
            }
            add(c, std::move(mask), w);
            std::size_t i = s;
            while (i > 0 && comb[i - 1] == m - s + i - 1) --i;
            if (i == 0) break;
            ++comb[i - 1];
            for (std::size_t k = i; k < s; ++k) comb[k] = comb[k - 1] + 1;
        }
    }

    const double weight_left = std::accumulate(weight.begin() + static_cast<long>(full_sizes), weight.end(), 0.0);
    if (full_sizes < n_sizes_eff && remaining_budget >= 2.0 && weight_left > 0.0) {
        std::vector<double> size_probs(weight.begin() + static_cast<long>(full_sizes), weight.end());
        std::discrete_distribution<std::size_t> pick_size(size_probs.begin(), size_probs.end());
        std::map<Mask, double> counts;
        std::vector<std::size_t> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        auto draws = static_cast<std::size_t>(remaining_budget);
        std::size_t added = 0;
        double total_count = 0.0;
        // Bound the loop in case the remaining space is tiny and fully drawn.
        for (std::size_t attempt = 0; added < draws && attempt < 50 * draws; ++attempt) {
            const std::size_t s = full_sizes + 1 + pick_size(rng);
            std::shuffle(perm.begin(), perm.end(), rng);
            Mask mask(m, 0);
            for (std::size_t k = 0; k < s; ++k) mask[perm[k]] = 1;
            auto [it, fresh] = counts.try_emplace(mask, 0.0);
            it->second += 1.0;
            total_count += 1.0;
            if (fresh) ++added;
            if (s <= n_paired) {
                Mask comp(m);
                for (std::size_t j = 0; j < m; ++j) comp[j] = static_cast<char>(1 - mask[j]);
                auto [it2, fresh2] = counts.try_emplace(std::move(comp), 0.0);
                it2->second += 1.0;
                total_count += 1.0;
                if (fresh2) ++added;
            }
        }
        for (auto& [mask, count] : counts) add(c, mask, weight_left * count / total_count);
    }
    return c;
}

}  // namespace

double shapley_kernel_weight(std::size_t m, std::size_t s) {
    if (s == 0 || s >= m) throw std::invalid_argument("shapley_kernel_weight: size must lie in [1, M-1]");
    return static_cast<double>(m - 1) / (binomial(m, s) * static_cast<double>(s) * static_cast<double>(m - s));
}

ShapValues kernel_shap(const Predictor& predict, std::span<const double> instance, const FeatureRows& background,
                       const KernelShapOptions& options) {
    if (background.empty()) throw std::invalid_argument("kernel_shap: empty background");
    const std::size_t m = instance.size();
    for (const auto& row : background) {
        if (row.size() != m) throw std::invalid_argument("kernel_shap: background dimension differs from instance");
    }
    std::vector<double> probe(m);
    const MaskedValue value = [&](std::span<const char> present) {
        double acc = 0.0;
        for (const auto& row : background) {
            for (std::size_t j = 0; j < m; ++j) probe[j] = present[j] ? instance[j] : row[j];
            acc += predict(probe);
        }
        return acc / static_cast<double>(background.size());
    };
    return kernel_shap(value, m, options);
}

ShapValues kernel_shap(const MaskedValue& value, std::size_t m, const KernelShapOptions& options) {
    if (m == 0) throw std::invalid_argument("kernel_shap: instance has no features");
    ShapValues out;
    out.prediction = value(Mask(m, 1));
    const double base = value(Mask(m, 0));
    out.base_value = base;
    out.phi.assign(m, 0.0);
    const double delta = out.prediction - base;
    if (m == 1) {
        out.phi[0] = delta;
        out.exact = true;
        return out;
    }

    out.exact = m <= options.exact_max_features;
    Coalitions coal;
    if (out.exact) {
        coal = enumerate_all(m);
    } else {
        Rng rng(options.seed);
        coal = sample_coalitions(m, options.n_coalitions, rng);
    }

    // Eliminate the last feature through the efficiency constraint:
    //   v(z) - base - z_M * delta = sum_{i<M} phi_i (z_i - z_M).
    const auto p = static_cast<Eigen::Index>(m - 1);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd row(p);
    for (std::size_t k = 0; k < coal.masks.size(); ++k) {
        const Mask& mask = coal.masks[k];
        const double zm = mask[m - 1];
        for (Eigen::Index i = 0; i < p; ++i) row(i) = mask[static_cast<std::size_t>(i)] - zm;
        const double w = coal.weights[k];
        const double y = value(mask) - base - zm * delta;
        a.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
        b += w * y * row;
    }
    a = a.selfadjointView<Eigen::Lower>();
    a.diagonal().array() += 1e-10 * a.diagonal().mean();
    const Eigen::LDLT<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success || !solver.isPositive() || solver.rcond() < 1e-14) {
        throw NumericalError("kernel_shap: singular weighted least-squares system");
    }
    const Eigen::VectorXd phi = solver.solve(b);
    double partial = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        out.phi[static_cast<std::size_t>(i)] = phi(i);
        partial += phi(i);
    }
    out.phi[m - 1] = delta - partial;
    return out;
}

TreeEnsembleExpectation::TreeEnsembleExpectation(std::vector<const RegressionTree*> trees, double scale, double bias,
                                                 const FeatureRows& background)
    : trees_(std::move(trees)), scale_(scale), bias_(bias), n_rows_(background.size()) {
    if (background.empty()) throw std::invalid_argument("TreeEnsembleExpectation: empty background");
    n_features_ = background.front().size();
    columns_.resize(n_rows_ * n_features_);
    for (std::size_t r = 0; r < n_rows_; ++r) {
        if (background[r].size() != n_features_) {
            throw std::invalid_argument("TreeEnsembleExpectation: ragged background");
        }
        for (std::size_t j = 0; j < n_features_; ++j) columns_[j * n_rows_ + r] = background[r][j];
    }
    rows_.resize(n_rows_);
}

MaskedValue TreeEnsembleExpectation::bind(std::span<const double> instance) {
    if (instance.size() != n_features_) throw std::invalid_argument("TreeEnsembleExpectation: instance dimension");
    instance_.assign(instance.begin(), instance.end());
    return [this](std::span<const char> present) { return value(present, instance_); };
}

double TreeEnsembleExpectation::value(std::span<const char> present, std::span<const double> instance) {
    double sum = 0.0;
    for (const RegressionTree* tree : trees_) {
        std::iota(rows_.begin(), rows_.end(), std::size_t{0});
        sum += descend(*tree, 0, 0, n_rows_, present, instance);
    }
    return bias_ + scale_ * sum / static_cast<double>(n_rows_);
}

// Sum of leaf values over the background rows rows_[lo, hi) entering `node`.
double TreeEnsembleExpectation::descend(const RegressionTree& tree, int node, std::size_t lo, std::size_t hi,
                                        std::span<const char> present, std::span<const double> instance) {
    const auto& nodes = tree.nodes();
    while (true) {
        const TreeNode& n = nodes[static_cast<std::size_t>(node)];
        if (n.is_leaf()) return n.value * static_cast<double>(hi - lo);
        const auto f = static_cast<std::size_t>(n.feature);
        if (present[f]) {
            node = instance[f] <= n.threshold ? n.left : n.right;
            continue;
        }
        const double* col = columns_.data() + f * n_rows_;
        const auto first = rows_.begin() + static_cast<long>(lo);
        const auto split = std::partition(first, rows_.begin() + static_cast<long>(hi),
                                          [&](std::size_t r) { return col[r] <= n.threshold; });
        const std::size_t mid = lo + static_cast<std::size_t>(split - first);
        double acc = 0.0;
        if (mid > lo) acc += descend(tree, n.left, lo, mid, present, instance);
        if (hi > mid) acc += descend(tree, n.right, mid, hi, present, instance);
        return acc;
    }
}

}  // namespace wardwatt::explain
