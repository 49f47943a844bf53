#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "wardwatt/explain/ensemble.hpp"
#include "wardwatt/explain/kernel_shap.hpp"
#include "wardwatt/explain/shap_report.hpp"
#include "wardwatt/explain/tree.hpp"

using namespace wardwatt;
using namespace wardwatt::explain;

namespace {

FeatureRows gaussian_rows(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    FeatureRows r(n, std::vector<double>(m));
    for (auto& row : r) {
        for (auto& v : row) v = g(rng);
    }
    return r;
}

double mse(const RegressionTree& t, const FeatureRows& x, std::span<const double> y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(t.predict(x[i]) - y[i], 2);
    return s / static_cast<double>(x.size());
}

// Brute-force Shapley values by the permutation-free subset formula.
std::vector<double> brute_shapley(const MaskedValue& v, std::size_t m) {
    std::vector<double> phi(m, 0.0);
    std::vector<double> fact(m + 1, 1.0);
    for (std::size_t k = 1; k <= m; ++k) fact[k] = fact[k - 1] * static_cast<double>(k);
    std::vector<char> mask(m);
    for (std::uint32_t s = 0; s < (1u << m); ++s) {
        for (std::size_t j = 0; j < m; ++j) mask[j] = (s >> j) & 1u;
        const auto size = static_cast<std::size_t>(std::popcount(s));
        const double base = v(mask);
        for (std::size_t j = 0; j < m; ++j) {
            if (mask[j]) continue;
            mask[j] = 1;
            phi[j] += fact[size] * fact[m - size - 1] / fact[m] * (v(mask) - base);
            mask[j] = 0;
        }
    }
    return phi;
}

}  // namespace

TEST(Cart, ConstantTargetIsSingleLeaf) {
    const auto x = gaussian_rows(30, 3, 1);
    const std::vector<double> y(30, 4.5);
    Rng rng(0);
    const auto t = fit_cart(x, y, {}, rng);
    EXPECT_EQ(t.depth(), 0);
    EXPECT_EQ(t.predict(x[7]), 4.5);
}

TEST(Cart, StepFunctionSplitsAtMidpoint) {
    FeatureRows x;
    std::vector<double> y;
    for (int i = 0; i <= 10; ++i) {
        x.push_back({i / 10.0});
        y.push_back(i / 10.0 > 0.5 ? 1.0 : 0.0);
    }
    Rng rng(0);
    TreeOptions opt;
    opt.max_depth = 1;
    const auto t = fit_cart(x, y, opt, rng);
    const auto& root = t.nodes()[0];
    EXPECT_GT(root.threshold, 0.5);
    EXPECT_LT(root.threshold, 0.6);
    EXPECT_EQ(mse(t, x, y), 0.0);
}

TEST(Cart, MinLeafEqualToNGivesGlobalMean) {
    const auto x = gaussian_rows(20, 2, 2);
    std::vector<double> y(20);
    std::iota(y.begin(), y.end(), 0.0);
    Rng rng(0);
    TreeOptions opt;
    opt.min_samples_leaf = 20;
    const auto t = fit_cart(x, y, opt, rng);
    EXPECT_EQ(t.depth(), 0);
    EXPECT_DOUBLE_EQ(t.predict(x[0]), 9.5);
}

TEST(Cart, RootSplitMatchesExhaustiveSearch) {
    const auto x = gaussian_rows(60, 3, 3);
    std::vector<double> y(60);
    for (std::size_t i = 0; i < 60; ++i) y[i] = std::sin(2 * x[i][1]) + 0.3 * x[i][2];
    double best_sse = INFINITY;
    int best_f = -1;
    double best_thr = 0.0;
    for (int f = 0; f < 3; ++f) {
        for (std::size_t a = 0; a < 60; ++a) {
            const double thr = x[a][f];
            double sl = 0, sr = 0, ql = 0, qr = 0, nl = 0, nr = 0;
            for (std::size_t i = 0; i < 60; ++i) {
                if (x[i][f] <= thr) sl += y[i], ql += y[i] * y[i], ++nl;
                else sr += y[i], qr += y[i] * y[i], ++nr;
            }
            if (nl == 0 || nr == 0) continue;
            const double sse = ql - sl * sl / nl + qr - sr * sr / nr;
            if (sse < best_sse - 1e-12) best_sse = sse, best_f = f, best_thr = thr;
        }
    }
    Rng rng(0);
    TreeOptions opt;
    opt.max_depth = 1;
    const auto t = fit_cart(x, y, opt, rng);
    EXPECT_EQ(t.nodes()[0].feature, best_f);
    // Same partition: the fitted midpoint separates exactly like the oracle's value.
    for (const auto& row : x) {
        EXPECT_EQ(row[best_f] <= t.nodes()[0].threshold, row[best_f] <= best_thr);
    }
}

TEST(Forest, SingleTreeWithoutBootstrapEqualsCart) {
    const auto x = gaussian_rows(80, 4, 4);
    std::vector<double> y(80);
    for (std::size_t i = 0; i < 80; ++i) y[i] = x[i][0] * x[i][1] + x[i][3];
    ForestOptions fo;
    fo.n_trees = 1;
    fo.features_per_split = 4;
    fo.bootstrap = false;
    const auto forest = fit_forest(x, y, fo);
    Rng rng(0);
    TreeOptions to;
    to.max_depth = fo.max_depth;
    const auto tree = fit_cart(x, y, to, rng);
    for (const auto& row : gaussian_rows(20, 4, 5)) EXPECT_EQ(forest.predict(row), tree.predict(row));
}

TEST(Forest, DeterministicForSeed) {
    const auto x = gaussian_rows(100, 5, 6);
    std::vector<double> y(100);
    for (std::size_t i = 0; i < 100; ++i) y[i] = x[i][2];
    ForestOptions fo;
    fo.n_trees = 20;
    const auto a = fit_forest(x, y, fo), b = fit_forest(x, y, fo);
    for (const auto& row : x) EXPECT_EQ(a.predict(row), b.predict(row));
}

TEST(Forest, LearnsSmoothFunction) {
    const auto x = gaussian_rows(2000, 3, 16);
    std::vector<double> y(2000);
    for (std::size_t i = 0; i < 2000; ++i) y[i] = std::sin(x[i][0]) + 0.5 * x[i][1] * x[i][1];
    ForestOptions fo;
    fo.max_depth = 6;
    const auto forest = fit_forest(x, y, fo);
    std::vector<double> p(2000);
    for (std::size_t i = 0; i < 2000; ++i) p[i] = forest.predict(x[i]);
    EXPECT_GE(r_squared(y, p), 0.8);
}

TEST(Boost, TrainingLossNonIncreasing) {
    const auto x = gaussian_rows(300, 3, 17);
    std::vector<double> y(300);
    for (std::size_t i = 0; i < 300; ++i) y[i] = x[i][0] * x[i][2] + x[i][1];
    BoostOptions bo;
    bo.n_rounds = 50;
    const auto m = fit_gbt(x, y, bo);
    const auto& mse_trace = m.training_mse();
    ASSERT_EQ(mse_trace.size(), 51u);
    for (std::size_t t = 1; t < mse_trace.size(); ++t) EXPECT_LE(mse_trace[t], mse_trace[t - 1] + 1e-12);
    EXPECT_LT(mse_trace[50], mse_trace[1]);
}

TEST(Boost, ZeroRoundsIsMean) {
    const auto x = gaussian_rows(10, 2, 7);
    const std::vector<double> y{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    BoostOptions bo;
    bo.n_rounds = 0;
    const auto m = fit_gbt(x, y, bo);
    EXPECT_DOUBLE_EQ(m.predict(x[3]), 5.5);
}

TEST(Boost, OneFullRoundEqualsCartOnCenteredTargets) {
    const auto x = gaussian_rows(40, 3, 8);
    std::vector<double> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = x[i][0] - 2 * x[i][2];
    BoostOptions bo;
    bo.n_rounds = 1;
    bo.learning_rate = 1.0;
    bo.max_depth = 64;
    const auto m = fit_gbt(x, y, bo);
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / 40.0;
    std::vector<double> centered(y);
    for (auto& v : centered) v -= mean;
    Rng rng(0);
    TreeOptions to;
    to.max_depth = 64;
    const auto tree = fit_cart(x, centered, to, rng);
    for (std::size_t i = 0; i < 40; ++i) {
        EXPECT_NEAR(y[i] - m.predict(x[i]), centered[i] - tree.predict(x[i]), 1e-12);
    }
}

TEST(KernelShap, LinearClosedForm) {
    const std::vector<double> beta{1.5, -2.0, 0.25, 3.0, -0.5};
    const Predictor f = [&](std::span<const double> z) {
        return std::inner_product(beta.begin(), beta.end(), z.begin(), 1.0);
    };
    const auto bg = gaussian_rows(25, 5, 9);
    const std::vector<double> x{0.3, -1.2, 2.0, 0.7, -0.1};
    const auto sv = kernel_shap(f, x, bg);
    ASSERT_TRUE(sv.exact);
    for (std::size_t j = 0; j < 5; ++j) {
        double mean = 0;
        for (const auto& r : bg) mean += r[j] / 25.0;
        EXPECT_NEAR(sv.phi[j], beta[j] * (x[j] - mean), 1e-8);
    }
}

TEST(KernelShap, ConstantModel) {
    const auto bg = gaussian_rows(10, 4, 10);
    const auto sv = kernel_shap([](std::span<const double>) { return 7.0; }, bg[0], bg);
    EXPECT_NEAR(sv.base_value, 7.0, 1e-12);
    for (double p : sv.phi) EXPECT_NEAR(p, 0.0, 1e-10);
}

TEST(KernelShap, ExactModeMatchesBruteForceShapley) {
    const std::size_t m = 6;
    const MaskedValue v = [](std::span<const char> s) {
        double a = 0;
        if (s[0] && s[1]) a += 3;
        if (s[2]) a += 1.5;
        if (s[3] || s[4]) a -= 2;
        if (s[5] && s[0] && s[4]) a += 4;
        return a;
    };
    const auto sv = kernel_shap(v, m);
    const auto oracle = brute_shapley(v, m);
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(sv.phi[j], oracle[j], 1e-9);
}

TEST(KernelShap, SampledModeIsExactForAdditiveGames) {
    const std::size_t m = 16;
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = 0.5 * static_cast<double>(j) - 3;
    const MaskedValue v = [&](std::span<const char> s) {
        double a = 1.0;
        for (std::size_t j = 0; j < m; ++j) a += s[j] ? w[j] : 0.0;
        return a;
    };
    const auto sv = kernel_shap(v, m);
    EXPECT_FALSE(sv.exact);
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(sv.phi[j], w[j], 1e-9);
}

TEST(KernelShap, SampledModeApproximatesInteractions) {
    const std::size_t m = 16;
    const MaskedValue v = [&](std::span<const char> s) {
        double a = 0.0;
        for (std::size_t j = 0; j < m; ++j) a += s[j] ? 0.1 * static_cast<double>(j) : 0.0;
        return a + (s[0] && s[1] ? 1.0 : 0.0);
    };
    const auto sv = kernel_shap(v, m);
    const double total = sv.base_value + std::accumulate(sv.phi.begin(), sv.phi.end(), 0.0);
    EXPECT_NEAR(total, sv.prediction, 1e-9);
    // The pairwise term splits evenly: phi_0 = 0.5, phi_1 = 0.1 + 0.5.
    EXPECT_NEAR(sv.phi[0], 0.5, 0.05);
    EXPECT_NEAR(sv.phi[1], 0.6, 0.05);
    EXPECT_NEAR(sv.phi[9], 0.9, 0.05);
}

TEST(KernelShap, SymmetryAndNullFeature) {
    const auto bg0 = gaussian_rows(20, 5, 14);
    FeatureRows bg = bg0;
    for (auto& r : bg) r[3] = r[1];  // feature 3 duplicates feature 1
    std::vector<double> x{0.4, 1.1, -0.3, 1.1, 2.0};
    const Predictor f = [](std::span<const double> z) { return z[0] * z[2] + std::tanh(z[1] + z[3]); };
    const auto sv = kernel_shap(f, x, bg);
    EXPECT_NEAR(sv.phi[1], sv.phi[3], 1e-6);
    EXPECT_NEAR(sv.phi[4], 0.0, 1e-6);
    EXPECT_NEAR(sv.base_value + std::accumulate(sv.phi.begin(), sv.phi.end(), 0.0), f(x), 1e-6);
}

TEST(KernelShap, EnsembleExpectationMatchesNaiveMasking) {
    const auto x = gaussian_rows(200, 5, 11);
    std::vector<double> y(200);
    for (std::size_t i = 0; i < 200; ++i) y[i] = x[i][0] * x[i][1] + std::sin(x[i][3]);
    ForestOptions fo;
    fo.n_trees = 15;
    const auto forest = fit_forest(x, y, fo);
    std::vector<const RegressionTree*> trees;
    for (const auto& t : forest.trees()) trees.push_back(&t);
    const FeatureRows bg(x.begin(), x.begin() + 30);
    TreeEnsembleExpectation fast(trees, 1.0 / 15.0, 0.0, bg);
    const auto& inst = x[150];
    const auto a = kernel_shap([&](std::span<const double> z) { return forest.predict(z); }, inst, bg);
    const auto b = kernel_shap(fast.bind(inst), 5);
    for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(a.phi[j], b.phi[j], 1e-10);
    EXPECT_NEAR(a.base_value, b.base_value, 1e-10);
}

TEST(KernelShap, WeightFormula) {
    // (M - 1) / (C(M, s) s (M - s)), M = 5, s = 2 -> 4 / (10 * 2 * 3).
    EXPECT_NEAR(shapley_kernel_weight(5, 2), 4.0 / 60.0, 1e-15);
}

// Random feature subsets (ceil(M/3) per split) make some splits use
// irrelevant lags, so the forest spreads a little mass off lag_1.
TEST(ShapReport, ForestRanksTheDrivingFeatureFirstOnIidData) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> g;
    SurrogateInput in;
    in.lags.window = 6;
    for (int i = 0; i < 600; ++i) {
        std::vector<double> row(6);
        for (auto& v : row) v = g(rng);
        in.predictions.push_back(row[5]);
        in.lags.rows.push_back(row);
        in.lags.targets.push_back(0.0);
    }
    ShapConfig cfg;
    cfg.instances = 30;
    cfg.background_rows = 30;
    const auto rep = shap_report(ModelKind::arima, in, cfg);
    EXPECT_EQ(rep.feature_names[0], "lag_1");
    EXPECT_EQ(rep.ranking[0].name, "lag_1");
    const double mass = std::accumulate(rep.mean_abs.begin(), rep.mean_abs.end(), 0.0);
    EXPECT_GE(rep.mean_abs[0] / mass, 0.8);
    EXPECT_GT(rep.surrogate_r2, 0.8);
}

TEST(ShapReport, BoostedPersistenceConcentratesOnLagOne) {
    std::mt19937_64 rng(15);
    std::normal_distribution<double> g;
    std::vector<double> walk(700);
    for (std::size_t t = 1; t < walk.size(); ++t) walk[t] = 0.9 * walk[t - 1] + g(rng);
    SurrogateInput in;
    in.lags = make_lag_matrix(walk, 24);
    for (const auto& row : in.lags.rows) in.predictions.push_back(row.back());
    ShapConfig cfg;
    cfg.instances = 25;
    cfg.background_rows = 25;
    const auto rep = shap_report(ModelKind::lstm, in, cfg);
    const double mass = std::accumulate(rep.mean_abs.begin(), rep.mean_abs.end(), 0.0);
    EXPECT_GE(rep.mean_abs[0] / mass, 0.95);
    for (std::size_t i = 0; i < rep.instance_rows.size(); ++i) {
        const auto& phi = rep.per_instance_values[i];
        EXPECT_NEAR(rep.base_value + std::accumulate(phi.begin(), phi.end(), 0.0), rep.surrogate_predictions[i], 1e-6);
    }
}

TEST(ShapReport, ConstantForecasterHasNoAttribution) {
    SurrogateInput in;
    in.lags.window = 4;
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        in.lags.rows.push_back({g(rng), g(rng), g(rng), g(rng)});
        in.lags.targets.push_back(0.0);
        in.predictions.push_back(3.0);
    }
    ShapConfig cfg;
    cfg.instances = 10;
    cfg.background_rows = 10;
    const auto rep = shap_report(ModelKind::lstm, in, cfg);
    for (double v : rep.mean_abs) EXPECT_NEAR(v, 0.0, 1e-9);
}
