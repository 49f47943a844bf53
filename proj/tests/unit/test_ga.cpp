#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "wardwatt/ga.hpp"
#include "wardwatt/search.hpp"

using namespace wardwatt::ga;

TEST(Fitness, HandValues) {
    const std::vector<double> f(48, 100.0), s(48, 101.0);
    EXPECT_EQ(load_balance_fitness(f, f), 0.0);
    EXPECT_EQ(load_balance_fitness(s, f), -48.0);
}

TEST(Init, BoundsAndCollapsedInterval) {
    Rng rng(1);
    const std::vector<double> f(10, 100.0);
    for (const auto& ind : init_population(50, f, rng)) {
        for (double g : ind.genes) {
            EXPECT_GE(g, 80.0);
            EXPECT_LE(g, 120.0);
        }
    }
    const std::vector<double> zero(5, 0.0);
    for (const auto& ind : init_population(4, zero, rng)) {
        for (double g : ind.genes) EXPECT_EQ(g, 0.0);
    }
}

TEST(Tournament, ExhaustiveDrawsPickGlobalBest) {
    const std::vector<double> fit{-3, -1, -7, -2};
    const std::vector<std::size_t> all{2, 0, 3, 1};
    EXPECT_EQ(tournament_winner(fit, all), 1u);
}

TEST(Tournament, KOneIsUniform) {
    const std::vector<double> fit{-5, -1, -3, -2, -4};
    Rng rng(17);
    std::vector<int> counts(fit.size(), 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) ++counts[tournament_select(fit, 1, rng)];
    const double p = 1.0 / 5.0, sd = std::sqrt(trials * p * (1 - p));
    for (int c : counts) EXPECT_LE(std::abs(c - trials * p), 3 * sd);
}

TEST(Tournament, EqualFitnessIsUniform) {
    const std::vector<double> fit(4, -2.0);
    Rng rng(5);
    std::vector<int> counts(4, 0);
    const int trials = 10000;
    for (int i = 0; i < trials; ++i) ++counts[tournament_select(fit, 3, rng)];
    const double p = 0.25, sd = std::sqrt(trials * p * (1 - p));
    for (int c : counts) EXPECT_LE(std::abs(c - trials * p), 3 * sd);
}

TEST(Sbx, CoincidentParentsAndNeutralDraw) {
    const Individual x{{3.0, -1.0, 8.5}};
    const std::vector<double> u{0.01, 0.7, 0.99};
    const auto [a, b] = sbx_crossover(x, x, 2.0, u);
    EXPECT_EQ(a, x);
    EXPECT_EQ(b, x);
    EXPECT_EQ(sbx_beta(0.5, 2.0), 1.0);
    const Individual p{{1.0, 2.0}}, q{{5.0, -4.0}};
    const std::vector<double> half{0.5, 0.5};
    const auto [c1, c2] = sbx_crossover(p, q, 2.0, half);
    EXPECT_EQ(c1, p);
    EXPECT_EQ(c2, q);
}

TEST(Sbx, BetaMatchesClosedForm) {
    for (double u : {0.1, 0.3, 0.8, 0.95}) {
        const double expect = u <= 0.5 ? std::cbrt(2 * u) : std::cbrt(1 / (2 * (1 - u)));
        EXPECT_NEAR(sbx_beta(u, 2.0), expect, 1e-15);
    }
}

TEST(Mutation, Schedule) {
    EXPECT_DOUBLE_EQ(mutation_probability(0, 100, 0.2), 0.2);
    EXPECT_DOUBLE_EQ(mutation_probability(50, 100, 0.2), 0.1);
    EXPECT_EQ(mutation_probability(100, 100, 0.2), 0.0);
    Rng rng(3);
    const Individual x{std::vector<double>(1000, 1.0)};
    EXPECT_EQ(adaptive_mutate(x, 100, 100, 0.2, 5.0, rng), x);
    EXPECT_THROW(adaptive_mutate(x, 101, 100, 0.2, 5.0, rng), std::invalid_argument);
}

TEST(Mutation, FrequencyWithinBinomialBand) {
    Rng rng(8);
    const Individual zero{std::vector<double>(100000, 0.0)};
    const auto m = adaptive_mutate(zero, 50, 100, 0.2, 1.0, rng);
    int changed = 0;
    for (double g : m.genes) changed += g != 0.0;
    const double sd = std::sqrt(1e5 * 0.1 * 0.9);
    EXPECT_LE(std::abs(changed - 1e4), 3 * sd);
}

TEST(SteadyState, HistoryAndDeterminism) {
    const std::vector<double> f(48, 100.0);
    GaConfig cfg;
    const auto a = run_steady_state(f, cfg);
    ASSERT_EQ(a.fitness_history.size(), 100u);
    for (std::size_t g = 1; g < a.fitness_history.size(); ++g) EXPECT_GE(a.fitness_history[g], a.fitness_history[g - 1]);
    EXPECT_GT(a.best_fitness, a.initial_best_fitness);
    EXPECT_DOUBLE_EQ(a.best_fitness, load_balance_fitness(a.best_solution, f));
    const auto b = run_steady_state(f, cfg);
    EXPECT_EQ(a.best_solution, b.best_solution);
    EXPECT_EQ(a.fitness_history, b.fitness_history);
}

TEST(SteadyState, ZeroGenerations) {
    const std::vector<double> f(8, 50.0);
    GaConfig cfg;
    cfg.generations = 0;
    const auto r = run_steady_state(f, cfg);
    EXPECT_TRUE(r.fitness_history.empty());
    EXPECT_EQ(r.best_fitness, r.initial_best_fitness);
}

TEST(SteadyState, TinyGridOracle) {
    const std::vector<double> f{100.0, 60.0};
    GaConfig cfg;
    cfg.penalty = [](std::span<const double> s) { return 3.0 * std::max(0.0, s[0] - 95.0); };
    double best = -INFINITY, ba = 0, bb = 0;
    for (int i = 0; i <= 40; ++i) {
        for (int k = 0; k <= 40; ++k) {
            const std::vector<double> s{80.0 + i, 48.0 + 0.6 * k};
            const double v = load_balance_fitness(s, f) - cfg.penalty(s);
            if (v > best) best = v, ba = s[0], bb = s[1];
        }
    }
    EXPECT_EQ(ba, 95.0);
    EXPECT_DOUBLE_EQ(bb, 60.0);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        cfg.seed = seed;
        const auto r = run_steady_state(f, cfg);
        EXPECT_LE(std::abs(r.best_solution[0] - ba), 1.0);
        EXPECT_LE(std::abs(r.best_solution[1] - bb), 0.6);
    }
}

TEST(WorstReplacement, OptimumPreserved) {
    const std::vector<double> f{10, 20, 30, 40};
    Rng rng(2);
    auto pop = init_population(6, f, rng);
    pop[3].genes = f;
    const auto r = run_worst_replacement(f, GaConfig{}, pop);
    EXPECT_EQ(r.best_fitness, 0.0);
    EXPECT_EQ(r.best_solution, f);
}

TEST(WorstReplacement, NeverWorseAndDeterministic) {
    std::vector<double> f(50);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = 400 + 30 * std::sin(0.2 * static_cast<double>(i));
    const auto a = run_worst_replacement(f, GaConfig{});
    EXPECT_GE(a.best_fitness, a.initial_best_fitness);
    EXPECT_EQ(a.best_solution.size(), 50u);
    const auto b = run_worst_replacement(f, GaConfig{});
    EXPECT_EQ(a.best_solution, b.best_solution);
    EXPECT_EQ(a.mean_history, b.mean_history);
}

TEST(Config, Validation) {
    GaConfig c;
    c.population_size = 1;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.tournament_k = 21;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.base_mutation_prob = 1.5;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(GenerationalSearch, SingletonSpace) {
    const std::vector<GeneBounds> b{{3, 3}, {7, 7}};
    SearchConfig cfg;
    cfg.generations = 4;
    const auto r = generational_search(b, [](const std::vector<double>& g) { return -g[0] - g[1]; }, cfg);
    EXPECT_EQ(r.best_genes, (std::vector<double>{3, 7}));
    EXPECT_EQ(r.generations_run, 4);
}

TEST(GenerationalSearch, FindsQuadraticOptimum) {
    const std::vector<GeneBounds> b{{-5, 5}, {-5, 5}};
    const auto r = generational_search(
        b, [](const std::vector<double>& g) { return -(g[0] - 1) * (g[0] - 1) - (g[1] + 2) * (g[1] + 2); },
        SearchConfig{});
    EXPECT_NEAR(r.best_genes[0], 1.0, 0.3);
    EXPECT_NEAR(r.best_genes[1], -2.0, 0.3);
    for (const auto& e : r.log) EXPECT_LE(e.fitness, r.best_fitness);
}
