#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wardwatt::ga {

using Rng = std::mt19937_64;

struct Individual {
    std::vector<double> genes;

    bool operator==(const Individual&) const = default;
};

using Population = std::vector<Individual>;

struct GaConfig {
    int population_size = 20;
    int generations = 100;
    int tournament_k = 3;
    double sbx_eta = 2.0;
    double base_mutation_prob = 0.2;
    // kW; unset means 5% of the mean forecast.
    std::optional<double> mutation_std;
    std::uint64_t seed = 42;
    // Optional extra cost subtracted from the fitness. Empty by default.
    std::function<double(std::span<const double>)> penalty;

    void validate() const;
};

struct BalanceResult {
    std::vector<double> best_solution;
    double best_fitness = 0.0;             // negative total absolute deviation, kW
    double initial_best_fitness = 0.0;     // best of the initial population
    std::vector<double> fitness_history;   // best fitness after each generation
    std::vector<double> mean_history;      // mean fitness after each generation
};

// -sum |solution_i - forecast_i|; 0 iff the allocation matches the forecast.
double load_balance_fitness(std::span<const double> solution, std::span<const double> forecast);

// Each gene j uniform in [0.8 f_j, 1.2 f_j].
Population init_population(std::size_t size, std::span<const double> forecast, Rng& rng);

// Best of the members at `draws` (ties keep the earliest draw).
std::size_t tournament_winner(std::span<const double> fitness, std::span<const std::size_t> draws);
// Best of k uniform draws with replacement; returns the member index.
std::size_t tournament_select(std::span<const double> fitness, int k, Rng& rng);

// Simulated binary crossover. `u` holds one uniform draw per gene.
std::pair<Individual, Individual> sbx_crossover(const Individual& p1, const Individual& p2, double eta,
                                                std::span<const double> u);
std::pair<Individual, Individual> sbx_crossover(const Individual& p1, const Individual& p2, double eta, Rng& rng);
double sbx_beta(double u, double eta);

// base_prob * (1 - generation / max_generations)
double mutation_probability(int generation, int max_generations, double base_prob);

Individual adaptive_mutate(const Individual& ind, int generation, int max_generations, double base_prob,
                           double std_dev, Rng& rng);

// Algorithm: every generation two tournament parents are crossed, both
// children mutated, and the children replace the two least fit members.
BalanceResult run_steady_state(std::span<const double> forecast, const GaConfig& config);

// Every generation the single least fit member is mutated in place.
BalanceResult run_worst_replacement(std::span<const double> forecast, const GaConfig& config);
BalanceResult run_worst_replacement(std::span<const double> forecast, const GaConfig& config,
                                    Population initial);

// "generation,best_fitness,mean_fitness"
std::string fitness_history_csv(const BalanceResult& result);
// "hour,allocated_kw,forecast_kw"
std::string allocation_csv(const BalanceResult& result, std::span<const double> forecast);

}  // namespace wardwatt::ga
