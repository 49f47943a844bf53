#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wardwatt::ga {

struct GeneBounds {
    double lo = 0.0;
    double hi = 1.0;
};

// Generational search used for hyperparameter tuning: each generation keeps
// the top `parents` individuals by fitness rank and refills the population
// with SBX offspring of consecutive parent pairs, mutated on the decaying
// schedule and clamped to the bounds.
struct SearchConfig {
    int population_size = 10;
    int parents = 4;
    int generations = 50;
    double sbx_eta = 2.0;
    double base_mutation_prob = 0.2;
    // Mutation standard deviation as a fraction of each gene's range.
    double mutation_scale = 0.1;
    std::uint64_t seed = 42;

    void validate() const;
};

struct Evaluation {
    int generation = 0;  // 0-based
    std::vector<double> genes;
    double fitness = 0.0;
};

struct SearchResult {
    std::vector<double> best_genes;
    double best_fitness = 0.0;
    std::vector<Evaluation> log;  // every fitness evaluation, by generation
    int generations_run = 0;
};

using FitnessFn = std::function<double(const std::vector<double>&)>;

// `seeds` (optional) replace the first random members of the initial
// population after being clamped to the bounds. Identical gene vectors are
// scored once and re-logged from cache.
SearchResult generational_search(std::span<const GeneBounds> bounds, const FitnessFn& fitness,
                                 const SearchConfig& config, std::vector<std::vector<double>> seeds = {});

}  // namespace wardwatt::ga
