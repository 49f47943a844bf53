#include "wardwatt/ga.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace wardwatt::ga {

void GaConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("GaConfig: population_size must be >= 2");
    if (generations < 0) throw std::invalid_argument("GaConfig: generations must be >= 0");
    if (tournament_k < 1 || tournament_k > population_size) {
        throw std::invalid_argument("GaConfig: tournament_k must lie in [1, population_size]");
    }
    if (!(sbx_eta > 0.0)) throw std::invalid_argument("GaConfig: sbx_eta must be > 0");
    if (!(base_mutation_prob >= 0.0 && base_mutation_prob <= 1.0)) {
        throw std::invalid_argument("GaConfig: base_mutation_prob must lie in [0, 1]");
    }
    if (mutation_std && !(*mutation_std >= 0.0)) throw std::invalid_argument("GaConfig: mutation_std must be >= 0");
}

double load_balance_fitness(std::span<const double> solution, std::span<const double> forecast) {
    if (solution.size() != forecast.size()) {
        throw std::invalid_argument("load_balance_fitness: length mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < solution.size(); ++i) total += std::abs(solution[i] - forecast[i]);
    return -total;
}

Population init_population(std::size_t size, std::span<const double> forecast, Rng& rng) {
    if (size < 2) throw std::invalid_argument("init_population: size must be >= 2");
    if (forecast.empty()) throw std::invalid_argument("init_population: empty forecast");
    for (double f : forecast) {
        if (!(f >= 0.0)) throw std::invalid_argument("init_population: negative forecast entry inverts the bounds");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Population pop(size);
    for (auto& ind : pop) {
        ind.genes.resize(forecast.size());
        for (std::size_t j = 0; j < forecast.size(); ++j) {
            const double lo = 0.8 * forecast[j];
            const double hi = 1.2 * forecast[j];
            ind.genes[j] = std::min(hi, lo + (hi - lo) * unit(rng));
        }
    }
    return pop;
}

std::size_t tournament_winner(std::span<const double> fitness, std::span<const std::size_t> draws) {
    if (draws.empty()) throw std::invalid_argument("tournament: no draws");
    std::size_t best = draws[0];
    for (std::size_t idx : draws) {
        if (idx >= fitness.size()) throw std::out_of_range("tournament: draw out of range");
        if (fitness[idx] > fitness[best]) best = idx;
    }
    return best;
}

std::size_t tournament_select(std::span<const double> fitness, int k, Rng& rng) {
    if (k < 1 || static_cast<std::size_t>(k) > fitness.size()) {
        throw std::invalid_argument("tournament_select: k must lie in [1, population size]");
    }
    std::uniform_int_distribution<std::size_t> pick(0, fitness.size() - 1);
    std::vector<std::size_t> draws(static_cast<std::size_t>(k));
    for (auto& d : draws) d = pick(rng);
    return tournament_winner(fitness, draws);
}

double sbx_beta(double u, double eta) {
    const double e = 1.0 / (eta + 1.0);
    return u <= 0.5 ? std::pow(2.0 * u, e) : std::pow(1.0 / (2.0 * (1.0 - u)), e);
}

std::pair<Individual, Individual> sbx_crossover(const Individual& p1, const Individual& p2, double eta,
                                                std::span<const double> u) {
    if (p1.genes.size() != p2.genes.size()) throw std::invalid_argument("sbx_crossover: length mismatch");
    if (!(eta > 0.0)) throw std::invalid_argument("sbx_crossover: eta must be > 0");
    if (u.size() != p1.genes.size()) throw std::invalid_argument("sbx_crossover: need one draw per gene");
    Individual c1 = p1, c2 = p2;
    for (std::size_t j = 0; j < p1.genes.size(); ++j) {
        const double beta = sbx_beta(u[j], eta);
        const double a = p1.genes[j];
        const double b = p2.genes[j];
        // c1 = ((1 + beta) a + (1 - beta) b) / 2, written as an offset from each
        // parent so coincident parents and beta = 1 reproduce them exactly.
        const double shift = 0.5 * (1.0 - beta) * (b - a);
        c1.genes[j] = a + shift;
        c2.genes[j] = b - shift;
    }
    return {std::move(c1), std::move(c2)};
}

std::pair<Individual, Individual> sbx_crossover(const Individual& p1, const Individual& p2, double eta, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> u(p1.genes.size());
    for (auto& x : u) x = unit(rng);
    return sbx_crossover(p1, p2, eta, u);
}

double mutation_probability(int generation, int max_generations, double base_prob) {
    if (!(base_prob >= 0.0 && base_prob <= 1.0)) {
        throw std::invalid_argument("adaptive_mutate: base probability must lie in [0, 1]");
    }
    if (max_generations < 1 || generation < 0 || generation > max_generations) {
        throw std::invalid_argument("adaptive_mutate: generation must lie in [0, max_generations]");
    }
    return base_prob * (1.0 - static_cast<double>(generation) / static_cast<double>(max_generations));
}

Individual adaptive_mutate(const Individual& ind, int generation, int max_generations, double base_prob,
                           double std_dev, Rng& rng) {
    const double p = mutation_probability(generation, max_generations, base_prob);
    if (!(std_dev >= 0.0)) throw std::invalid_argument("adaptive_mutate: std_dev must be >= 0");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    Individual out = ind;
    for (double& g : out.genes) {
        if (unit(rng) < p) g += std_dev * noise(rng);
    }
    return out;
}

namespace {

struct Scored {
    std::vector<double> fitness;
    std::size_t best = 0;
    double mean = 0.0;
};

Scored evaluate(const Population& pop, std::span<const double> forecast, const GaConfig& cfg) {
    Scored s;
    s.fitness.resize(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i) {
        double f = load_balance_fitness(pop[i].genes, forecast);
        if (cfg.penalty) f -= cfg.penalty(pop[i].genes);
        s.fitness[i] = f;
        if (f > s.fitness[s.best]) s.best = i;
        s.mean += f;
    }
    s.mean /= static_cast<double>(pop.size());
    return s;
}

// Lowest fitness, ties broken by lowest index, skipping `exclude`.
std::size_t worst_index(std::span<const double> fitness, std::size_t exclude = static_cast<std::size_t>(-1)) {
    std::size_t worst = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        if (i == exclude) continue;
        if (worst == static_cast<std::size_t>(-1) || fitness[i] < fitness[worst]) worst = i;
    }
    return worst;
}

double resolve_std(const GaConfig& cfg, std::span<const double> forecast) {
    if (cfg.mutation_std) return *cfg.mutation_std;
    const double mean = std::accumulate(forecast.begin(), forecast.end(), 0.0) / static_cast<double>(forecast.size());
    return 0.05 * std::abs(mean);
}

BalanceResult finish(const Population& pop, std::span<const double> forecast, const GaConfig& cfg,
                     BalanceResult result) {
    const auto s = evaluate(pop, forecast, cfg);
    result.best_solution = pop[s.best].genes;
    result.best_fitness = s.fitness[s.best];
    return result;
}

}  // namespace

BalanceResult run_steady_state(std::span<const double> forecast, const GaConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Population pop = init_population(static_cast<std::size_t>(cfg.population_size), forecast, rng);
    const double std_dev = resolve_std(cfg, forecast);

    BalanceResult result;
    {
        const auto s = evaluate(pop, forecast, cfg);
        result.initial_best_fitness = s.fitness[s.best];
    }
    for (int g = 0; g < cfg.generations; ++g) {
        const auto s = evaluate(pop, forecast, cfg);
        const std::size_t a = tournament_select(s.fitness, cfg.tournament_k, rng);
        const std::size_t b = tournament_select(s.fitness, cfg.tournament_k, rng);
        auto [c1, c2] = sbx_crossover(pop[a], pop[b], cfg.sbx_eta, rng);
        c1 = adaptive_mutate(c1, g, cfg.generations, cfg.base_mutation_prob, std_dev, rng);
        c2 = adaptive_mutate(c2, g, cfg.generations, cfg.base_mutation_prob, std_dev, rng);
        const std::size_t w1 = worst_index(s.fitness);
        const std::size_t w2 = worst_index(s.fitness, w1);
        pop[w1] = std::move(c1);
        pop[w2] = std::move(c2);
        const auto after = evaluate(pop, forecast, cfg);
        result.fitness_history.push_back(after.fitness[after.best]);
        result.mean_history.push_back(after.mean);
    }
    return finish(pop, forecast, cfg, std::move(result));
}

BalanceResult run_worst_replacement(std::span<const double> forecast, const GaConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Population pop = init_population(static_cast<std::size_t>(cfg.population_size), forecast, rng);
    return run_worst_replacement(forecast, cfg, std::move(pop));
}

BalanceResult run_worst_replacement(std::span<const double> forecast, const GaConfig& cfg, Population pop) {
    cfg.validate();
    if (pop.size() < 2) throw std::invalid_argument("run_worst_replacement: population must have >= 2 members");
    for (const auto& ind : pop) {
        if (ind.genes.size() != forecast.size()) throw std::invalid_argument("run_worst_replacement: gene length mismatch");
    }
    // Offset the stream so a supplied population does not replay the
    // initialisation draws.
    Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    const double std_dev = resolve_std(cfg, forecast);

    BalanceResult result;
    {
        const auto s = evaluate(pop, forecast, cfg);
        result.initial_best_fitness = s.fitness[s.best];
    }
    for (int g = 0; g < cfg.generations; ++g) {
        const auto s = evaluate(pop, forecast, cfg);
        const std::size_t w = worst_index(s.fitness);
        pop[w] = adaptive_mutate(pop[w], g, cfg.generations, cfg.base_mutation_prob, std_dev, rng);
        const auto after = evaluate(pop, forecast, cfg);
        result.fitness_history.push_back(after.fitness[after.best]);
        result.mean_history.push_back(after.mean);
    }
    return finish(pop, forecast, cfg, std::move(result));
}

std::string fitness_history_csv(const BalanceResult& r) {
    std::ostringstream out;
    out << "generation,best_fitness,mean_fitness\n";
    char buf[96];
    for (std::size_t g = 0; g < r.fitness_history.size(); ++g) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", g + 1, r.fitness_history[g], r.mean_history[g]);
        out << buf;
    }
    return out.str();
}

std::string allocation_csv(const BalanceResult& r, std::span<const double> forecast) {
    if (r.best_solution.size() != forecast.size()) throw std::invalid_argument("allocation_csv: length mismatch");
    std::ostringstream out;
    out << "hour,allocated_kw,forecast_kw\n";
    char buf[96];
    for (std::size_t h = 0; h < forecast.size(); ++h) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", h + 1, r.best_solution[h], forecast[h]);
        out << buf;
    }
    return out.str();
}

}  // namespace wardwatt::ga
