#include "wardwatt/search.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

#include "wardwatt/ga.hpp"

namespace wardwatt::ga {

void SearchConfig::validate() const {
    if (population_size < 2) throw std::invalid_argument("SearchConfig: population_size must be >= 2");
    if (parents < 1 || parents > population_size) {
        throw std::invalid_argument("SearchConfig: parents must lie in [1, population_size]");
    }
    if (generations < 1) throw std::invalid_argument("SearchConfig: generations must be >= 1");
    if (!(sbx_eta > 0.0)) throw std::invalid_argument("SearchConfig: sbx_eta must be > 0");
    if (!(base_mutation_prob >= 0.0 && base_mutation_prob <= 1.0)) {
        throw std::invalid_argument("SearchConfig: base_mutation_prob must lie in [0, 1]");
    }
}

SearchResult generational_search(std::span<const GeneBounds> bounds, const FitnessFn& fitness,
                                 const SearchConfig& cfg, std::vector<std::vector<double>> seeds) {
    cfg.validate();
    if (bounds.empty()) throw std::invalid_argument("generational_search: empty search space");
    for (const auto& b : bounds) {
        if (!(b.lo <= b.hi)) throw std::invalid_argument("generational_search: empty gene range");
    }
    const std::size_t n_genes = bounds.size();
    auto clamp = [&](std::vector<double>& genes) {
        for (std::size_t j = 0; j < n_genes; ++j) genes[j] = std::clamp(genes[j], bounds[j].lo, bounds[j].hi);
    };

    Rng rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Population pop(static_cast<std::size_t>(cfg.population_size));
    for (auto& ind : pop) {
        ind.genes.resize(n_genes);
        for (std::size_t j = 0; j < n_genes; ++j) {
            ind.genes[j] = bounds[j].lo + (bounds[j].hi - bounds[j].lo) * unit(rng);
        }
    }
    for (std::size_t i = 0; i < seeds.size() && i < pop.size(); ++i) {
        if (seeds[i].size() != n_genes) throw std::invalid_argument("generational_search: seed has wrong gene count");
        clamp(seeds[i]);
        pop[i].genes = std::move(seeds[i]);
    }

    std::map<std::vector<double>, double> cache;
    SearchResult result;
    bool have_best = false;
    const auto n_parents = static_cast<std::size_t>(cfg.parents);

    for (int g = 0; g < cfg.generations; ++g) {
        std::vector<double> scores(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) {
            auto it = cache.find(pop[i].genes);
            if (it == cache.end()) it = cache.emplace(pop[i].genes, fitness(pop[i].genes)).first;
            scores[i] = it->second;
            result.log.push_back({g, pop[i].genes, scores[i]});
            if (!have_best || scores[i] > result.best_fitness) {
                result.best_fitness = scores[i];
                result.best_genes = pop[i].genes;
                have_best = true;
            }
        }
        result.generations_run = g + 1;
        if (g + 1 == cfg.generations) break;

        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

        Population next;
        next.reserve(pop.size());
        for (std::size_t k = 0; k < n_parents; ++k) next.push_back(pop[order[k]]);
        std::size_t pair = 0;
        while (next.size() < pop.size()) {
            const auto& p1 = next[pair % n_parents];
            const auto& p2 = next[(pair + 1) % n_parents];
            auto [c1, c2] = sbx_crossover(p1, p2, cfg.sbx_eta, rng);
            for (auto* child : {&c1, &c2}) {
                if (next.size() == pop.size()) break;
                Individual mutated = *child;
                const double p_mut = mutation_probability(g, cfg.generations, cfg.base_mutation_prob);
                for (std::size_t j = 0; j < n_genes; ++j) {
                    if (unit(rng) < p_mut) {
                        mutated.genes[j] += cfg.mutation_scale * (bounds[j].hi - bounds[j].lo) * gauss(rng);
                    }
                }
                clamp(mutated.genes);
                next.push_back(std::move(mutated));
            }
            ++pair;
        }
        pop = std::move(next);
    }
    return result;
}

}  // namespace wardwatt::ga
