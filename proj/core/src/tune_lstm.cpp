#include "wardwatt/tune_lstm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wardwatt/error.hpp"
#include "wardwatt/metrics.hpp"

namespace wardwatt::ga {

namespace {

void check_range(const GeneBounds& b, double lo, double hi, const char* name) {
    if (!(b.lo <= b.hi) || b.lo < lo || b.hi > hi) {
        throw std::invalid_argument(std::string("tune_lstm: ") + name + " range must lie within [" +
                                    std::to_string(static_cast<int>(lo)) + ", " + std::to_string(static_cast<int>(hi)) +
                                    "]");
    }
}

int round_gene(double g, double lo, double hi) {
    return static_cast<int>(std::lround(std::clamp(g, std::ceil(lo), std::floor(hi))));
}

}  // namespace

lstm::LstmHyperparams decode_genes(const std::vector<double>& genes) {
    if (genes.size() != 4) throw std::invalid_argument("decode_genes: expected 4 genes");
    lstm::LstmHyperparams hp;
    hp.units1 = round_gene(genes[0], 20, 100);
    hp.units2 = round_gene(genes[1], 20, 100);
    hp.dropout1_gene = round_gene(genes[2], 1, 5);
    hp.dropout2_gene = round_gene(genes[3], 1, 5);
    return hp;
}

LstmTuneResult tune_lstm(const LstmSearchSpace& space, const LagMatrix& train_scaled, const LagMatrix& test_scaled,
                         const ScalerParams& scaler, const LstmTuneConfig& config) {
    check_range(space.units1, 20, 100, "units1");
    check_range(space.units2, 20, 100, "units2");
    check_range(space.dropout1, 1, 5, "dropout1");
    check_range(space.dropout2, 1, 5, "dropout2");
    if (config.population_size < config.parents) {
        throw std::invalid_argument("tune_lstm: population smaller than the number of parents");
    }
    if (test_scaled.size() == 0) throw std::invalid_argument("tune_lstm: empty test set");

    const auto actual = scaler.inverse(test_scaled.targets);
    auto fitness = [&](const std::vector<double>& genes) {
        const auto hp = decode_genes(genes);
        lstm::TrainConfig tc;
        tc.epochs = config.epochs;
        tc.batch_size = config.batch_size;
        tc.learning_rate = config.learning_rate;
        tc.seed = config.seed;
        try {
            auto trained = lstm::train(lstm::init_network(hp, config.seed), train_scaled, tc).network;
            std::vector<double> pred;
            pred.reserve(test_scaled.size());
            for (const auto& row : test_scaled.rows) pred.push_back(scaler.inverse(lstm::predict_one(trained, row)));
            const double mae = score(actual, pred).mae;
            return std::isfinite(mae) ? -mae : -std::numeric_limits<double>::infinity();
        } catch (const NumericalError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    const GeneBounds bounds[] = {space.units1, space.units2, space.dropout1, space.dropout2};
    SearchConfig sc;
    sc.population_size = config.population_size;
    sc.parents = config.parents;
    sc.generations = config.generations;
    sc.sbx_eta = config.sbx_eta;
    sc.base_mutation_prob = config.base_mutation_prob;
    sc.seed = config.seed;
    const auto res = generational_search(bounds, fitness, sc);

    LstmTuneResult out;
    out.best = decode_genes(res.best_genes);
    out.best_fitness = res.best_fitness;
    for (const auto& e : res.log) out.log.push_back({e.generation, decode_genes(e.genes), e.fitness});
    return out;
}

}  // namespace wardwatt::ga
