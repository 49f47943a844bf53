#pragma once

#include <cstdint>
#include <vector>

#include "wardwatt/lstm.hpp"
#include "wardwatt/search.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt::ga {

struct LstmSearchSpace {
    GeneBounds units1{20, 100};
    GeneBounds units2{20, 100};
    GeneBounds dropout1{1, 5};
    GeneBounds dropout2{1, 5};
};

struct LstmTuneConfig {
    int population_size = 5;
    int parents = 3;
    int generations = 5;
    int epochs = 5;  // per candidate
    int batch_size = 32;
    double learning_rate = 1e-3;
    double sbx_eta = 2.0;
    double base_mutation_prob = 0.2;
    std::uint64_t seed = 42;
};

struct LstmTuneEntry {
    int generation = 0;
    lstm::LstmHyperparams hyperparams;
    double fitness = 0.0;  // negative test MAE in kW
};

struct LstmTuneResult {
    lstm::LstmHyperparams best;
    double best_fitness = 0.0;
    std::vector<LstmTuneEntry> log;
};

// Rounds a gene vector (units1, units2, dropout1, dropout2) to the nearest
// valid hyperparameters.
lstm::LstmHyperparams decode_genes(const std::vector<double>& genes);

// Candidates are scored by the negative test-set MAE (original units) of a
// network trained for `epochs`; a diverging candidate scores -inf.
LstmTuneResult tune_lstm(const LstmSearchSpace& space, const LagMatrix& train_scaled, const LagMatrix& test_scaled,
                         const ScalerParams& scaler, const LstmTuneConfig& config = {});

}  // namespace wardwatt::ga
