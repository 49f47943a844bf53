#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wardwatt/forecast.hpp"
#include "wardwatt/series.hpp"

namespace wardwatt::lstm {

using Rng = std::mt19937_64;

inline constexpr int kDenseUnits = 25;
inline constexpr std::size_t kWindow = 24;

// Gene space searched by the tuner: units in [20, 100], dropout genes in
// [1, 5] mapping to rates gene / 10.
struct LstmHyperparams {
    int units1 = 50;
    int units2 = 50;
    int dropout1_gene = 2;
    int dropout2_gene = 2;

    double dropout1() const { return dropout1_gene / 10.0; }
    double dropout2() const { return dropout2_gene / 10.0; }
    void validate() const;

    bool operator==(const LstmHyperparams&) const = default;
};

// Architecture without the gene-space restriction (tests use tiny nets).
struct LstmShape {
    int input_size = 1;
    int units1 = 50;
    int units2 = 50;
    int dense_units = kDenseUnits;
    std::size_t window = kWindow;
    double dropout1 = 0.2;
    double dropout2 = 0.2;

    static LstmShape from(const LstmHyperparams& hp);
    bool operator==(const LstmShape&) const = default;
};

struct TrainConfig {
    int epochs = 50;
    int batch_size = 32;
    double learning_rate = 1e-3;
    std::uint64_t seed = 42;

    void validate() const;
};

// Parameter blocks, stored column-major inside one flat vector. Gate rows
// within the LSTM blocks are ordered input, forget, cell, output; LSTM
// kernels act on [x_t; h_{t-1}].
enum class Block { Lstm1Kernel, Lstm1Bias, Lstm2Kernel, Lstm2Bias, DenseKernel, DenseBias, OutKernel, OutBias };
inline constexpr int kBlockCount = 8;

struct BlockInfo {
    const char* name;
    Eigen::Index rows;
    Eigen::Index cols;
    Eigen::Index offset;
};

class LstmNetwork {
public:
    // Zero parameters.
    explicit LstmNetwork(const LstmShape& shape);

    const LstmShape& shape() const noexcept { return shape_; }
    void set_dropout(double rate1, double rate2);

    Eigen::VectorXd& parameters() noexcept { return params_; }
    const Eigen::VectorXd& parameters() const noexcept { return params_; }
    Eigen::Index parameter_count() const noexcept { return params_.size(); }

    const BlockInfo& info(Block b) const { return blocks_[static_cast<int>(b)]; }
    Eigen::Map<Eigen::MatrixXd> block(Block b);
    Eigen::Map<const Eigen::MatrixXd> block(Block b) const;

    std::uint64_t seed = 0;

    bool operator==(const LstmNetwork& other) const;

private:
    LstmShape shape_;
    std::vector<BlockInfo> blocks_;
    Eigen::VectorXd params_;
};

// Scaled-uniform initialisation with bound sqrt(6 / (fan_in + fan_out)) per
// gate; biases zero except the forget gate (1).
LstmNetwork init_network(const LstmHyperparams& hp, std::uint64_t seed);
LstmNetwork init_network(const LstmShape& shape, std::uint64_t seed);

double init_bound(Eigen::Index fan_in, Eigen::Index fan_out);

// Activations of one recurrent layer for a batch; column b is sample b.
struct LayerTrace {
    std::vector<Eigen::MatrixXd> input;  // T entries, in x B
    std::vector<Eigen::MatrixXd> gates;  // T entries, 4H x B, post-activation (i, f, g, o)
    std::vector<Eigen::MatrixXd> cell;   // T + 1 entries, cell[0] = 0
    std::vector<Eigen::MatrixXd> hidden; // T + 1 entries, hidden[0] = 0
};

struct ForwardCache {
    LayerTrace layer1;
    LayerTrace layer2;
    std::vector<Eigen::MatrixXd> mask1;  // per step, empty when not training
    Eigen::MatrixXd mask2;               // empty when not training
    Eigen::MatrixXd dense_input;         // layer-2 final hidden state after dropout
    Eigen::MatrixXd dense_pre;           // before ReLU
    Eigen::MatrixXd dense_out;
    Eigen::RowVectorXd output;
};

// `windows` is T x B (oldest value in row 0). Dropout masks are drawn from
// `rng` only when `training` is set.
ForwardCache forward_batch(const LstmNetwork& net, const Eigen::MatrixXd& windows, bool training, Rng* rng);

struct ForwardResult {
    double prediction = 0.0;
    ForwardCache cache;
};

ForwardResult forward(const LstmNetwork& net, std::span<const double> window, bool training, Rng& rng);
double predict_one(const LstmNetwork& net, std::span<const double> window);

// Gradient of loss_scale * mean_b (y_b - target_b)^2 in parameter layout.
Eigen::VectorXd backward(const LstmNetwork& net, const ForwardCache& cache, const Eigen::RowVectorXd& targets,
                         double loss_scale = 1.0);

// Loss and analytic gradient for a single sample with dropout off.
struct SampleGradient {
    double loss = 0.0;
    Eigen::VectorXd gradient;
};
SampleGradient loss_gradient(const LstmNetwork& net, std::span<const double> window, double target,
                             double loss_scale = 1.0);

struct TrainResult {
    LstmNetwork network;
    std::vector<double> epoch_loss;  // mean training-mode MSE per epoch
};

TrainResult train(LstmNetwork net, const LagMatrix& data, const TrainConfig& cfg);

// Recursive roll-out on scaled values (dropout off).
std::vector<double> roll_out(const LstmNetwork& net, std::span<const double> scaled_window, std::size_t horizon);

// Seeds with the last `window` observations of `history`, predicts in
// scaled units and returns kW.
Forecast predict_multi(const LstmNetwork& net, const TimeSeries& history, std::size_t horizon,
                       const ScalerParams& scaler);

// Max |g_analytic - g_numeric| / max(|g_analytic|, |g_numeric|, 1e-8) over
// a random subset of at least 200 parameters (all when fewer), using
// central differences with step h.
double gradient_check(const LstmNetwork& net, std::span<const double> window, double target,
                      std::uint64_t seed = 7, double h = 1e-5);

std::string to_json(const LstmNetwork& net);
LstmNetwork network_from_json(const std::string& text);
std::string loss_trace_csv(std::span<const double> epoch_loss);

}  // namespace wardwatt::lstm
