#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "wardwatt/lstm.hpp"
#include "wardwatt/tune_lstm.hpp"

using namespace wardwatt;
using namespace wardwatt::lstm;

namespace {

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

LstmShape tiny_shape(std::size_t window = 2) {
    LstmShape s;
    s.units1 = 1;
    s.units2 = 1;
    s.dense_units = 1;
    s.window = window;
    s.dropout1 = s.dropout2 = 0.0;
    return s;
}

LagMatrix sine_task() {
    std::vector<double> v(24 * 20);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = 0.5 * std::sin(2 * M_PI * static_cast<double>(t) / 24.0) + 0.5;
    return make_lag_matrix(v, 24);
}

}  // namespace

TEST(Init, DeterministicAndBounded) {
    LstmHyperparams hp;
    EXPECT_EQ(init_network(hp, 5), init_network(hp, 5));
    const auto net = init_network(hp, 5);
    const auto& k1 = net.info(Block::Lstm1Kernel);
    EXPECT_EQ(k1.rows, 200);  // 4 gates x 50 units
    EXPECT_EQ(k1.cols, 51);   // input + recurrent
    EXPECT_EQ(net.info(Block::Lstm1Bias).rows, 200);
    EXPECT_NEAR(init_bound(51, 50), std::sqrt(6.0 / 101.0), 1e-15);
    EXPECT_NEAR(init_bound(51, 50), 0.2437, 1e-4);
    const auto& k2 = net.info(Block::Lstm2Kernel);
    const double b2 = init_bound(k2.cols, k2.rows / 4);
    EXPECT_LE(net.block(Block::Lstm1Kernel).cwiseAbs().maxCoeff(), init_bound(51, 50));
    EXPECT_LE(net.block(Block::Lstm2Kernel).cwiseAbs().maxCoeff(), b2);
}

TEST(Forward, ZeroNetworkOutputsBias) {
    LstmNetwork net(LstmShape::from(LstmHyperparams{}));
    net.block(Block::OutBias)(0, 0) = 0.37;
    std::vector<double> w(24, 0.9);
    EXPECT_EQ(predict_one(net, w), 0.37);
}

TEST(Forward, InferenceIgnoresRng) {
    const auto net = init_network(LstmHyperparams{}, 3);
    std::vector<double> w(24);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.04 * static_cast<double>(i);
    Rng a(1), b(999);
    EXPECT_EQ(forward(net, w, false, a).prediction, forward(net, w, false, b).prediction);
}

TEST(Forward, HandUnrolledSingleUnit) {
    // Gate rows (i, f, g, o); kernel column 0 multiplies x, column 1 h_prev.
    const double k1[8] = {0.5, -0.2, 0.3, 0.1, -0.4, 0.6, 0.2, 0.7}, b1[4] = {0.1, 1.0, -0.1, 0.05};
    const double k2[8] = {-0.3, 0.4, 0.8, -0.5, 0.25, 0.15, 0.6, -0.35}, b2[4] = {0.0, 0.5, 0.2, -0.2};
    LstmNetwork net(tiny_shape());
    for (int r = 0; r < 4; ++r) {
        net.block(Block::Lstm1Kernel)(r, 0) = k1[r];
        net.block(Block::Lstm1Kernel)(r, 1) = k1[4 + r];
        net.block(Block::Lstm1Bias)(r, 0) = b1[r];
        net.block(Block::Lstm2Kernel)(r, 0) = k2[r];
        net.block(Block::Lstm2Kernel)(r, 1) = k2[4 + r];
        net.block(Block::Lstm2Bias)(r, 0) = b2[r];
    }
    net.block(Block::DenseKernel)(0, 0) = 1.3;
    net.block(Block::DenseBias)(0, 0) = 0.05;
    net.block(Block::OutKernel)(0, 0) = 0.9;
    net.block(Block::OutBias)(0, 0) = -0.1;

    auto cell = [](const double k[8], const double b[4], double x, double& h, double& c) {
        const double i = sig(k[0] * x + k[4] * h + b[0]);
        const double f = sig(k[1] * x + k[5] * h + b[1]);
        const double g = std::tanh(k[2] * x + k[6] * h + b[2]);
        const double o = sig(k[3] * x + k[7] * h + b[3]);
        c = f * c + i * g;
        h = o * std::tanh(c);
    };
    const std::vector<double> window{0.8, -0.6};
    double h1 = 0, c1 = 0, h2 = 0, c2 = 0;
    for (double x : window) {
        cell(k1, b1, x, h1, c1);
        cell(k2, b2, h1, h2, c2);
    }
    const double hand = 0.9 * std::max(0.0, 1.3 * h2 + 0.05) - 0.1;
    EXPECT_NEAR(predict_one(net, window), hand, 1e-12);
}

TEST(Backward, GradientCheckTinyNetwork) {
    LstmShape s;
    s.units1 = s.units2 = 2;
    s.dropout1 = s.dropout2 = 0.0;
    const auto data = sine_task();
    EXPECT_LT(gradient_check(init_network(s, 6), data.rows[5], data.targets[5]), 1e-4);
}

TEST(Backward, ZeroResidualGivesZeroOutputBiasGradient) {
    const auto net = init_network(LstmHyperparams{}, 4);
    const auto data = sine_task();
    const double y = predict_one(net, data.rows[0]);
    const auto g = loss_gradient(net, data.rows[0], y);
    EXPECT_EQ(g.loss, 0.0);
    EXPECT_EQ(g.gradient[net.info(Block::OutBias).offset], 0.0);
}

TEST(Train, ZeroLearningRateKeepsWeights) {
    const auto net = init_network(LstmHyperparams{20, 20, 2, 2}, 1);
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.learning_rate = 0.0;
    const auto r = train(net, sine_task(), cfg);
    EXPECT_EQ(r.network.parameters(), net.parameters());
    ASSERT_EQ(r.epoch_loss.size(), 3u);
}

TEST(Train, SineTaskLearnsAndIsReproducible) {
    TrainConfig cfg;
    const auto data = sine_task();
    const auto a = train(init_network(LstmHyperparams{}, 6), data, cfg);
    EXPECT_LE(a.epoch_loss.back(), 0.1 * a.epoch_loss.front());
    const auto b = train(init_network(LstmHyperparams{}, 6), data, cfg);
    EXPECT_EQ(a.epoch_loss, b.epoch_loss);
    EXPECT_EQ(a.network, b.network);

    // Recursive 48-step roll-out tracks the true signal.
    const std::vector<double> seed(data.rows.back());
    const auto path = roll_out(a.network, seed, 48);
    double mae = 0.0;
    const std::size_t next = data.rows.size() - 1 + 24;
    for (std::size_t h = 0; h < 48; ++h) {
        const double t = static_cast<double>(next + h);
        mae += std::abs(path[h] - (0.5 * std::sin(2 * M_PI * t / 24.0) + 0.5)) / 48.0;
    }
    EXPECT_LT(mae, 0.1);
}

TEST(PredictMulti, HorizonOneIsSingleForward) {
    const auto net = init_network(LstmHyperparams{20, 20, 1, 1}, 9);
    std::vector<double> v(48);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100 + 10 * std::sin(0.3 * static_cast<double>(i));
    const auto s = TimeSeries::hourly(test::at("2021-01-01T00:00"), v);
    const auto sc = ScalerParams::fit(v);
    const auto f = predict_multi(net, s, 1, sc);
    const auto window = sc.transform(std::span<const double>(v).last(24));
    EXPECT_DOUBLE_EQ(f.values[0], sc.inverse(predict_one(net, window)));
    ASSERT_TRUE(f.scaler);
}

TEST(PredictMulti, ConstantNetworkGivesConstantForecast) {
    LstmNetwork net(LstmShape::from(LstmHyperparams{}));
    net.block(Block::OutBias)(0, 0) = 0.25;
    const auto s = TimeSeries::hourly(test::at("2021-01-01T00:00"), std::vector<double>(30, 5.0));
    const auto f = predict_multi(net, s, 10, ScalerParams{0, 8});
    for (double v : f.values) EXPECT_DOUBLE_EQ(v, 2.0);
}

TEST(Serialization, JsonRoundTrip) {
    const auto net = init_network(LstmHyperparams{21, 33, 3, 4}, 2);
    EXPECT_EQ(network_from_json(to_json(net)), net);
}

TEST(TuneLstm, DecodeAndSingletonSpace) {
    EXPECT_EQ(ga::decode_genes({49.6, 20.2, 1.4, 4.6}), (LstmHyperparams{50, 20, 1, 5}));
    ga::LstmSearchSpace space{{20, 20}, {20, 20}, {1, 1}, {3, 3}};
    ga::LstmTuneConfig cfg;
    cfg.epochs = 1;
    cfg.generations = 2;
    std::vector<double> v(24 * 8);
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = 0.5 + 0.4 * std::sin(2 * M_PI * static_cast<double>(t) / 24);
    const auto train_m = make_lag_matrix(std::span<const double>(v).first(150), 24);
    const auto test_m = make_lag_matrix(std::span<const double>(v).subspan(126), 24);
    const auto r = ga::tune_lstm(space, train_m, test_m, ScalerParams{0, 100}, cfg);
    EXPECT_EQ(r.best, (LstmHyperparams{20, 20, 1, 3}));
}
