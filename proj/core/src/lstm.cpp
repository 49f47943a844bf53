#include "wardwatt/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wardwatt/error.hpp"

namespace wardwatt::lstm {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

MatrixXd sigmoid(const MatrixXd& z) { return (1.0 + (-z.array()).exp()).inverse().matrix(); }

void check_rate(double r) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("dropout rate must lie in [0, 1)");
}

// Inverted dropout mask: 0 with probability `rate`, 1 / (1 - rate) otherwise.
MatrixXd dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = keep(rng) ? scale : 0.0;
    return m;
}

void run_layer(LayerTrace& tr, const Eigen::Map<const MatrixXd>& kernel, const Eigen::Map<const MatrixXd>& bias,
               Index in, Index h, Index batch) {
    const auto steps = tr.input.size();
    tr.gates.resize(steps);
    tr.cell.assign(steps + 1, MatrixXd::Zero(h, batch));
    tr.hidden.assign(steps + 1, MatrixXd::Zero(h, batch));
    const auto wx = kernel.leftCols(in);
    const auto wh = kernel.rightCols(h);
    for (std::size_t t = 0; t < steps; ++t) {
        MatrixXd z = wx * tr.input[t] + wh * tr.hidden[t];
        z.colwise() += bias.col(0);
        MatrixXd gates(4 * h, batch);
        gates.topRows(2 * h) = sigmoid(z.topRows(2 * h));
        gates.middleRows(2 * h, h) = z.middleRows(2 * h, h).array().tanh().matrix();
        gates.bottomRows(h) = sigmoid(z.bottomRows(h));
        tr.cell[t + 1] = gates.middleRows(h, h).cwiseProduct(tr.cell[t]) +
                         gates.topRows(h).cwiseProduct(gates.middleRows(2 * h, h));
        tr.hidden[t + 1] = gates.bottomRows(h).cwiseProduct(tr.cell[t + 1].array().tanh().matrix());
        tr.gates[t] = std::move(gates);
    }
}

// Backpropagates through one layer. `d_hidden[t]` holds the loss gradient
// flowing into hidden[t + 1] from above; returns the gradient for each
// step's input.
std::vector<MatrixXd> layer_backward(const LayerTrace& tr, const Eigen::Map<const MatrixXd>& kernel,
                                     const std::vector<MatrixXd>& d_hidden, Eigen::Ref<MatrixXd> d_kernel,
                                     Eigen::Ref<MatrixXd> d_bias, Index in, Index h, bool need_input_grad) {
    const auto steps = tr.input.size();
    const Index batch = tr.input.front().cols();
    MatrixXd dh_next = MatrixXd::Zero(h, batch);
    MatrixXd dc_next = MatrixXd::Zero(h, batch);
    std::vector<MatrixXd> d_input(need_input_grad ? steps : 0);
    MatrixXd dz(4 * h, batch);
    MatrixXd concat(in + h, batch);
    for (std::size_t t = steps; t-- > 0;) {
        const MatrixXd& g = tr.gates[t];
        const auto gi = g.topRows(h).array();
        const auto gf = g.middleRows(h, h).array();
        const auto gg = g.middleRows(2 * h, h).array();
        const auto go = g.bottomRows(h).array();
        MatrixXd dh = dh_next;
        if (d_hidden[t].size() > 0) dh += d_hidden[t];
        const Eigen::ArrayXXd tanh_c = tr.cell[t + 1].array().tanh();
        const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * go * (1.0 - tanh_c.square());
        dz.topRows(h) = (dc * gg * gi * (1.0 - gi)).matrix();
        dz.middleRows(h, h) = (dc * tr.cell[t].array() * gf * (1.0 - gf)).matrix();
        dz.middleRows(2 * h, h) = (dc * gi * (1.0 - gg.square())).matrix();
        dz.bottomRows(h) = (dh.array() * tanh_c * go * (1.0 - go)).matrix();
        dc_next = (dc * gf).matrix();

        concat.topRows(in) = tr.input[t];
        concat.bottomRows(h) = tr.hidden[t];
        d_kernel.noalias() += dz * concat.transpose();
        d_bias.col(0) += dz.rowwise().sum();
        const MatrixXd d_concat = kernel.transpose() * dz;
        if (need_input_grad) d_input[t] = d_concat.topRows(in);
        dh_next = d_concat.bottomRows(h);
    }
    return d_input;
}

void check_window(const LstmNetwork& net, std::size_t len) {
    if (len != net.shape().window) {
        throw std::invalid_argument("forward: window has " + std::to_string(len) + " values, network expects " +
                                    std::to_string(net.shape().window));
    }
}

}  // namespace

void LstmHyperparams::validate() const {
    if (units1 < 20 || units1 > 100 || units2 < 20 || units2 > 100) {
        throw std::invalid_argument("LstmHyperparams: units must lie in [20, 100]");
    }
    if (dropout1_gene < 1 || dropout1_gene > 5 || dropout2_gene < 1 || dropout2_gene > 5) {
        throw std::invalid_argument("LstmHyperparams: dropout genes must lie in [1, 5]");
    }
}

LstmShape LstmShape::from(const LstmHyperparams& hp) {
    LstmShape s;
    s.units1 = hp.units1;
    s.units2 = hp.units2;
    s.dropout1 = hp.dropout1();
    s.dropout2 = hp.dropout2();
    return s;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate >= 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be >= 0");
}

LstmNetwork::LstmNetwork(const LstmShape& shape) : shape_(shape) {
    if (shape.input_size < 1 || shape.units1 < 1 || shape.units2 < 1 || shape.dense_units < 1 || shape.window < 1) {
        throw std::invalid_argument("LstmShape: all sizes must be positive");
    }
    check_rate(shape.dropout1);
    check_rate(shape.dropout2);
    const Index in = shape.input_size, h1 = shape.units1, h2 = shape.units2, d = shape.dense_units;
    const std::pair<Index, Index> dims[kBlockCount] = {{4 * h1, in + h1}, {4 * h1, 1}, {4 * h2, h1 + h2}, {4 * h2, 1},
                                                       {d, h2},           {d, 1},      {1, d},            {1, 1}};
    const char* names[kBlockCount] = {"lstm1/kernel", "lstm1/bias", "lstm2/kernel", "lstm2/bias",
                                      "dense/kernel", "dense/bias", "output/kernel", "output/bias"};
    Index offset = 0;
    for (int b = 0; b < kBlockCount; ++b) {
        blocks_.push_back({names[b], dims[b].first, dims[b].second, offset});
        offset += dims[b].first * dims[b].second;
    }
    params_ = Eigen::VectorXd::Zero(offset);
}

void LstmNetwork::set_dropout(double rate1, double rate2) {
    check_rate(rate1);
    check_rate(rate2);
    shape_.dropout1 = rate1;
    shape_.dropout2 = rate2;
}

Eigen::Map<Eigen::MatrixXd> LstmNetwork::block(Block b) {
    const auto& i = info(b);
    return {params_.data() + i.offset, i.rows, i.cols};
}

Eigen::Map<const Eigen::MatrixXd> LstmNetwork::block(Block b) const {
    const auto& i = info(b);
    return {params_.data() + i.offset, i.rows, i.cols};
}

bool LstmNetwork::operator==(const LstmNetwork& other) const {
    return shape_ == other.shape_ && seed == other.seed && params_.size() == other.params_.size() &&
           params_ == other.params_;
}

double init_bound(Index fan_in, Index fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

LstmNetwork init_network(const LstmHyperparams& hp, std::uint64_t seed) {
    hp.validate();
    return init_network(LstmShape::from(hp), seed);
}

LstmNetwork init_network(const LstmShape& shape, std::uint64_t seed) {
    LstmNetwork net(shape);
    net.seed = seed;
    Rng rng(seed);
    auto fill = [&rng](Eigen::Map<MatrixXd> m, Index row0, Index rows, double bound) {
        std::uniform_real_distribution<double> u(-bound, bound);
        for (Index c = 0; c < m.cols(); ++c)
            for (Index r = row0; r < row0 + rows; ++r) m(r, c) = u(rng);
    };
    const Index in = shape.input_size, h1 = shape.units1, h2 = shape.units2, d = shape.dense_units;
    for (int gate = 0; gate < 4; ++gate) fill(net.block(Block::Lstm1Kernel), gate * h1, h1, init_bound(in + h1, h1));
    for (int gate = 0; gate < 4; ++gate) fill(net.block(Block::Lstm2Kernel), gate * h2, h2, init_bound(h1 + h2, h2));
    fill(net.block(Block::DenseKernel), 0, d, init_bound(h2, d));
    fill(net.block(Block::OutKernel), 0, 1, init_bound(d, 1));
    net.block(Block::Lstm1Bias).middleRows(h1, h1).setOnes();
    net.block(Block::Lstm2Bias).middleRows(h2, h2).setOnes();
    return net;
}

ForwardCache forward_batch(const LstmNetwork& net, const MatrixXd& windows, bool training, Rng* rng) {
    const auto& s = net.shape();
    check_window(net, static_cast<std::size_t>(windows.rows()));
    if (!windows.allFinite()) throw std::invalid_argument("forward: non-finite input");
    if (training && rng == nullptr) throw std::invalid_argument("forward: training mode needs an rng");
    const Index batch = windows.cols();
    const Index h1 = s.units1, h2 = s.units2;
    const auto steps = static_cast<std::size_t>(windows.rows());

    ForwardCache c;
    c.layer1.input.resize(steps);
    for (std::size_t t = 0; t < steps; ++t) c.layer1.input[t] = windows.row(static_cast<Index>(t));
    run_layer(c.layer1, net.block(Block::Lstm1Kernel), net.block(Block::Lstm1Bias), s.input_size, h1, batch);

    c.layer2.input.resize(steps);
    const bool drop1 = training && s.dropout1 > 0.0;
    const bool drop2 = training && s.dropout2 > 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        if (drop1) {
            c.mask1.push_back(dropout_mask(h1, batch, s.dropout1, *rng));
            c.layer2.input[t] = c.layer1.hidden[t + 1].cwiseProduct(c.mask1.back());
        } else {
            c.layer2.input[t] = c.layer1.hidden[t + 1];
        }
    }
    run_layer(c.layer2, net.block(Block::Lstm2Kernel), net.block(Block::Lstm2Bias), h1, h2, batch);

    if (drop2) {
        c.mask2 = dropout_mask(h2, batch, s.dropout2, *rng);
        c.dense_input = c.layer2.hidden.back().cwiseProduct(c.mask2);
    } else {
        c.dense_input = c.layer2.hidden.back();
    }
    c.dense_pre = net.block(Block::DenseKernel) * c.dense_input;
    c.dense_pre.colwise() += net.block(Block::DenseBias).col(0);
    c.dense_out = c.dense_pre.cwiseMax(0.0);
    c.output = net.block(Block::OutKernel) * c.dense_out;
    c.output.array() += net.block(Block::OutBias)(0, 0);
    return c;
}

ForwardResult forward(const LstmNetwork& net, std::span<const double> window, bool training, Rng& rng) {
    const Eigen::Map<const Eigen::VectorXd> col(window.data(), static_cast<Index>(window.size()));
    ForwardResult r;
    r.cache = forward_batch(net, MatrixXd(col), training, &rng);
    r.prediction = r.cache.output(0);
    return r;
}

double predict_one(const LstmNetwork& net, std::span<const double> window) {
    const Eigen::Map<const Eigen::VectorXd> col(window.data(), static_cast<Index>(window.size()));
    return forward_batch(net, MatrixXd(col), false, nullptr).output(0);
}

Eigen::VectorXd backward(const LstmNetwork& net, const ForwardCache& c, const Eigen::RowVectorXd& targets,
                         double loss_scale) {
    const auto& s = net.shape();
    const Index batch = c.output.cols();
    if (targets.size() != batch) throw std::invalid_argument("backward: target count does not match batch");
    LstmNetwork grads(s);
    const Eigen::RowVectorXd d_out = (2.0 * loss_scale / static_cast<double>(batch)) * (c.output - targets);

    grads.block(Block::OutKernel) = d_out * c.dense_out.transpose();
    grads.block(Block::OutBias)(0, 0) = d_out.sum();
    const MatrixXd d_dense =
        (net.block(Block::OutKernel).transpose() * d_out).cwiseProduct((c.dense_pre.array() > 0.0).cast<double>().matrix());
    grads.block(Block::DenseKernel) = d_dense * c.dense_input.transpose();
    grads.block(Block::DenseBias) = d_dense.rowwise().sum();
    MatrixXd d_h2 = net.block(Block::DenseKernel).transpose() * d_dense;
    if (c.mask2.size() > 0) d_h2 = d_h2.cwiseProduct(c.mask2);

    const auto steps = c.layer2.input.size();
    std::vector<MatrixXd> d_top(steps);
    d_top.back() = d_h2;
    auto d_in2 = layer_backward(c.layer2, net.block(Block::Lstm2Kernel), d_top, grads.block(Block::Lstm2Kernel),
                                grads.block(Block::Lstm2Bias), s.units1, s.units2, true);
    for (std::size_t t = 0; t < steps; ++t) {
        if (!c.mask1.empty()) d_in2[t] = d_in2[t].cwiseProduct(c.mask1[t]);
    }
    layer_backward(c.layer1, net.block(Block::Lstm1Kernel), d_in2, grads.block(Block::Lstm1Kernel),
                   grads.block(Block::Lstm1Bias), s.input_size, s.units1, false);
    return grads.parameters();
}

SampleGradient loss_gradient(const LstmNetwork& net, std::span<const double> window, double target,
                             double loss_scale) {
    const Eigen::Map<const Eigen::VectorXd> col(window.data(), static_cast<Index>(window.size()));
    const auto cache = forward_batch(net, MatrixXd(col), false, nullptr);
    Eigen::RowVectorXd y(1);
    y(0) = target;
    SampleGradient g;
    const double e = cache.output(0) - target;
    g.loss = loss_scale * e * e;
    g.gradient = backward(net, cache, y, loss_scale);
    if (!g.gradient.allFinite()) throw NumericalError("loss_gradient: non-finite gradient");
    return g;
}

TrainResult train(LstmNetwork net, const LagMatrix& data, const TrainConfig& cfg) {
    cfg.validate();
    if (data.size() == 0) throw std::invalid_argument("train: empty data");
    if (data.size() < static_cast<std::size_t>(cfg.batch_size)) {
        throw std::invalid_argument("train: fewer rows than batch_size");
    }
    check_window(net, data.window);
    const auto n = static_cast<Index>(data.size());
    const auto steps = static_cast<Index>(data.window);
    MatrixXd inputs(steps, n);
    Eigen::RowVectorXd targets(n);
    for (Index j = 0; j < n; ++j) {
        for (Index t = 0; t < steps; ++t) inputs(t, j) = data.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
        targets(j) = data.targets[static_cast<std::size_t>(j)];
    }

    Rng order_rng(cfg.seed);
    Rng dropout_rng(cfg.seed ^ 0xd1b54a32d192ed03ULL);
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(net.parameter_count());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(net.parameter_count());
    long step = 0;

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    TrainResult result{net, {}};
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), order_rng);
        double loss_sum = 0.0;
        for (Index start = 0; start < n; start += cfg.batch_size) {
            const Index b = std::min<Index>(cfg.batch_size, n - start);
            MatrixXd xb(steps, b);
            Eigen::RowVectorXd yb(b);
            for (Index k = 0; k < b; ++k) {
                const Index src = order[static_cast<std::size_t>(start + k)];
                xb.col(k) = inputs.col(src);
                yb(k) = targets(src);
            }
            const auto cache = forward_batch(result.network, xb, true, &dropout_rng);
            loss_sum += (cache.output - yb).squaredNorm();
            const Eigen::VectorXd g = backward(result.network, cache, yb);
            ++step;
            m = beta1 * m + (1.0 - beta1) * g;
            v = beta2 * v + (1.0 - beta2) * g.array().square().matrix();
            const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            result.network.parameters().array() -=
                cfg.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
        }
        const double epoch_loss = loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss) || !result.network.parameters().allFinite()) {
            throw NumericalError("train: loss diverged at epoch " + std::to_string(epoch + 1));
        }
        result.epoch_loss.push_back(epoch_loss);
    }
    return result;
}

std::vector<double> roll_out(const LstmNetwork& net, std::span<const double> scaled_window, std::size_t horizon) {
    if (horizon < 1) throw std::invalid_argument("predict_multi: horizon must be >= 1");
    check_window(net, scaled_window.size());
    std::vector<double> window(scaled_window.begin(), scaled_window.end());
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        const double next = predict_one(net, window);
        out.push_back(next);
        window.erase(window.begin());
        window.push_back(next);
    }
    return out;
}

Forecast predict_multi(const LstmNetwork& net, const TimeSeries& history, std::size_t horizon,
                       const ScalerParams& scaler) {
    const std::size_t w = net.shape().window;
    if (history.size() < w) throw std::invalid_argument("predict_multi: history shorter than the window");
    const std::span<const double> tail(history.values().data() + history.size() - w, w);
    const auto scaled = scaler.transform(tail);
    Forecast f;
    f.model = "lstm";
    f.values = scaler.inverse(roll_out(net, scaled, horizon));
    f.timestamps = future_timestamps(history.end(), horizon);
    f.scaler = scaler;
    return f;
}

double gradient_check(const LstmNetwork& net, std::span<const double> window, double target, std::uint64_t seed,
                      double h) {
    const auto analytic = loss_gradient(net, window, target).gradient;
    const Index count = net.parameter_count();
    std::vector<Index> idx(static_cast<std::size_t>(count));
    std::iota(idx.begin(), idx.end(), 0);
    constexpr std::size_t kSubset = 200;
    if (idx.size() > kSubset) {
        Rng rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        idx.resize(kSubset);
    }
    LstmNetwork probe = net;
    probe.set_dropout(0.0, 0.0);
    auto loss_at = [&](Index k, double value) {
        const double saved = probe.parameters()(k);
        probe.parameters()(k) = value;
        const double e = predict_one(probe, window) - target;
        probe.parameters()(k) = saved;
        return e * e;
    };
    double worst = 0.0;
    for (Index k : idx) {
        const double x = probe.parameters()(k);
        const double numeric = (loss_at(k, x + h) - loss_at(k, x - h)) / (2.0 * h);
        const double a = analytic(k);
        if (!std::isfinite(numeric)) throw NumericalError("gradient_check: non-finite numeric gradient");
        const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
        worst = std::max(worst, rel);
    }
    return worst;
}

std::string to_json(const LstmNetwork& net) {
    nlohmann::json j;
    const auto& s = net.shape();
    j["format"] = "wardwatt-lstm";
    j["version"] = 1;
    j["seed"] = net.seed;
    j["shape"] = {{"input_size", s.input_size}, {"units1", s.units1},     {"units2", s.units2},
                  {"dense_units", s.dense_units}, {"window", s.window}, {"dropout1", s.dropout1},
                  {"dropout2", s.dropout2}};
    auto& layers = j["layers"] = nlohmann::json::object();
    for (int b = 0; b < kBlockCount; ++b) {
        const auto blk = static_cast<Block>(b);
        const auto m = net.block(blk);
        std::vector<double> row_major;
        row_major.reserve(static_cast<std::size_t>(m.size()));
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c) row_major.push_back(m(r, c));
        layers[net.info(blk).name] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", row_major}};
    }
    return j.dump();
}

LstmNetwork network_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("lstm weights: ") + e.what());
    }
    if (j.value("format", "") != "wardwatt-lstm" || j.value("version", 0) != 1) {
        throw Error("lstm weights: unsupported format or version");
    }
    const auto& js = j.at("shape");
    LstmShape s;
    s.input_size = js.at("input_size");
    s.units1 = js.at("units1");
    s.units2 = js.at("units2");
    s.dense_units = js.at("dense_units");
    s.window = js.at("window");
    s.dropout1 = js.at("dropout1");
    s.dropout2 = js.at("dropout2");
    LstmNetwork net(s);
    net.seed = j.value("seed", std::uint64_t{0});
    for (int b = 0; b < kBlockCount; ++b) {
        const auto blk = static_cast<Block>(b);
        const auto& layer = j.at("layers").at(net.info(blk).name);
        auto m = net.block(blk);
        const auto data = layer.at("data").get<std::vector<double>>();
        if (layer.at("rows") != m.rows() || layer.at("cols") != m.cols() || data.size() != static_cast<std::size_t>(m.size())) {
            throw Error(std::string("lstm weights: shape mismatch in ") + net.info(blk).name);
        }
        std::size_t k = 0;
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++];
    }
    return net;
}

std::string loss_trace_csv(std::span<const double> epoch_loss) {
    std::ostringstream out;
    out << "epoch,mse\n";
    char buf[64];
    for (std::size_t e = 0; e < epoch_loss.size(); ++e) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", e + 1, epoch_loss[e]);
        out << buf;
    }
    return out.str();
}

}  // namespace wardwatt::lstm
