#include "wardwatt/arima.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "wardwatt/error.hpp"
#include "wardwatt/optimize.hpp"

namespace wardwatt::arima {

void ArimaOrder::validate() const {
    if (p < 0 || d < 0 || q < 0) throw std::invalid_argument("ArimaOrder: orders must be non-negative");
    if (p + q < 1) throw std::invalid_argument("ArimaOrder: need p + q >= 1");
}

std::vector<double> difference(std::span<const double> values, int d) {
    if (d < 0) throw std::invalid_argument("difference: negative order");
    if (values.size() <= static_cast<std::size_t>(d)) {
        throw std::invalid_argument("difference: length " + std::to_string(values.size()) +
                                    " must exceed order " + std::to_string(d));
    }
    std::vector<double> w(values.begin(), values.end());
    for (int pass = 0; pass < d; ++pass) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) w[i] = w[i + 1] - w[i];
        w.pop_back();
    }
    return w;
}

std::vector<double> difference_anchors(std::span<const double> tail, int d) {
    if (tail.size() < static_cast<std::size_t>(d)) throw std::invalid_argument("difference_anchors: tail too short");
    std::vector<double> anchors;
    std::vector<double> level(tail.end() - d, tail.end());
    for (int k = 0; k < d; ++k) {
        anchors.push_back(level.back());
        for (std::size_t i = 0; i + 1 < level.size(); ++i) level[i] = level[i + 1] - level[i];
        level.pop_back();
    }
    return anchors;
}

std::vector<double> undifference(std::span<const double> diffs, std::span<const double> anchors) {
    std::vector<double> level(diffs.begin(), diffs.end());
    for (std::size_t k = anchors.size(); k-- > 0;) {
        double running = anchors[k];
        for (double& v : level) {
            running += v;
            v = running;
        }
    }
    return level;
}

bool is_stationary(std::span<const double> ar) {
    // Step-down (reverse Levinson-Durbin): every partial autocorrelation
    // must lie strictly inside (-1, 1).
    std::vector<double> a(ar.begin(), ar.end());
    for (std::size_t k = a.size(); k > 0; --k) {
        const double r = a[k - 1];
        if (!std::isfinite(r) || std::abs(r) >= 1.0) return false;
        const double denom = 1.0 - r * r;
        std::vector<double> next(k - 1);
        for (std::size_t j = 0; j + 1 < k; ++j) next[j] = (a[j] + r * a[k - 2 - j]) / denom;
        a = std::move(next);
    }
    return true;
}

bool is_invertible(std::span<const double> ma) {
    std::vector<double> neg(ma.size());
    for (std::size_t i = 0; i < ma.size(); ++i) neg[i] = -ma[i];
    return is_stationary(neg);
}

std::vector<double> css_residuals(std::span<const double> w, double intercept, std::span<const double> ar,
                                  std::span<const double> ma) {
    const std::size_t p = ar.size();
    const std::size_t q = ma.size();
    std::vector<double> e(w.size(), 0.0);
    for (std::size_t t = p; t < w.size(); ++t) {
        double pred = intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += ar[i - 1] * w[t - i];
        for (std::size_t j = 1; j <= q && j <= t; ++j) pred += ma[j - 1] * e[t - j];
        e[t] = w[t] - pred;
    }
    return e;
}

double css_objective(std::span<const double> w, double intercept, std::span<const double> ar,
                     std::span<const double> ma) {
    const auto e = css_residuals(w, intercept, ar, ma);
    double ss = 0.0;
    for (std::size_t t = ar.size(); t < e.size(); ++t) ss += e[t] * e[t];
    return ss;
}

namespace {

void refresh_state(ArimaModel& m, const TimeSeries& history) {
    const auto& x = history.values();
    const auto w = difference(x, m.order.d);
    const auto e = css_residuals(w, m.intercept, m.ar_coeffs, m.ma_coeffs);
    const auto p = static_cast<std::size_t>(m.order.p);
    const auto q = static_cast<std::size_t>(m.order.q);
    if (w.size() < p || e.size() < q) throw std::invalid_argument("ARIMA history shorter than model order");
    m.recent_differenced.assign(w.end() - static_cast<long>(p), w.end());
    m.recent_residuals.assign(e.end() - static_cast<long>(q), e.end());
    m.level_anchors = difference_anchors(x, m.order.d);
    m.last_timestamp = history.end();
}

}  // namespace

ArimaModel fit_arima(const TimeSeries& series, const ArimaOrder& order, int optimizer_budget) {
    order.validate();
    if (series.has_missing()) throw std::invalid_argument("fit_arima: series has missing values; preprocess first");
    const auto p = static_cast<std::size_t>(order.p);
    const auto q = static_cast<std::size_t>(order.q);
    const std::size_t needed = 10 * (p + q + 1);
    if (series.size() <= static_cast<std::size_t>(order.d) || series.size() - order.d < needed) {
        throw std::invalid_argument("fit_arima: series too short (need " + std::to_string(needed) +
                                    " points after differencing, have " +
                                    std::to_string(series.size() > static_cast<std::size_t>(order.d)
                                                       ? series.size() - order.d
                                                       : 0) +
                                    ")");
    }
    const auto w = difference(series.values(), order.d);

    double mean = 0.0;
    for (std::size_t t = p; t < w.size(); ++t) mean += w[t];
    mean /= static_cast<double>(w.size() - p);
    double var = 0.0;
    for (double v : w) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(w.size()));

    auto unpack = [p, q](const std::vector<double>& theta, std::vector<double>& ar, std::vector<double>& ma) {
        ar.assign(theta.begin() + 1, theta.begin() + 1 + static_cast<long>(p));
        ma.assign(theta.begin() + 1 + static_cast<long>(p), theta.begin() + 1 + static_cast<long>(p + q));
    };
    std::vector<double> ar, ma;
    auto objective = [&](const std::vector<double>& theta) {
        unpack(theta, ar, ma);
        if (!is_stationary(ar) || !is_invertible(ma)) return std::numeric_limits<double>::infinity();
        return css_objective(w, theta[0], ar, ma);
    };

    std::vector<double> start(1 + p + q, 0.0);
    start[0] = mean;
    SimplexOptions opt;
    opt.max_iterations = optimizer_budget;
    opt.initial_step.assign(1 + p + q, 0.1);
    opt.initial_step[0] = sd > 0.0 ? 0.1 * sd : 0.1;
    const auto res = nelder_mead(objective, start, opt);
    if (!std::isfinite(res.value)) {
        throw NumericalError("fit_arima: no stationary and invertible point found within budget");
    }

    ArimaModel m;
    m.order = order;
    m.intercept = res.x[0];
    unpack(res.x, m.ar_coeffs, m.ma_coeffs);
    // An exact fit would give zero variance; keep the invariant strict.
    m.residual_variance =
        std::max(res.value / static_cast<double>(w.size() - p), std::numeric_limits<double>::min());
    refresh_state(m, series);
    return m;
}

std::vector<double> forecast_differenced(const ArimaModel& m, std::size_t horizon) {
    if (horizon < 1) throw std::invalid_argument("forecast: horizon must be >= 1");
    const std::size_t p = m.ar_coeffs.size();
    const std::size_t q = m.ma_coeffs.size();
    std::vector<double> w = m.recent_differenced;
    std::vector<double> e = m.recent_residuals;
    if (w.size() != p || e.size() != q) throw std::invalid_argument("forecast: model state does not match order");
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        double pred = m.intercept;
        for (std::size_t i = 1; i <= p; ++i) pred += m.ar_coeffs[i - 1] * w[w.size() - i];
        for (std::size_t j = 1; j <= q; ++j) pred += m.ma_coeffs[j - 1] * e[e.size() - j];
        out.push_back(pred);
        if (p > 0) {
            w.erase(w.begin());
            w.push_back(pred);
        }
        if (q > 0) {
            e.erase(e.begin());
            e.push_back(0.0);
        }
    }
    return out;
}

Forecast forecast_arima(const ArimaModel& m, std::size_t horizon) {
    const auto diffs = forecast_differenced(m, horizon);
    Forecast f;
    f.model = "arima";
    f.values = undifference(diffs, m.level_anchors);
    f.timestamps = future_timestamps(m.last_timestamp, horizon);
    return f;
}

ArimaModel condition_on(const ArimaModel& model, const TimeSeries& history) {
    ArimaModel m = model;
    refresh_state(m, history);
    return m;
}

OneStepPredictions one_step_predictions(const ArimaModel& m, const TimeSeries& history) {
    const auto& x = history.values();
    const auto w = difference(x, m.order.d);
    const auto e = css_residuals(w, m.intercept, m.ar_coeffs, m.ma_coeffs);
    const auto d = static_cast<std::size_t>(m.order.d);
    const std::size_t p = m.ar_coeffs.size();
    OneStepPredictions out;
    out.first = d + p;
    // The level error equals the differenced-scale error, so x_hat = x - e.
    for (std::size_t t = p; t < w.size(); ++t) out.values.push_back(x[t + d] - e[t]);
    return out;
}

std::string to_json(const ArimaModel& m) {
    nlohmann::json j;
    j["order"] = {{"p", m.order.p}, {"d", m.order.d}, {"q", m.order.q}};
    j["ar_coeffs"] = m.ar_coeffs;
    j["ma_coeffs"] = m.ma_coeffs;
    j["intercept"] = m.intercept;
    j["residual_variance"] = m.residual_variance;
    j["last_timestamp"] = format_instant(m.last_timestamp);
    return j.dump(2);
}

}  // namespace wardwatt::arima
