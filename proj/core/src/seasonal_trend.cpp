#include "wardwatt/seasonal_trend.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "wardwatt/error.hpp"
#include "wardwatt/metrics.hpp"
#include "wardwatt/search.hpp"

namespace wardwatt::seasonal {

namespace {

constexpr double kDayHours = 24.0;
constexpr double kWeekHours = 168.0;

}  // namespace

void StConfig::validate() const {
    if (n_changepoints < 0 || daily_order < 0 || weekly_order < 0) {
        throw std::invalid_argument("StConfig: changepoint count and Fourier orders must be >= 0");
    }
    if (!(changepoint_prior_scale > 0.0) || !(seasonality_prior_scale > 0.0)) {
        throw std::invalid_argument("StConfig: prior scales must be > 0");
    }
    if (!(changepoint_range > 0.0 && changepoint_range <= 1.0)) {
        throw std::invalid_argument("StConfig: changepoint_range must lie in (0, 1]");
    }
}

double StGeometry::model_time(Instant t) const { return hours_between(t0, t) / time_scale_hours; }

Design build_design(std::span<const Instant> timestamps, const StConfig& config) {
    config.validate();
    if (timestamps.empty()) throw std::invalid_argument("build_design: empty timestamp list");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!(timestamps[i - 1] < timestamps[i])) throw std::invalid_argument("build_design: timestamps not ordered");
    }
    StGeometry g;
    g.t0 = timestamps.front();
    const double span = hours_between(timestamps.front(), timestamps.back());
    g.time_scale_hours = span > 0.0 ? span : 1.0;
    g.daily_order = config.daily_order;
    g.weekly_order = config.weekly_order;
    if (config.n_changepoints > 0) {
        const auto n = static_cast<double>(timestamps.size());
        const double hist_last = std::max(0.0, std::floor(n * config.changepoint_range) - 1.0);
        for (int k = 1; k <= config.n_changepoints; ++k) {
            const auto idx = static_cast<std::size_t>(
                std::round(hist_last * static_cast<double>(k) / static_cast<double>(config.n_changepoints)));
            g.changepoints.push_back(g.model_time(timestamps[idx]));
        }
    }
    Design d{g, design_rows(g, timestamps)};
    return d;
}

Eigen::MatrixXd design_rows(const StGeometry& g, std::span<const Instant> timestamps) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(timestamps.size()), g.width());
    const auto n_cp = static_cast<Eigen::Index>(g.changepoints.size());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double hours = hours_between(g.t0, timestamps[static_cast<std::size_t>(r)]);
        const double t = hours / g.time_scale_hours;
        Eigen::Index c = 0;
        x(r, c++) = 1.0;
        x(r, c++) = t;
        for (Eigen::Index k = 0; k < n_cp; ++k) x(r, c++) = std::max(t - g.changepoints[static_cast<std::size_t>(k)], 0.0);
        for (int m = 1; m <= g.daily_order; ++m) {
            const double a = 2.0 * std::numbers::pi * m * hours / kDayHours;
            x(r, c++) = std::sin(a);
            x(r, c++) = std::cos(a);
        }
        for (int m = 1; m <= g.weekly_order; ++m) {
            const double a = 2.0 * std::numbers::pi * m * hours / kWeekHours;
            x(r, c++) = std::sin(a);
            x(r, c++) = std::cos(a);
        }
    }
    return x;
}

double StModel::final_slope_per_hour() const {
    double slope = base_slope;
    for (double d : deltas) slope += d;
    return slope / geometry.time_scale_hours;
}

Eigen::VectorXd StModel::coefficients() const {
    Eigen::VectorXd beta(geometry.width());
    Eigen::Index c = 0;
    beta(c++) = offset;
    beta(c++) = base_slope;
    for (double d : deltas) beta(c++) = d;
    for (double s : seasonal_coeffs) beta(c++) = s;
    return beta;
}

Components decompose(const StModel& model, std::span<const Instant> timestamps) {
    const Eigen::MatrixXd x = design_rows(model.geometry, timestamps);
    const Eigen::VectorXd beta = model.coefficients();
    const Eigen::Index trend_cols = 2 + static_cast<Eigen::Index>(model.deltas.size());
    const Eigen::Index daily_cols = 2 * model.geometry.daily_order;
    const Eigen::Index weekly_cols = 2 * model.geometry.weekly_order;

    Components out;
    const auto n = static_cast<Eigen::Index>(timestamps.size());
    out.trend.resize(timestamps.size());
    out.daily.resize(timestamps.size());
    out.weekly.resize(timestamps.size());
    out.total.resize(timestamps.size());
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto i = static_cast<std::size_t>(r);
        out.trend[i] = x.row(r).head(trend_cols).dot(beta.head(trend_cols));
        out.daily[i] = daily_cols ? x.row(r).segment(trend_cols, daily_cols).dot(beta.segment(trend_cols, daily_cols)) : 0.0;
        out.weekly[i] = weekly_cols ? x.row(r).tail(weekly_cols).dot(beta.tail(weekly_cols)) : 0.0;
        out.total[i] = out.trend[i] + out.daily[i] + out.weekly[i];
    }
    return out;
}

std::vector<double> predict(const StModel& model, std::span<const Instant> timestamps) {
    return decompose(model, timestamps).total;
}

namespace {

Eigen::VectorXd penalty_diagonal(const StConfig& config, const StGeometry& g) {
    Eigen::VectorXd pen = Eigen::VectorXd::Zero(g.width());
    const double lambda_cp = 1.0 / (config.changepoint_prior_scale * config.changepoint_prior_scale);
    const double lambda_s = 1.0 / (config.seasonality_prior_scale * config.seasonality_prior_scale);
    const auto n_cp = static_cast<Eigen::Index>(g.changepoints.size());
    pen.segment(2, n_cp).setConstant(lambda_cp);
    pen.tail(g.width() - 2 - n_cp).setConstant(lambda_s);
    return pen;
}

double response_scale(std::span<const double> y) {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m > 0.0 ? m : 1.0;
}

}  // namespace

StModel fit_st(const TimeSeries& series, const StConfig& config) {
    config.validate();
    if (series.has_missing()) throw std::invalid_argument("fit_st: series has missing values; preprocess first");
    if (static_cast<std::size_t>(config.n_changepoints) >= series.size()) {
        throw std::invalid_argument("fit_st: n_changepoints must be below the training length");
    }
    const auto width = static_cast<std::size_t>(config.design_width());
    if (series.size() < width + 10) {
        throw std::invalid_argument("fit_st: series too short (need " + std::to_string(width + 10) + " points, have " +
                                    std::to_string(series.size()) + ")");
    }
    const Design design = build_design(series.timestamps(), config);
    const Eigen::MatrixXd& x = design.matrix;
    const double y_scale = response_scale(series.values());
    Eigen::VectorXd y(static_cast<Eigen::Index>(series.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = series.values()[static_cast<std::size_t>(i)] / y_scale;

    Eigen::MatrixXd gram = x.transpose() * x;
    const double det2 = gram(0, 0) * gram(1, 1) - gram(0, 1) * gram(1, 0);
    if (!(det2 > 1e-12 * gram(0, 0) * std::max(gram(1, 1), 1e-300))) {
        throw NumericalError("fit_st: unpenalized trend block is rank deficient");
    }
    gram.diagonal() += penalty_diagonal(config, design.geometry);
    const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
    if (solver.info() != Eigen::Success || !solver.isPositive()) {
        throw NumericalError("fit_st: normal equations are not positive definite");
    }
    const Eigen::VectorXd beta = solver.solve(x.transpose() * y) * y_scale;
    if (!beta.allFinite()) throw NumericalError("fit_st: solve produced non-finite coefficients");

    StModel m;
    m.config = config;
    m.geometry = design.geometry;
    m.y_scale = y_scale;
    m.last_timestamp = series.end();
    Eigen::Index c = 0;
    m.offset = beta(c++);
    m.base_slope = beta(c++);
    for (std::size_t k = 0; k < m.geometry.changepoints.size(); ++k) m.deltas.push_back(beta(c++));
    while (c < beta.size()) m.seasonal_coeffs.push_back(beta(c++));
    return m;
}

Forecast forecast_st(const StModel& model, std::size_t horizon) {
    if (horizon < 1) throw std::invalid_argument("forecast_st: horizon must be >= 1");
    Forecast f;
    f.model = "seasonal";
    f.timestamps = future_timestamps(model.last_timestamp, horizon);
    f.values = predict(model, f.timestamps);
    return f;
}

Eigen::VectorXd penalized_gradient(const StModel& model, const TimeSeries& series) {
    const Eigen::MatrixXd x = design_rows(model.geometry, series.timestamps());
    Eigen::VectorXd y(static_cast<Eigen::Index>(series.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = series.values()[static_cast<std::size_t>(i)] / model.y_scale;
    const Eigen::VectorXd beta = model.coefficients() / model.y_scale;
    const Eigen::VectorXd pen = penalty_diagonal(model.config, model.geometry);
    return 2.0 * (x.transpose() * (x * beta - y) + pen.cwiseProduct(beta));
}

StTuneResult tune_st(const TimeSeries& series, const StSearchRanges& ranges, const StConfig& base,
                     int ga_generations, const StTuneOptions& options) {
    for (const auto* r : {&ranges.changepoint, &ranges.seasonality}) {
        if (!(r->lo > 0.0) || !(r->lo <= r->hi)) {
            throw std::invalid_argument("tune_st: prior-scale ranges must be non-empty and positive");
        }
    }
    const auto split = split_chronological(series, 1.0 - options.holdout_fraction);
    if (split.test.size() < 2) throw std::invalid_argument("tune_st: degenerate holdout");

    const ga::GeneBounds bounds[] = {{std::log10(ranges.changepoint.lo), std::log10(ranges.changepoint.hi)},
                                     {std::log10(ranges.seasonality.lo), std::log10(ranges.seasonality.hi)}};
    auto decode = [&](const std::vector<double>& genes) {
        StConfig cfg = base;
        cfg.changepoint_prior_scale = std::pow(10.0, genes[0]);
        cfg.seasonality_prior_scale = std::pow(10.0, genes[1]);
        // Keep the exact endpoints for a collapsed range.
        if (ranges.changepoint.lo == ranges.changepoint.hi) cfg.changepoint_prior_scale = ranges.changepoint.lo;
        if (ranges.seasonality.lo == ranges.seasonality.hi) cfg.seasonality_prior_scale = ranges.seasonality.lo;
        return cfg;
    };
    auto holdout_rmse = [&](const StConfig& cfg) {
        try {
            const auto model = fit_st(split.train, cfg);
            const auto pred = predict(model, split.test.timestamps());
            return score(split.test.values(), pred).rmse;
        } catch (const NumericalError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    ga::SearchConfig sc;
    sc.population_size = options.population_size;
    sc.parents = options.parents;
    sc.generations = ga_generations;
    sc.seed = options.seed;
    const std::vector<std::vector<double>> seeds = {
        {std::log10(base.changepoint_prior_scale), std::log10(base.seasonality_prior_scale)}};
    const auto res = ga::generational_search(
        bounds, [&](const std::vector<double>& genes) { return -holdout_rmse(decode(genes)); }, sc, seeds);

    StTuneResult out;
    out.config = decode(res.best_genes);
    out.holdout_rmse = -res.best_fitness;
    out.generations = res.generations_run;
    for (const auto& e : res.log) {
        const auto cfg = decode(e.genes);
        out.log.push_back({e.generation, cfg.changepoint_prior_scale, cfg.seasonality_prior_scale, -e.fitness});
    }
    return out;
}

std::string components_csv(const StModel& model, std::span<const Instant> timestamps) {
    const auto c = decompose(model, timestamps);
    std::ostringstream out;
    out << "timestamp,trend,daily,weekly,total\n";
    char buf[160];
    for (std::size_t i = 0; i < timestamps.size(); ++i) {
        std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%.17g,%.17g\n", c.trend[i], c.daily[i], c.weekly[i], c.total[i]);
        out << format_instant(timestamps[i]) << buf;
    }
    return out.str();
}

}  // namespace wardwatt::seasonal
