#include "clv/lyapunov_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace clv {

void TimeSeries::push(double t, double value) {
    if (!std::isfinite(t)) throw NumericError("sample time must be finite");
    if (!samples_.empty() && t <= samples_.back().t)
        throw NumericError("sample times must be strictly increasing");
    if (std::isnan(value)) throw NumericError("sample value must not be NaN");
    bool under = !(value > underflow_floor);
    samples_.push_back(
        {t, under ? std::numeric_limits<double>::min() : value, under});
}

namespace {

struct LineFit {
    double slope;
    double intercept;
    double rms;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double xm = 0, ym = 0;
    for (size_t i = 0; i < n; ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(n);
    ym /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
    }
    double slope = sxx > 0 ? sxy / sxx : 0.0;
    double intercept = ym - slope * xm;
    double ss = 0;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (intercept + slope * x[i]);
        ss += r * r;
    }
    return {slope, intercept, std::sqrt(ss / static_cast<double>(n))};
}

}  // namespace

RateEstimate lyapunov_index_estimate(const TimeSeries& series,
                                     double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw PreconditionError("tail_fraction must lie in (0,1]");
    const size_t n = series.size();
    const size_t n_tail = static_cast<size_t>(
        std::ceil(tail_fraction * static_cast<double>(n)));
    if (n_tail < 4)
        throw PreconditionError("need at least 4 samples in the tail window, got " +
                                std::to_string(n_tail));
    const size_t begin = n - n_tail;

    std::vector<double> t, logv;
    size_t underflowed = 0;
    for (size_t i = begin; i < n; ++i) {
        const auto& s = series[i];
        if (s.underflow) {
            ++underflowed;
            continue;
        }
        t.push_back(s.t);
        logv.push_back(std::log(s.value));
    }
    if (t.size() < 2)
        throw SaturationError(
            "tail of the series is saturated; shorten runtimes");

    LineFit fit = fit_line(t, logv);
    RateEstimate est;
    est.rate = fit.slope;
    est.window_start = series[begin].t;
    est.window_end = series[n - 1].t;
    est.residual = fit.rms;
    est.saturated = 2 * underflowed > n_tail;
    return est;
}

RateEstimate extended_index_estimate(const std::vector<GridSample>& grid,
                                     double threshold,
                                     double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw PreconditionError("tail_fraction must lie in (0,1]");

    // Per-m maxima; an m whose best value underflowed is dropped.
    std::map<double, double> max_by_m;
    bool saturated = false;
    for (const auto& g : grid) {
        double m = std::min(g.t1, g.t2);
        if (m < threshold) continue;
        if (!(g.value > TimeSeries::underflow_floor)) {
            saturated = true;
            continue;
        }
        auto [it, inserted] = max_by_m.try_emplace(m, g.value);
        if (!inserted) it->second = std::max(it->second, g.value);
    }
    if (max_by_m.size() < 3)
        throw CoverageError(
            "grid covers fewer than 3 distinct values of min(t1,t2) above the "
            "threshold");

    std::vector<double> ms, logs;
    for (const auto& [m, v] : max_by_m) {
        ms.push_back(m);
        logs.push_back(std::log(v));
    }
    const size_t n = ms.size();
    size_t n_tail = std::max<size_t>(
        2, static_cast<size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
    const size_t begin = n - n_tail;
    std::vector<double> tm(ms.begin() + static_cast<long>(begin), ms.end());
    std::vector<double> tl(logs.begin() + static_cast<long>(begin), logs.end());
    LineFit fit = fit_line(tm, tl);

    RateEstimate est;
    est.rate = fit.slope;
    est.window_start = tm.front();
    est.window_end = tm.back();
    est.residual = fit.rms;
    est.saturated = saturated;

    // Restriction t1 = 2*t2: its one-parameter index is bounded by the
    // extended index.
    std::vector<double> dt, dl;
    for (const auto& g : grid) {
        if (std::abs(g.t1 - 2.0 * g.t2) <= 1e-9 * std::max(1.0, std::abs(g.t1)) &&
            std::min(g.t1, g.t2) >= threshold &&
            g.value > TimeSeries::underflow_floor) {
            dt.push_back(g.t2);
            dl.push_back(std::log(g.value));
        }
    }
    if (dt.size() >= 2) est.diagonal_rate = fit_line(dt, dl).slope;
    return est;
}

}  // namespace clv
