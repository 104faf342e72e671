#pragma once

#include <optional>
#include <vector>

#include "clv/errors.hpp"

namespace clv {

// A sampled positive function of time. Values at or below the underflow
// floor are stored as the smallest normal double and flagged; flagged
// samples are excluded from rate fits.
class TimeSeries {
public:
    struct Sample {
        double t;
        double value;
        bool underflow;
    };

    static constexpr double underflow_floor = 1e-290;

    TimeSeries() = default;

    void push(double t, double value);
    size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    const Sample& operator[](size_t i) const { return samples_[i]; }
    const std::vector<Sample>& samples() const { return samples_; }

private:
    std::vector<Sample> samples_;
};

// Empirical Lyapunov index: least-squares slope of log f over a tail window.
struct RateEstimate {
    double rate = 0.0;             // per unit time
    double window_start = 0.0;
    double window_end = 0.0;
    double residual = 0.0;         // RMS of log-residuals over the fit window
    bool saturated = false;        // more than half the tail underflowed
    // Slope along the restriction t1 = 2*t2 when the grid provides it
    // (extended estimates only; a sanity value, see Def of the extended index).
    std::optional<double> diagonal_rate;
};

// Least-squares slope of log(value) vs t over the last tail_fraction of the
// samples, excluding underflowed points. Requires >= 4 samples in the tail
// window; throws SaturationError when fewer than two usable points remain.
RateEstimate lyapunov_index_estimate(const TimeSeries& series,
                                     double tail_fraction = 0.5);

// One grid point of a positive function of two runtimes.
struct GridSample {
    double t1;
    double t2;
    double value;
};

// Extended Lyapunov index from a (t1,t2) grid: for each m = min(t1,t2) >= threshold
// takes the max of the sampled values, then fits the slope of log(max) vs m over
// the tail. Requires >= 3 distinct values of m; throws CoverageError otherwise.
RateEstimate extended_index_estimate(const std::vector<GridSample>& grid,
                                     double threshold,
                                     double tail_fraction = 0.5);

}  // namespace clv
