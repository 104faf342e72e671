#include "clv/ginelli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "clv/geometry.hpp"
#include "clv/threads.hpp"

namespace clv {

namespace {

bool is_multiple(double t, double unit) {
    double q = t / unit;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

long steps_of(double t, double unit) { return std::lround(t / unit); }

// QR with positive diagonal; returns q, fills r.
Eigen::MatrixXd positive_qr(const Eigen::MatrixXd& y, Eigen::MatrixXd& r) {
    const long d = y.rows();
    const long k = y.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (long j = 0; j < k; ++j) {
        if (r(j, j) < 0) {
            q.col(j) = -q.col(j);
            r.row(j) = -r.row(j);
        }
    }
    return q;
}

}  // namespace

void GinelliConfig::validate(const Cocycle& c) const {
    if (!(t1 > 0)) throw ConfigError("t1 must be positive");
    if (t2 < 0) throw ConfigError("t2 must be non-negative");
    if (!(ortho_interval > 0)) throw ConfigError("ortho_interval must be positive");
    if (pattern.total() != c.dim())
        throw ConfigError("pattern must sum to the cocycle dimension");
    const TimeDomain& td = c.time_domain();
    if (td.discrete()) {
        if (!is_multiple(ortho_interval, 1.0))
            throw ConfigError("ortho_interval must be an integer in discrete time");
    } else if (!is_multiple(ortho_interval, td.base_step)) {
        throw ConfigError("ortho_interval must be a multiple of base_step");
    }
    if (!is_multiple(t1, ortho_interval) || !is_multiple(t2, ortho_interval))
        throw ConfigError("ortho_interval must divide t1 and t2");
    for (double m : interval) {
        if (m < -t1 - 1e-9 || m > t2 + 1e-9)
            throw ConfigError("interval times must lie in [-t1, t2]");
        if (!is_multiple(m, ortho_interval))
            throw ConfigError("interval times must be multiples of ortho_interval");
    }
}

long GinelliConfig::steps1() const { return steps_of(t1, ortho_interval); }
long GinelliConfig::steps2() const { return steps_of(t2, ortho_interval); }

ForwardRecord forward_phase(const Cocycle& c, const State& omega0,
                            const GinelliConfig& cfg, const VectorTuple& init) {
    cfg.validate(c);
    const int d = c.dim();
    if (init.count() != d)
        throw PreconditionError("init must be a full basis of the tangent space");
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(init.matrix());
        const auto& s = svd.singularValues();
        if (!(s(d - 1) > 1e-10 * s(0)))
            throw PreconditionError("init tuple is not linearly independent");
    }
    const long n1 = cfg.steps1();
    const long n2 = cfg.steps2();
    const long n = n1 + n2;

    ForwardRecord rec;
    rec.ortho_interval = cfg.ortho_interval;
    rec.origin_index = n1;
    rec.q_frames.reserve(static_cast<size_t>(n) + 1);
    rec.r_factors.reserve(static_cast<size_t>(n));
    rec.states.reserve(static_cast<size_t>(n) + 1);
    rec.log_r_diag_sums = Eigen::MatrixXd::Zero(n + 1, d);

    State s = c.flow(-cfg.t1, omega0);
    rec.states.push_back(s);
    Eigen::MatrixXd r0;
    rec.q_frames.push_back(positive_qr(init.matrix(), r0));

    for (long k = 1; k <= n; ++k) {
        Eigen::MatrixXd m = propagate(c, cfg.ortho_interval, s);
        Eigen::MatrixXd y = m * rec.q_frames.back();
        Eigen::MatrixXd r;
        Eigen::MatrixXd q = positive_qr(y, r);
        // Collapse gate relative to the orthonormal frame (norm sqrt(d)), so
        // legitimately contracting directions pass while lost digits do not.
        double scale = rec.q_frames.back().norm();
        for (int j = 0; j < d; ++j) {
            if (!(r(j, j) > 1e-12 * scale))
                throw CollapseError("rank collapse at QR step " +
                                    std::to_string(k) + " (column " +
                                    std::to_string(j + 1) + ")");
            rec.log_r_diag_sums(k, j) =
                rec.log_r_diag_sums(k - 1, j) + std::log(r(j, j));
        }
        rec.q_frames.push_back(std::move(q));
        rec.r_factors.push_back(std::move(r));
        s = c.flow(cfg.ortho_interval, s);
        rec.states.push_back(s);
    }
    return rec;
}

namespace {

void validate_alpha(const Eigen::MatrixXd& alpha,
                    const DegeneracyPattern& pattern) {
    const int d = pattern.total();
    if (alpha.rows() != d || alpha.cols() != d)
        throw PreconditionError("alpha must be a d x d coefficient tuple");
    for (int i = 0; i < pattern.blocks(); ++i) {
        for (int j = pattern.offset(i); j < pattern.prefix(i); ++j) {
            double colnorm = alpha.col(j).norm();
            if (!(colnorm > 0))
                throw PreconditionError("alpha has a zero column");
            for (int row = pattern.prefix(i); row < d; ++row)
                if (std::abs(alpha(row, j)) > 1e-12 * colnorm)
                    throw PreconditionError(
                        "alpha block " + std::to_string(i + 1) +
                        " must be supported on the first " +
                        std::to_string(pattern.prefix(i)) + " coordinates");
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(alpha);
    const auto& s = svd.singularValues();
    if (!(s(d - 1) > 1e-10 * s(0)))
        throw PreconditionError("alpha blocks are not linearly independent");
}

std::vector<Subspace> extract_blocks(const Eigen::MatrixXd& vectors,
                                     const DegeneracyPattern& pattern) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) > 1e-10 * s(0)))
        throw TransversalityError(
            "output blocks are not jointly linearly independent");
    std::vector<Subspace> blocks;
    blocks.reserve(static_cast<size_t>(pattern.blocks()));
    for (int i = 0; i < pattern.blocks(); ++i)
        blocks.push_back(Subspace::span_of(
            vectors.middleCols(pattern.offset(i), pattern.size(i))));
    return blocks;
}

}  // namespace

BackwardResult backward_phase(const ForwardRecord& rec,
                              const Eigen::MatrixXd& alpha,
                              const GinelliConfig& cfg,
                              const BackwardObserver& observer) {
    validate_alpha(alpha, cfg.pattern);
    const long n = rec.steps();
    const long origin = rec.origin_index;

    long lowest = origin;
    std::vector<std::pair<double, long>> wanted;  // (m, frame index)
    for (double m : cfg.interval) {
        long idx = origin + steps_of(m, cfg.ortho_interval);
        if (idx < 0 || idx > n)
            throw ConfigError("interval time outside the recorded window");
        wanted.emplace_back(m, idx);
        lowest = std::min(lowest, idx);
    }

    BackwardResult result;
    result.on_interval.resize(wanted.size());

    Eigen::MatrixXd coeff = alpha;
    for (long j = 0; j < coeff.cols(); ++j) coeff.col(j).normalize();

    auto capture = [&](long k) {
        Eigen::MatrixXd vectors = rec.q_frames[static_cast<size_t>(k)] * coeff;
        if (observer) observer(k, rec.states[static_cast<size_t>(k)], vectors);
        if (k == origin) result.at_origin = extract_blocks(vectors, cfg.pattern);
        for (size_t w = 0; w < wanted.size(); ++w)
            if (wanted[w].second == k)
                result.on_interval[w] = {wanted[w].first,
                                         extract_blocks(vectors, cfg.pattern)};
    };

    capture(n);
    for (long k = n; k > lowest; --k) {
        const Eigen::MatrixXd& r = rec.r_factors[static_cast<size_t>(k - 1)];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(r);
        const auto& s = svd.singularValues();
        if (!(s(s.size() - 1) > 0) || s(0) / s(s.size() - 1) > 1e14)
            throw StabilityError(
                "triangular solve too ill-conditioned at step " +
                std::to_string(k) + "; use a smaller ortho_interval");
        coeff = r.triangularView<Eigen::Upper>().solve(coeff);
        for (long j = 0; j < coeff.cols(); ++j) coeff.col(j).normalize();
        capture(k - 1);
    }

    std::sort(result.on_interval.begin(), result.on_interval.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return result;
}

Eigen::VectorXd benettin_rates(const ForwardRecord& rec) {
    if (rec.steps() == 0) throw PreconditionError("empty forward record");
    return rec.log_r_diag_sums.row(rec.steps()) / rec.total_time();
}

LyapunovSpectrum les_from_forward(const ForwardRecord& rec,
                                  double grouping_tol) {
    Eigen::VectorXd rates = benettin_rates(rec);
    std::sort(rates.begin(), rates.end(), std::greater<double>());
    if (grouping_tol < 0) grouping_tol = 10.0 / rec.total_time();
    DegeneracyPattern pattern =
        DegeneracyPattern::from_sorted_rates(rates, grouping_tol);
    LyapunovSpectrum spec;
    spec.pattern = pattern;
    spec.exponents.resize(pattern.blocks());
    for (int i = 0; i < pattern.blocks(); ++i)
        spec.exponents(i) =
            rates.segment(pattern.offset(i), pattern.size(i)).mean();
    spec.validate();
    return spec;
}

VectorTuple random_init(int d, Rng& rng) {
    return VectorTuple(rng.uniform_ball_tuple(d, d, 1.0));
}

Eigen::MatrixXd random_alpha(const DegeneracyPattern& pattern, Rng& rng) {
    const int d = pattern.total();
    Eigen::MatrixXd alpha = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < pattern.blocks(); ++i) {
        const int k = pattern.prefix(i);
        for (int j = pattern.offset(i); j < pattern.prefix(i); ++j)
            alpha.col(j).head(k) = rng.uniform_in_ball(k, 1.0);
    }
    return alpha;
}

GinelliResult run_ginelli(const Cocycle& c, const State& omega0,
                          const GinelliConfig& cfg) {
    cfg.validate(c);
    if (!(cfg.t2 > 0)) throw ConfigError("t2 must be positive");
    const int d = c.dim();
    Rng rng(cfg.seed);
    VectorTuple init = random_init(d, rng);
    Eigen::MatrixXd alpha = random_alpha(cfg.pattern, rng);

    ForwardRecord rec = forward_phase(c, omega0, cfg, init);

    GinelliResult result;
    BackwardObserver observer;
    std::optional<OseledetsData> analytic;
    if (c.has_analytic_oseledets()) {
        analytic = c.analytic_oseledets();
        result.block_distance_series.resize(
            static_cast<size_t>(cfg.pattern.blocks()));
        result.column_distance_series.resize(static_cast<size_t>(d));
        const long n = rec.steps();
        observer = [&, n](long k, const State& s, const Eigen::MatrixXd& v) {
            double tau = static_cast<double>(n - k) * cfg.ortho_interval;
            auto spaces = analytic->spaces(s);
            Eigen::MatrixXd frame = analytic->block_frames(s);
            for (int i = 0; i < cfg.pattern.blocks(); ++i) {
                Subspace block = Subspace::span_of(
                    v.middleCols(cfg.pattern.offset(i), cfg.pattern.size(i)));
                result.block_distance_series[static_cast<size_t>(i)].push(
                    tau, distance(block, spaces[static_cast<size_t>(i)]));
            }
            for (int j = 0; j < d; ++j) {
                Subspace line = Subspace::span_of(v.col(j).normalized());
                Subspace ref = Subspace::from_orthonormal(frame.col(j));
                result.column_distance_series[static_cast<size_t>(j)].push(
                    tau, distance(line, ref));
            }
        };
    }

    BackwardResult back = backward_phase(rec, alpha, cfg, observer);
    result.subspaces_at_origin = std::move(back.at_origin);
    result.subspaces_on_interval = std::move(back.on_interval);
    result.per_column_rates = benettin_rates(rec);
    result.le_estimates = les_from_forward(rec);
    return result;
}

namespace {

// Non-owning time reversal for scoped internal use.
class ReversedView final : public Cocycle {
public:
    explicit ReversedView(const Cocycle& base) : base_(base) {}
    std::string name() const override {
        return "reversed(" + base_.name() + ")";
    }
    int dim() const override { return base_.dim(); }
    const TimeDomain& time_domain() const override {
        return base_.time_domain();
    }
    State origin() const override { return base_.origin(); }
    double snap_time(double t) const override {
        return -base_.snap_time(-t);
    }
    State flow(double t, const State& s) const override {
        return base_.flow(-t, s);
    }
    Eigen::MatrixXd step(double dt, const State& s) const override {
        return base_.step(-dt, s);
    }

private:
    const Cocycle& base_;
};

}  // namespace

std::vector<Subspace> intersection_variant(
    const Cocycle& c, const State& omega0, double t1, double t2,
    std::uint64_t seed_forward, std::uint64_t seed_backward,
    const DegeneracyPattern& pattern, double ortho_interval, double tol) {
    const int d = c.dim();
    const int p = pattern.blocks();

    GinelliConfig fwd_cfg;
    fwd_cfg.t1 = t1;
    fwd_cfg.t2 = 0;
    fwd_cfg.ortho_interval = ortho_interval;
    fwd_cfg.pattern = pattern;
    Rng rng_f(seed_forward);
    ForwardRecord rec_f =
        forward_phase(c, omega0, fwd_cfg, random_init(d, rng_f));
    const Eigen::MatrixXd& frame_f = rec_f.q_frames.back();

    GinelliConfig bwd_cfg;
    bwd_cfg.t1 = t2;
    bwd_cfg.t2 = 0;
    bwd_cfg.ortho_interval = ortho_interval;
    bwd_cfg.pattern = pattern.reversed();
    Rng rng_b(seed_backward);
    ReversedView rev(c);
    ForwardRecord rec_b =
        forward_phase(rev, omega0, bwd_cfg, random_init(d, rng_b));
    const Eigen::MatrixXd& frame_b = rec_b.q_frames.back();

    std::vector<Subspace> blocks;
    blocks.reserve(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) {
        Subspace top = Subspace::from_orthonormal(
            frame_f.leftCols(pattern.prefix(i)));
        Subspace bottom = Subspace::from_orthonormal(
            frame_b.leftCols(d - pattern.offset(i)));
        Subspace e(d);
        try {
            e = intersect_alternating(top, bottom, tol);
        } catch (const IterationLimitError& err) {
            throw TransversalityError(
                "intersection for block " + std::to_string(i + 1) +
                " did not resolve (" + err.what() + "); increase runtimes");
        }
        if (e.dim() != pattern.size(i))
            throw TransversalityError(
                "intersection for block " + std::to_string(i + 1) +
                " has dimension " + std::to_string(e.dim()) + ", expected " +
                std::to_string(pattern.size(i)) + "; increase runtimes");
        blocks.push_back(std::move(e));
    }
    return blocks;
}

ConvergenceStudy convergence_study(
    const Cocycle& c, const State& omega0, const OseledetsData& analytic,
    const std::vector<std::pair<double, double>>& grid, int trials,
    std::uint64_t seed, double ortho_interval, double epsilon) {
    if (grid.empty()) throw ConfigError("empty (t1,t2) grid");
    if (trials < 1) throw ConfigError("trials must be >= 1");
    const DegeneracyPattern& pattern = analytic.spectrum.pattern;
    const int p = pattern.blocks();
    if (epsilon <= 0) epsilon = 0.1 * analytic.spectrum.min_gap();

    auto reference = analytic.spaces(omega0);

    const int n_cells = static_cast<int>(grid.size());
    std::vector<std::vector<double>> dist(
        static_cast<size_t>(n_cells * trials));
    parallel_for(n_cells * trials, [&](int flat) {
        const int cell = flat / trials;
        const int trial = flat % trials;
        GinelliConfig cfg;
        cfg.t1 = grid[static_cast<size_t>(cell)].first;
        cfg.t2 = grid[static_cast<size_t>(cell)].second;
        cfg.ortho_interval = ortho_interval;
        cfg.pattern = pattern;
        // One tuple draw per trial, shared across the whole grid: the
        // convergence theorems quantify over fixed tuples as the runtimes
        // grow, so the per-block rate fit must see the same constants at
        // every (t1, t2).
        cfg.seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
        GinelliResult run = run_ginelli(c, omega0, cfg);
        std::vector<double> ds(static_cast<size_t>(p));
        for (int i = 0; i < p; ++i)
            ds[static_cast<size_t>(i)] = distance(
                run.subspaces_at_origin[static_cast<size_t>(i)],
                reference[static_cast<size_t>(i)]);
        dist[static_cast<size_t>(flat)] = std::move(ds);
    });

    ConvergenceStudy study;
    study.epsilon = epsilon;
    for (int i = 0; i < p; ++i)
        study.expected_rates.push_back(-analytic.spectrum.min_adjacent_gap(i));

    for (int cell = 0; cell < n_cells; ++cell) {
        StudyCell sc;
        sc.t1 = grid[static_cast<size_t>(cell)].first;
        sc.t2 = grid[static_cast<size_t>(cell)].second;
        sc.sup_distance.assign(static_cast<size_t>(p), 0.0);
        const double m = std::min(sc.t1, sc.t2);
        int ok_rate = 0, ok_dist = 0;
        for (int trial = 0; trial < trials; ++trial) {
            const auto& ds = dist[static_cast<size_t>(cell * trials + trial)];
            bool rate_ok = true, dist_ok = true;
            for (int i = 0; i < p; ++i) {
                double v = ds[static_cast<size_t>(i)];
                sc.sup_distance[static_cast<size_t>(i)] =
                    std::max(sc.sup_distance[static_cast<size_t>(i)], v);
                double bound = -analytic.spectrum.min_adjacent_gap(i) + epsilon;
                if (std::log(std::max(v, 1e-300)) / m > bound) rate_ok = false;
                if (v > epsilon) dist_ok = false;
            }
            ok_rate += rate_ok;
            ok_dist += dist_ok;
        }
        sc.fraction_rate = static_cast<double>(ok_rate) / trials;
        sc.fraction_dist = static_cast<double>(ok_dist) / trials;
        study.cells.push_back(std::move(sc));
    }

    for (int i = 0; i < p; ++i) {
        std::vector<GridSample> samples;
        bool any_usable = false;
        for (const auto& sc : study.cells) {
            double v = sc.sup_distance[static_cast<size_t>(i)];
            samples.push_back({sc.t1, sc.t2, v});
            if (v > TimeSeries::underflow_floor) any_usable = true;
        }
        if (!any_usable)
            throw SaturationError(
                "all distances for block " + std::to_string(i + 1) +
                " are at the numeric floor; use smaller runtimes");
        study.block_rates.push_back(
            extended_index_estimate(samples, 0.0, 1.0));
    }
    return study;
}

}  // namespace clv
