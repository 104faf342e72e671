#include "clv/cocycle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

#include "clv/geometry.hpp"
#include "clv/rng.hpp"

namespace clv {

namespace {

constexpr double kOverflowLimit = 1e300;

double wrap_unit(double x) {
    double y = std::fmod(x, 1.0);
    return y < 0 ? y + 1.0 : y;
}

double as_phase(const State& s) {
    if (const double* p = std::get_if<double>(&s)) return *p;
    throw ConfigError("state is not a circle phase");
}

std::int64_t as_index(const State& s) {
    if (const std::int64_t* p = std::get_if<std::int64_t>(&s)) return *p;
    throw ConfigError("state is not an orbit index");
}

Eigen::Matrix2d rotation2(double revolutions) {
    // Reduce by periodicity first: R is 1-periodic and integer arguments
    // must give the identity exactly (the residues sin(2*pi*k) otherwise
    // seed spurious growing components).
    double a = 2.0 * std::numbers::pi * wrap_unit(revolutions);
    Eigen::Matrix2d r;
    r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    return r;
}

}  // namespace

// --- LyapunovSpectrum ----------------------------------------------------

double LyapunovSpectrum::gap_above(int i) const {
    if (i <= 0) return std::numeric_limits<double>::infinity();
    return exponents(i - 1) - exponents(i);
}

double LyapunovSpectrum::gap_below(int i) const {
    if (i >= blocks() - 1) return std::numeric_limits<double>::infinity();
    return exponents(i) - exponents(i + 1);
}

double LyapunovSpectrum::min_adjacent_gap(int i) const {
    return std::min(gap_above(i), gap_below(i));
}

double LyapunovSpectrum::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < blocks(); ++i) g = std::min(g, gap_below(i));
    return g;
}

Eigen::VectorXd LyapunovSpectrum::per_column() const {
    Eigen::VectorXd v(dim());
    for (int i = 0; i < blocks(); ++i)
        v.segment(pattern.offset(i), pattern.size(i)).setConstant(exponents(i));
    return v;
}

void LyapunovSpectrum::validate() const {
    if (exponents.size() != blocks())
        throw ConfigError("spectrum size does not match pattern");
    if (!exponents.allFinite()) throw NumericError("exponents must be finite");
    for (int i = 0; i + 1 < blocks(); ++i)
        if (!(exponents(i) > exponents(i + 1)))
            throw ConfigError("exponents must be strictly decreasing");
}

// --- OseledetsData -------------------------------------------------------

Subspace OseledetsData::forward_filtration(int i, const State& s) const {
    auto e = spaces(s);
    const int d = spectrum.dim();
    Eigen::MatrixXd cols(d, 0);
    for (int j = i; j < spectrum.blocks(); ++j) {
        Eigen::MatrixXd next(d, cols.cols() + e[j].dim());
        next << cols, e[j].basis();
        cols = std::move(next);
    }
    return Subspace::span_of(cols);
}

Subspace OseledetsData::backward_filtration(int i, const State& s) const {
    auto e = spaces(s);
    const int d = spectrum.dim();
    Eigen::MatrixXd cols(d, 0);
    for (int j = 0; j <= i; ++j) {
        Eigen::MatrixXd next(d, cols.cols() + e[j].dim());
        next << cols, e[j].basis();
        cols = std::move(next);
    }
    return Subspace::span_of(cols);
}

// --- Cocycle base --------------------------------------------------------

double Cocycle::snap_time(double t) const {
    if (time_domain().discrete()) {
        double r = std::round(t);
        if (std::abs(t - r) > 1e-9)
            throw ConfigError("discrete-time cocycle requires integer times");
        return r;
    }
    return t;
}

OseledetsData Cocycle::analytic_oseledets() const {
    throw UnsupportedError("cocycle '" + name() +
                           "' has no closed-form Oseledets data");
}

Eigen::VectorXd Cocycle::flow_direction(const State&) const {
    throw UnsupportedError("cocycle '" + name() + "' exposes no flow direction");
}

// --- propagate -----------------------------------------------------------

Eigen::MatrixXd propagate(const Cocycle& c, double t, const State& state) {
    if (!std::isfinite(t)) throw NumericError("time must be finite");
    const int d = c.dim();
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(d, d);
    double tt = c.snap_time(t);
    if (tt == 0.0) return m;
    const double u =
        c.time_domain().discrete() ? 1.0 : c.time_domain().base_step;
    const double dir = tt > 0 ? 1.0 : -1.0;
    const double at = std::abs(tt);
    long n = static_cast<long>(std::floor(at / u + 1e-9));
    double rem = at - static_cast<double>(n) * u;
    if (rem <= u * 1e-9) rem = 0.0;

    State s = state;
    auto fold = [&](double dt) {
        m = c.step(dir * dt, s) * m;
        if (m.cwiseAbs().maxCoeff() > kOverflowLimit)
            throw CocycleOverflowError(
                "propagator entries exceed 1e300; orthonormalize in between "
                "(use finite_time_les or a forward phase with QR steps)");
        s = c.flow(dir * dt, s);
    };
    for (long k = 0; k < n; ++k) fold(u);
    if (rem > 0) fold(rem);
    return m;
}

// --- SVD utilities -------------------------------------------------------

double SvdResult::group_min(const DegeneracyPattern& pattern, int i) const {
    return singular
        .segment(pattern.offset(i), pattern.size(i))
        .minCoeff();
}

double SvdResult::group_max(const DegeneracyPattern& pattern, int i) const {
    return singular
        .segment(pattern.offset(i), pattern.size(i))
        .maxCoeff();
}

SvdResult svd_ordered(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw NumericError("matrix has non-finite entries");
    if (a.rows() != a.cols()) throw DimensionError("square matrix required");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues()(a.rows() - 1) <= 0.0)
        throw SingularMatrixError("matrix is singular");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double wedge_norm(const Eigen::MatrixXd& a, int order) {
    if (!a.allFinite()) throw NumericError("matrix has non-finite entries");
    const int kmax = static_cast<int>(std::min(a.rows(), a.cols()));
    if (order < 1 || order > kmax)
        throw DimensionError("wedge order out of range");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    double prod = 1.0;
    for (int j = 0; j < order; ++j) prod *= svd.singularValues()(j);
    return prod;
}

// --- finite-time Lyapunov exponents --------------------------------------

namespace {

// Running matrix product with an additive log scale so entries stay bounded.
struct ScaledProduct {
    Eigen::MatrixXd p;
    double log_scale = 0.0;

    explicit ScaledProduct(int d) : p(Eigen::MatrixXd::Identity(d, d)) {}

    void fold_left(const Eigen::MatrixXd& m) {  // p <- m * p
        p = m * p;
        rescale();
    }
    void fold_right(const Eigen::MatrixXd& m) {  // p <- p * m
        p = p * m;
        rescale();
    }
    void rescale() {
        double a = p.cwiseAbs().maxCoeff();
        if (a > 1e100) {
            p /= a;
            log_scale += std::log(a);
        }
    }
};

}  // namespace

Eigen::VectorXd finite_time_les(const Cocycle& c, const State& state,
                                double t) {
    if (!(t > 0)) throw PreconditionError("t must be positive");
    const int d = c.dim();
    const double tt = c.snap_time(t);
    const double u =
        c.time_domain().discrete() ? 1.0 : c.time_domain().base_step;
    long n = static_cast<long>(std::floor(tt / u + 1e-9));
    double rem = tt - static_cast<double>(n) * u;
    if (rem <= u * 1e-9) rem = 0.0;

    std::vector<double> spans(static_cast<size_t>(n), u);
    if (rem > 0) spans.push_back(rem);

    // Forward pass: Benettin frame plus the scaled forward product.
    std::vector<State> path;
    path.reserve(spans.size() + 1);
    path.push_back(state);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd logdiag = Eigen::VectorXd::Zero(d);
    ScaledProduct fwd(d);
    State s = state;
    for (double span : spans) {
        Eigen::MatrixXd m = c.step(span, s);
        if (!m.allFinite())
            throw CocycleOverflowError("propagator overflowed; shorten steps");
        fwd.fold_left(m);
        Eigen::MatrixXd y = m * q;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
        q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
        Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < d; ++j) {
            double rjj = r(j, j);
            if (rjj < 0) {
                q.col(j) = -q.col(j);
                rjj = -rjj;
            }
            if (rjj <= 0)
                throw CocycleOverflowError("rank collapse in staged QR");
            logdiag(j) += std::log(rjj);
        }
        s = c.flow(span, s);
        path.push_back(s);
    }

    // Inverse product, traversed from the far end back to the start; its
    // large singular values recover the small ones of the forward product.
    ScaledProduct bwd(d);
    for (size_t k = 0; k < spans.size(); ++k) {
        bwd.fold_right(c.step(-spans[k], path[k + 1]));
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd_f(fwd.p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd_b(bwd.p);
    const auto& sf = svd_f.singularValues();
    const auto& sb = svd_b.singularValues();
    constexpr double trust = 1e-12;

    Eigen::VectorXd rates(d);
    for (int j = 0; j < d; ++j) {
        if (sf(j) > 0 && sf(j) >= trust * sf(0)) {
            rates(j) = (std::log(sf(j)) + fwd.log_scale) / tt;
        } else if (sb(d - 1 - j) > 0 && sb(d - 1 - j) >= trust * sb(0)) {
            rates(j) = -(std::log(sb(d - 1 - j)) + bwd.log_scale) / tt;
        } else {
            rates(j) = logdiag(j) / tt;
        }
    }
    std::sort(rates.begin(), rates.end(), std::greater<double>());
    return rates;
}

// --- diagonal cocycle ----------------------------------------------------

namespace {

class DiagonalCocycle final : public Cocycle {
public:
    DiagonalCocycle(std::vector<double> lambdas, TimeDomain td)
        : lambdas_(std::move(lambdas)), td_(td) {
        if (lambdas_.empty())
            throw ConfigError("diagonal cocycle needs at least one rate");
        for (double l : lambdas_)
            if (!std::isfinite(l)) throw NumericError("rates must be finite");
    }

    std::string name() const override { return "diagonal"; }
    int dim() const override { return static_cast<int>(lambdas_.size()); }
    const TimeDomain& time_domain() const override { return td_; }
    State origin() const override { return std::monostate{}; }

    State flow(double, const State& s) const override { return s; }

    Eigen::MatrixXd step(double dt, const State&) const override {
        Eigen::VectorXd diag(dim());
        for (int j = 0; j < dim(); ++j) diag(j) = std::exp(lambdas_[j] * dt);
        return diag.asDiagonal();
    }

    bool has_analytic_oseledets() const override { return true; }

    OseledetsData analytic_oseledets() const override {
        const int d = dim();
        // Sort axes by rate, descending; equal rates share a block.
        std::vector<int> order(static_cast<size_t>(d));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return lambdas_[static_cast<size_t>(a)] >
                   lambdas_[static_cast<size_t>(b)];
        });
        std::vector<std::vector<int>> groups;
        std::vector<double> rates;
        for (int axis : order) {
            double l = lambdas_[static_cast<size_t>(axis)];
            if (rates.empty() || rates.back() != l) {
                rates.push_back(l);
                groups.emplace_back();
            }
            groups.back().push_back(axis);
        }
        std::vector<int> sizes;
        for (const auto& g : groups) sizes.push_back(static_cast<int>(g.size()));

        OseledetsData data;
        data.spectrum.exponents =
            Eigen::Map<const Eigen::VectorXd>(rates.data(),
                                              static_cast<long>(rates.size()));
        data.spectrum.pattern = DegeneracyPattern(sizes);
        data.spectrum.validate();
        data.spaces = [groups, d](const State&) {
            std::vector<Subspace> e;
            for (const auto& g : groups) {
                Eigen::MatrixXd b = Eigen::MatrixXd::Zero(
                    d, static_cast<long>(g.size()));
                for (size_t j = 0; j < g.size(); ++j)
                    b(g[j], static_cast<long>(j)) = 1.0;
                e.push_back(Subspace::from_orthonormal(std::move(b)));
            }
            return e;
        };
        data.block_frames = [groups, d](const State&) {
            Eigen::MatrixXd f = Eigen::MatrixXd::Zero(d, d);
            int col = 0;
            for (const auto& g : groups)
                for (int axis : g) f(axis, col++) = 1.0;
            return f;
        };
        return data;
    }

private:
    std::vector<double> lambdas_;
    TimeDomain td_;
};

// --- rotating cocycle ----------------------------------------------------

class RotatingCocycle final : public Cocycle {
public:
    RotatingCocycle(double l1, double l2, TimeDomain td)
        : l1_(l1), l2_(l2), td_(td) {
        if (!(l1 > l2))
            throw ConfigError("rotating cocycle requires lambda1 > lambda2");
    }

    std::string name() const override { return "rotating"; }
    int dim() const override { return 2; }
    const TimeDomain& time_domain() const override { return td_; }
    State origin() const override { return 0.0; }

    State flow(double t, const State& s) const override {
        return wrap_unit(as_phase(s) + t);
    }

    Eigen::MatrixXd step(double dt, const State& s) const override {
        double w = as_phase(s);
        Eigen::Vector2d diag(std::exp(l1_ * dt), std::exp(l2_ * dt));
        return rotation2(w + dt) * diag.asDiagonal() * rotation2(-w);
    }

    bool has_analytic_oseledets() const override { return true; }

    OseledetsData analytic_oseledets() const override {
        OseledetsData data;
        data.spectrum.exponents = Eigen::Vector2d(l1_, l2_);
        data.spectrum.pattern = DegeneracyPattern({1, 1});
        data.spaces = [](const State& s) {
            Eigen::Matrix2d r = rotation2(as_phase(s));
            return std::vector<Subspace>{
                Subspace::from_orthonormal(r.col(0)),
                Subspace::from_orthonormal(r.col(1))};
        };
        data.block_frames = [](const State& s) -> Eigen::MatrixXd {
            return rotation2(as_phase(s));
        };
        return data;
    }

private:
    double l1_, l2_;
    TimeDomain td_;
};

// --- degenerate rotating cocycle ------------------------------------------

class DegenerateRotatingCocycle final : public Cocycle {
public:
    DegenerateRotatingCocycle(double l1, double l2, double rot_speed,
                              TimeDomain td)
        : l1_(l1), l2_(l2), rot_(rot_speed), td_(td) {
        if (!(l1 > l2))
            throw ConfigError(
                "degenerate rotating cocycle requires lambda1 > lambda2");
    }

    std::string name() const override { return "degenerate_rotating"; }
    int dim() const override { return 4; }
    const TimeDomain& time_domain() const override { return td_; }
    State origin() const override { return 0.0; }

    State flow(double t, const State& s) const override {
        return wrap_unit(as_phase(s) + t);
    }

    // Both blocks carry the same inner rotation; the propagator does not
    // depend on the base point, which makes the cocycle identity exact.
    Eigen::MatrixXd step(double dt, const State&) const override {
        Eigen::Matrix2d r = rotation2(rot_ * dt);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
        m.topLeftCorner(2, 2) = std::exp(l1_ * dt) * r;
        m.bottomRightCorner(2, 2) = std::exp(l2_ * dt) * r;
        return m;
    }

    bool has_analytic_oseledets() const override { return true; }

    OseledetsData analytic_oseledets() const override {
        OseledetsData data;
        data.spectrum.exponents = Eigen::Vector2d(l1_, l2_);
        data.spectrum.pattern = DegeneracyPattern({2, 2});
        data.spaces = [](const State&) {
            return std::vector<Subspace>{Subspace::standard(4, {0, 1}),
                                         Subspace::standard(4, {2, 3})};
        };
        data.block_frames = [](const State&) -> Eigen::MatrixXd {
            return Eigen::MatrixXd::Identity(4, 4);
        };
        return data;
    }

private:
    double l1_, l2_, rot_;
    TimeDomain td_;
};

// --- Lorenz-63 tangent cocycle ---------------------------------------------

class Lorenz63Cocycle final : public Cocycle {
public:
    Lorenz63Cocycle(double sigma, double rho, double beta, double h,
                    double transient)
        : sigma_(sigma), rho_(rho), beta_(beta), h_(h),
          td_(TimeDomain::continuous_time(h)) {
        if (!(h > 0)) throw ConfigError("step must be positive");
        Eigen::Vector3d x(1.0, 1.0, 1.0);
        long n = std::lround(transient / h);
        for (long k = 0; k < n; ++k) rk4_state(x, h);
        cache_[0] = x;
    }

    std::string name() const override { return "lorenz63"; }
    int dim() const override { return 3; }
    const TimeDomain& time_domain() const override { return td_; }
    State origin() const override { return std::int64_t{0}; }

    double snap_time(double t) const override {
        return static_cast<double>(std::llround(t / h_)) * h_;
    }

    State flow(double t, const State& s) const override {
        return as_index(s) + std::llround(t / h_);
    }

    Eigen::MatrixXd step(double dt, const State& s) const override {
        long n = std::llround(dt / h_);
        Eigen::Vector3d x = resolve(as_index(s));
        Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
        double hstep = n >= 0 ? h_ : -h_;
        for (long k = 0; k < std::labs(n); ++k) rk4_joint(x, m, hstep);
        return m;
    }

    Eigen::Vector3d orbit_point(const State& s) const {
        return resolve(as_index(s));
    }

    Eigen::VectorXd flow_direction(const State& s) const override {
        return vector_field(resolve(as_index(s)));
    }

    Eigen::Vector3d vector_field(const Eigen::Vector3d& x) const {
        return {sigma_ * (x(1) - x(0)), x(0) * (rho_ - x(2)) - x(1),
                x(0) * x(1) - beta_ * x(2)};
    }

private:
    Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const {
        Eigen::Matrix3d j;
        j << -sigma_, sigma_, 0.0,
             rho_ - x(2), -1.0, -x(0),
             x(1), x(0), -beta_;
        return j;
    }

    void rk4_state(Eigen::Vector3d& x, double h) const {
        Eigen::Vector3d k1 = vector_field(x);
        Eigen::Vector3d k2 = vector_field(x + 0.5 * h * k1);
        Eigen::Vector3d k3 = vector_field(x + 0.5 * h * k2);
        Eigen::Vector3d k4 = vector_field(x + h * k3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }

    // Joint RK4 on state and fundamental matrix; the matrix update is linear
    // in m at each stage, so products of step propagators compose exactly.
    void rk4_joint(Eigen::Vector3d& x, Eigen::Matrix3d& m, double h) const {
        Eigen::Vector3d k1 = vector_field(x);
        Eigen::Matrix3d m1 = jacobian(x) * m;
        Eigen::Vector3d x2 = x + 0.5 * h * k1;
        Eigen::Vector3d k2 = vector_field(x2);
        Eigen::Matrix3d m2 = jacobian(x2) * (m + 0.5 * h * m1);
        Eigen::Vector3d x3 = x + 0.5 * h * k2;
        Eigen::Vector3d k3 = vector_field(x3);
        Eigen::Matrix3d m3 = jacobian(x3) * (m + 0.5 * h * m2);
        Eigen::Vector3d x4 = x + h * k3;
        Eigen::Vector3d k4 = vector_field(x4);
        Eigen::Matrix3d m4 = jacobian(x4) * (m + h * m3);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        m += (h / 6.0) * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }

    Eigen::Vector3d resolve(std::int64_t idx) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(idx);
        if (it != cache_.end()) return it->second;

        // Nearest cached index on the anchor side of idx.
        auto ub = cache_.upper_bound(idx);
        std::int64_t base;
        if (idx >= 0) {
            base = std::prev(ub)->first;  // cache_[0] exists, so ub > begin
        } else {
            base = ub != cache_.end() ? ub->first : 0;
        }
        Eigen::Vector3d x = cache_.at(base);
        double hstep = idx >= base ? h_ : -h_;
        std::int64_t steps = std::llabs(idx - base);
        for (std::int64_t k = 1; k <= steps; ++k) {
            rk4_state(x, hstep);
            std::int64_t at = base + (hstep > 0 ? k : -k);
            if (at % milestone_stride_ == 0) cache_[at] = x;
        }
        cache_[idx] = x;
        return x;
    }

    double sigma_, rho_, beta_, h_;
    TimeDomain td_;
    mutable std::map<std::int64_t, Eigen::Vector3d> cache_;
    mutable std::mutex mu_;
    static constexpr std::int64_t milestone_stride_ = 1000;
};

// --- i.i.d. matrix products ------------------------------------------------

class RandomProductCocycle final : public Cocycle {
public:
    RandomProductCocycle(int dim, std::uint64_t seed, EntryDistribution dist)
        : dim_(dim), seed_(seed), dist_(dist) {
        if (dim < 1) throw ConfigError("dimension must be >= 1");
    }

    std::string name() const override { return "random_product"; }
    int dim() const override { return dim_; }
    const TimeDomain& time_domain() const override { return td_; }
    State origin() const override { return std::int64_t{0}; }

    State flow(double t, const State& s) const override {
        return as_index(s) + std::llround(snap_time(t));
    }

    Eigen::MatrixXd step(double dt, const State& s) const override {
        double r = std::round(dt);
        if (std::abs(dt - r) > 1e-9 || std::abs(r) != 1.0)
            throw ConfigError("random product cocycle steps by +-1 only");
        std::int64_t idx = as_index(s);
        if (r > 0) return matrix_at(idx);
        return matrix_at(idx - 1).partialPivLu().inverse();
    }

    Eigen::MatrixXd matrix_at(std::int64_t idx) const {
        for (std::uint64_t draw = 0;; ++draw) {
            Rng rng(derive_seed(seed_, static_cast<std::uint64_t>(idx) ^
                                           0x5bf0'3635'dee3'9d1dULL,
                                draw));
            Eigen::MatrixXd a(dim_, dim_);
            for (int i = 0; i < dim_; ++i)
                for (int j = 0; j < dim_; ++j)
                    a(i, j) = dist_ == EntryDistribution::Uniform
                                  ? rng.uniform(-1.0, 1.0)
                                  : rng.gaussian();
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
            const auto& sv = svd.singularValues();
            if (sv(dim_ - 1) > 0 && sv(0) / sv(dim_ - 1) <= 1e12) return a;
        }
    }

private:
    int dim_;
    std::uint64_t seed_;
    EntryDistribution dist_;
    TimeDomain td_ = TimeDomain::discrete_time();
};

// --- time reversal ---------------------------------------------------------

class ReversedCocycle final : public Cocycle {
public:
    explicit ReversedCocycle(CocyclePtr base) : base_(std::move(base)) {}

    std::string name() const override { return "reversed(" + base_->name() + ")"; }
    int dim() const override { return base_->dim(); }
    const TimeDomain& time_domain() const override {
        return base_->time_domain();
    }
    State origin() const override { return base_->origin(); }
    double snap_time(double t) const override {
        return -base_->snap_time(-t);
    }
    State flow(double t, const State& s) const override {
        return base_->flow(-t, s);
    }
    Eigen::MatrixXd step(double dt, const State& s) const override {
        return base_->step(-dt, s);
    }

private:
    CocyclePtr base_;
};

}  // namespace

CocyclePtr diagonal_cocycle(const std::vector<double>& lambdas, TimeDomain td) {
    return std::make_shared<DiagonalCocycle>(lambdas, td);
}

CocyclePtr rotating_cocycle(double lambda1, double lambda2, TimeDomain td) {
    return std::make_shared<RotatingCocycle>(lambda1, lambda2, td);
}

CocyclePtr degenerate_rotating_cocycle(double lambda1, double lambda2,
                                       double rot_speed, TimeDomain td) {
    return std::make_shared<DegenerateRotatingCocycle>(lambda1, lambda2,
                                                       rot_speed, td);
}

CocyclePtr lorenz63_cocycle(double sigma, double rho, double beta, double step,
                            double transient) {
    return std::make_shared<Lorenz63Cocycle>(sigma, rho, beta, step, transient);
}

CocyclePtr random_product_cocycle(int dim, std::uint64_t seed,
                                  EntryDistribution dist) {
    return std::make_shared<RandomProductCocycle>(dim, seed, dist);
}

CocyclePtr reversed(CocyclePtr base) {
    return std::make_shared<ReversedCocycle>(std::move(base));
}

CocyclePtr make_cocycle(const std::string& name,
                        const std::vector<double>& params, TimeDomain td) {
    if (name == "diagonal") {
        if (params.empty())
            throw ConfigError("cocycle 'diagonal' needs rate parameters");
        return diagonal_cocycle(params, td);
    }
    if (name == "rotating") {
        if (params.size() != 2)
            throw ConfigError("cocycle 'rotating' needs [lambda1, lambda2]");
        return rotating_cocycle(params[0], params[1], td);
    }
    if (name == "degenerate_rotating") {
        if (params.size() != 3)
            throw ConfigError(
                "cocycle 'degenerate_rotating' needs [lambda1, lambda2, "
                "rot_speed]");
        return degenerate_rotating_cocycle(params[0], params[1], params[2], td);
    }
    if (name == "lorenz63") {
        double sigma = params.size() > 0 ? params[0] : 10.0;
        double rho = params.size() > 1 ? params[1] : 28.0;
        double beta = params.size() > 2 ? params[2] : 8.0 / 3.0;
        double step = td.discrete() ? 1e-3 : td.base_step;
        double transient = params.size() > 3 ? params[3] : 100.0;
        return lorenz63_cocycle(sigma, rho, beta, step, transient);
    }
    if (name == "random_product") {
        if (params.empty())
            throw ConfigError("cocycle 'random_product' needs [dim, seed?]");
        int dim = static_cast<int>(params[0]);
        std::uint64_t seed =
            params.size() > 1 ? static_cast<std::uint64_t>(params[1]) : 0;
        return random_product_cocycle(dim, seed);
    }
    throw ConfigError(
        "unknown cocycle '" + name +
        "'; available: diagonal, rotating, degenerate_rotating, lorenz63, "
        "random_product");
}

}  // namespace clv
