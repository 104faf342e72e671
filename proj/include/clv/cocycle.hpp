#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "clv/errors.hpp"
#include "clv/subspace.hpp"

namespace clv {

// Discrete (T = Z) or continuous (T = R) time; continuous time is realized
// as composition of base_step propagators.
struct TimeDomain {
    enum class Kind { Discrete, Continuous };
    Kind kind = Kind::Discrete;
    double base_step = 1.0;  // continuous only

    bool discrete() const { return kind == Kind::Discrete; }
    static TimeDomain discrete_time() { return {Kind::Discrete, 1.0}; }
    static TimeDomain continuous_time(double base_step) {
        if (!(base_step > 0)) throw ConfigError("base_step must be positive");
        return {Kind::Continuous, base_step};
    }
};

// Opaque orbit-state handle: trivial (single fixed point), a circle phase,
// an integer index into a two-sided sequence, or an R^3 point index for the
// ODE cocycle.
using State = std::variant<std::monostate, double, std::int64_t>;

// Strictly decreasing Lyapunov exponents with multiplicities.
struct LyapunovSpectrum {
    Eigen::VectorXd exponents;  // one per block, strictly decreasing
    DegeneracyPattern pattern;

    int blocks() const { return pattern.blocks(); }
    int dim() const { return pattern.total(); }
    // |lambda_i - lambda_{i-1}|; +inf beyond the ends (lambda_0 = +inf,
    // lambda_{p+1} = -inf).
    double gap_above(int i) const;
    double gap_below(int i) const;
    double min_adjacent_gap(int i) const;
    double min_gap() const;
    Eigen::VectorXd per_column() const;  // expanded to d entries
    void validate() const;
};

// Spectrum plus the Oseledets splitting and both filtrations along the orbit.
struct OseledetsData {
    LyapunovSpectrum spectrum;
    // E_1(w), ..., E_p(w)
    std::function<std::vector<Subspace>(const State&)> spaces;
    // Per-block orthonormal reference vectors at w (columns grouped per
    // pattern); used for per-column diagnostics.
    std::function<Eigen::MatrixXd(const State&)> block_frames;

    // V_i(w) = E_i + ... + E_p (directions of forward rate <= lambda_i).
    Subspace forward_filtration(int i, const State& s) const;
    // V_i^-(w) = E_1 + ... + E_{p+1-i}.
    Subspace backward_filtration(int i, const State& s) const;
};

// A two-sided-time linear cocycle Phi(t, w) over a flow theta_t on an orbit.
class Cocycle {
public:
    virtual ~Cocycle() = default;

    virtual std::string name() const = 0;
    virtual int dim() const = 0;
    virtual const TimeDomain& time_domain() const = 0;
    virtual State origin() const = 0;

    virtual State flow(double t, const State& state) const = 0;
    // Phi(dt, state) for a single step; analytic builtins accept any dt,
    // the ODE cocycle rounds dt to its integration grid.
    virtual Eigen::MatrixXd step(double dt, const State& state) const = 0;

    // The time actually realized when t is requested (grid snapping).
    virtual double snap_time(double t) const;

    virtual bool has_analytic_oseledets() const { return false; }
    virtual OseledetsData analytic_oseledets() const;

    // Tangent of the orbit at a state, for flow cocycles (the neutral CLV
    // direction). Throws UnsupportedError unless overridden.
    virtual Eigen::VectorXd flow_direction(const State& state) const;
};

using CocyclePtr = std::shared_ptr<const Cocycle>;

// Phi(t, w) by composition of base-step propagators (one fractional analytic
// step for a non-grid remainder). Throws CocycleOverflowError when entries
// exceed 1e300; long-time products belong in finite_time_les instead.
Eigen::MatrixXd propagate(const Cocycle& c, double t, const State& state);

// SVD with the ordering sigma_1 >= ... >= sigma_d > 0; U, V orthogonal.
struct SvdResult {
    Eigen::MatrixXd left;      // U
    Eigen::VectorXd singular;  // non-increasing
    Eigen::MatrixXd right;     // V
    Eigen::MatrixXd reconstruct() const {
        return left * singular.asDiagonal() * right.transpose();
    }
    double group_min(const DegeneracyPattern& pattern, int i) const;
    double group_max(const DegeneracyPattern& pattern, int i) const;
};

SvdResult svd_ordered(const Eigen::MatrixXd& a);

// ||wedge^i A|| = sigma_1(A) ... sigma_i(A).
double wedge_norm(const Eigen::MatrixXd& a, int order);

// Finite-time Lyapunov exponents (1/t) log sigma_j(Phi(t, w)), j = 1..d,
// non-increasing. Staged computation: extreme singular values are recovered
// from the forward and inverse products while trustworthy, the rest from
// QR-accumulated log diagonals.
Eigen::VectorXd finite_time_les(const Cocycle& c, const State& state, double t);

// Builtin cocycles -------------------------------------------------------

// Phi(t, w0) = D^t with D = diag(e^{lambda_i}) on a one-point orbit.
CocyclePtr diagonal_cocycle(const std::vector<double>& lambdas,
                            TimeDomain td = TimeDomain::discrete_time());

// Phi(t, w) = R(theta_t w) D^t R(-w) on the circle, R(w) the rotation by
// 2*pi*w, D = diag(e^{lambda1}, e^{lambda2}), lambda1 > lambda2. The
// Oseledets spaces rotate with w.
CocyclePtr rotating_cocycle(double lambda1, double lambda2,
                            TimeDomain td = TimeDomain::discrete_time());

// Two degenerate rotating blocks in d = 4: block i grows like e^{lambda_i t}
// with an inner rotation at rot_speed revolutions per unit time. Pattern
// (2,2); single propagated vectors do not converge, the block spans do.
CocyclePtr degenerate_rotating_cocycle(
    double lambda1, double lambda2, double rot_speed,
    TimeDomain td = TimeDomain::discrete_time());

// Tangent linear model of Lorenz-63 along a reference orbit (fixed-step RK4
// for state and variational equation). States are grid indices relative to a
// post-transient anchor; flow(t1, origin()) reaches the anchor's future
// without ever integrating backward.
CocyclePtr lorenz63_cocycle(double sigma = 10.0, double rho = 28.0,
                            double beta = 8.0 / 3.0, double step = 1e-3,
                            double transient = 100.0);

enum class EntryDistribution { Uniform, Gaussian };

// i.i.d. invertible matrix products over the integer shift; draws with
// condition number > 1e12 are resampled. Reproducible per (seed, index).
CocyclePtr random_product_cocycle(int dim, std::uint64_t seed,
                                  EntryDistribution dist =
                                      EntryDistribution::Uniform);

// Time-reversed cocycle Phi^-(t, w) = Phi(-t, w) over theta_{-t}.
CocyclePtr reversed(CocyclePtr base);

// Constructs a builtin from its registry name and parameter list (harness
// config entry point). Throws ConfigError for unknown names/bad parameters.
CocyclePtr make_cocycle(const std::string& name,
                        const std::vector<double>& params,
                        TimeDomain td);

}  // namespace clv
