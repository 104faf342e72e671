#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "clv/cocycle.hpp"
#include "clv/lyapunov_index.hpp"
#include "clv/rng.hpp"
#include "clv/subspace.hpp"

namespace clv {

struct GinelliConfig {
    double t1 = 0.0;  // forward warmup time (past state to omega_0)
    double t2 = 0.0;  // forward/backward window time (omega_0 to future state)
    double ortho_interval = 1.0;
    DegeneracyPattern pattern;
    std::uint64_t seed = 0;
    // Output times within [-t1, t2]; must be multiples of ortho_interval.
    std::vector<double> interval;

    void validate(const Cocycle& c) const;
    long steps1() const;  // t1 / ortho_interval
    long steps2() const;
};

// Forward-phase data: QR frames, stored R factors and cumulative log
// diagonals (Benettin sums), and the orbit states visited. Frame 0 is the
// orthonormalized initial tuple at theta_{-t1} omega_0; the final frame is
// A^{(f)}, the Gram-Schmidt basis of the evolved tuple at theta_{t2} omega_0.
struct ForwardRecord {
    std::vector<Eigen::MatrixXd> q_frames;   // n+1 frames
    std::vector<Eigen::MatrixXd> r_factors;  // n upper-triangular, diag > 0
    Eigen::MatrixXd log_r_diag_sums;         // (n+1) x d cumulative, row 0 = 0
    std::vector<State> states;               // n+1
    long origin_index = 0;                   // frame index of omega_0
    double ortho_interval = 1.0;

    long steps() const { return static_cast<long>(r_factors.size()); }
    double total_time() const {
        return static_cast<double>(steps()) * ortho_interval;
    }
};

ForwardRecord forward_phase(const Cocycle& c, const State& omega0,
                            const GinelliConfig& cfg, const VectorTuple& init);

struct BackwardResult {
    std::vector<Subspace> at_origin;  // U_i approximating E_i(omega_0)
    std::vector<std::pair<double, std::vector<Subspace>>> on_interval;
};

// Called at every backward step with (frame index, state, representative
// vectors); vectors are grouped per pattern.
using BackwardObserver =
    std::function<void(long, const State&, const Eigen::MatrixXd&)>;

// Applies stored R inverses to the coefficient tuple alpha (block i carries
// d_i columns supported on the first d_1+...+d_i coordinates), normalizing
// columns between steps. The actual initial vectors are b' = A^{(f)} alpha.
BackwardResult backward_phase(const ForwardRecord& rec,
                              const Eigen::MatrixXd& alpha,
                              const GinelliConfig& cfg,
                              const BackwardObserver& observer = {});

// Per-column Benettin rates over the whole forward record.
Eigen::VectorXd benettin_rates(const ForwardRecord& rec);

// Rates grouped into blocks when adjacent column rates differ by less than
// grouping_tol (default 10 / total forward time).
LyapunovSpectrum les_from_forward(const ForwardRecord& rec,
                                  double grouping_tol = -1.0);

// Seeded draws used by the algorithm (exposed for tests and the harness).
VectorTuple random_init(int d, Rng& rng);
Eigen::MatrixXd random_alpha(const DegeneracyPattern& pattern, Rng& rng);

struct GinelliResult {
    std::vector<Subspace> subspaces_at_origin;
    std::vector<std::pair<double, std::vector<Subspace>>> subspaces_on_interval;
    LyapunovSpectrum le_estimates;
    Eigen::VectorXd per_column_rates;
    // Distance-to-reference along the backward pass (time = elapsed backward
    // time), present when the cocycle has analytic Oseledets data.
    std::vector<TimeSeries> block_distance_series;
    std::vector<TimeSeries> column_distance_series;
};

GinelliResult run_ginelli(const Cocycle& c, const State& omega0,
                          const GinelliConfig& cfg);

// Intersection-based variant: forward-propagated filtration spaces from the
// past meet backward-propagated ones from the future in E_i(omega_0).
std::vector<Subspace> intersection_variant(
    const Cocycle& c, const State& omega0, double t1, double t2,
    std::uint64_t seed_forward, std::uint64_t seed_backward,
    const DegeneracyPattern& pattern, double ortho_interval = 1.0,
    double tol = 1e-10);

struct StudyCell {
    double t1 = 0.0;
    double t2 = 0.0;
    std::vector<double> sup_distance;  // per block, over trials
    double fraction_rate = 0.0;  // trials meeting the epsilon rate bound
    double fraction_dist = 0.0;  // trials with all block distances <= epsilon
};

struct ConvergenceStudy {
    std::vector<StudyCell> cells;
    std::vector<RateEstimate> block_rates;  // extended-index fit per block
    std::vector<double> expected_rates;     // -min adjacent gap per block
    double epsilon = 0.0;
};

// Runs trials per (t1,t2) cell against the analytic reference, fits the
// empirical convergence rate per block, and reports per-cell success
// fractions. Trial seeds derive from (seed, trial, cell); honors CLV_THREADS.
ConvergenceStudy convergence_study(
    const Cocycle& c, const State& omega0, const OseledetsData& analytic,
    const std::vector<std::pair<double, double>>& grid, int trials,
    std::uint64_t seed, double ortho_interval = 1.0, double epsilon = -1.0);

}  // namespace clv
