#pragma once

#include <cstdint>
#include <vector>

#include "clv/subspace.hpp"

namespace clv {

// delta-admissibility of a d-tuple relative to a reference ONB: the tuple is
// delta-admissible iff it is linearly independent and every filtration level
// satisfies d(U_i^{(b)}, U_i^{(c)})^2 <= 1 - delta^2. delta_max is the largest
// such delta (0 for dependent tuples or when some level distance is 1).
struct AdmissibilityReport {
    double delta_max = 0.0;
    // Same quantity from the projected-mass characterization (smallest
    // eigenvalue of the projected Gram matrix per level); agrees with
    // delta_max up to roundoff and serves as a cross-check.
    double delta_max_projected = 0.0;
    std::vector<double> per_level_distance;  // i = 1 .. p-1
    bool independent = false;

    bool admissible(double delta) const {
        return independent && delta <= delta_max;
    }
};

AdmissibilityReport admissibility(const VectorTuple& tuple,
                                  const VectorTuple& reference,
                                  const DegeneracyPattern& pattern);

// Per-level verdicts for the singular-vector propagation bound
// d(U_i^{(Ab)}, U_i^{(u)}) <= (1/delta) * sigma_{i+1}^max / sigma_i^min.
struct PropagationBoundLevel {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;   // lhs <= rhs + 1e-9
    double margin = 0.0;  // rhs - lhs
};

struct PropagationBoundReport {
    AdmissibilityReport admissibility;  // w.r.t. right singular vectors of A
    std::vector<PropagationBoundLevel> levels;
    bool all_hold() const;
};

PropagationBoundReport propagation_bound_check(const Eigen::MatrixXd& a,
                                               const VectorTuple& tuple,
                                               const DegeneracyPattern& pattern);

// Certified lower bound for the extendable-admissibility parameter of
// per-block vector groups living in span(c_{i_1}, ..., c_{p_{d_p}}): block i's
// extension is prefixed with the reference vectors of blocks < i and
// completed orthogonally within the allowed span. Returns min_i delta_max of
// the constructed extensions. Throws BlockDomainError if a block leaves its span.
double extendable_admissibility(const std::vector<Eigen::MatrixXd>& groups,
                                const VectorTuple& reference,
                                const DegeneracyPattern& pattern);

// delta_max for n i.i.d. tuples of vectors uniform in the radius-M ball,
// relative to the standard basis. Deterministic per (seed, sample index);
// honors CLV_THREADS.
std::vector<double> sample_admissibility_deltas(int d, double radius,
                                                const DegeneracyPattern& pattern,
                                                int n_samples,
                                                std::uint64_t seed);

// Fraction of sampled tuples that are not delta-admissible.
double sample_nonadmissible_fraction(int d, double radius,
                                     const DegeneracyPattern& pattern,
                                     double delta, int n_samples,
                                     std::uint64_t seed);

}  // namespace clv
