#include "clv/admissibility.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include <Eigen/Dense>

#include "clv/cocycle.hpp"
#include "clv/geometry.hpp"
#include "clv/rng.hpp"
#include "clv/threads.hpp"

namespace clv {

AdmissibilityReport admissibility(const VectorTuple& tuple,
                                  const VectorTuple& reference,
                                  const DegeneracyPattern& pattern) {
    const int d = tuple.ambient_dim();
    if (reference.ambient_dim() != d)
        throw DimensionError("tuple and reference ambient dimensions differ");
    if (pattern.total() != d || tuple.count() != d || reference.count() != d)
        throw DimensionError("admissibility requires full d-tuples");
    if (!reference.is_orthonormal(1e-10))
        throw ReferenceError("reference tuple is not an orthonormal basis");

    AdmissibilityReport report;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(tuple.matrix());
    const auto& sv = svd.singularValues();
    report.independent = sv(0) > 0 && sv(d - 1) > 1e-10 * sv(0);
    if (!report.independent) return report;

    double max_sq = 0.0;
    double min_mass = 1.0;
    for (int i = 0; i + 1 < pattern.blocks(); ++i) {
        Subspace ub = Subspace::span_of(tuple.prefix(pattern, i));
        Subspace uc = Subspace::span_of(reference.prefix(pattern, i));
        double dist = distance(ub, uc);
        report.per_level_distance.push_back(dist);
        max_sq = std::max(max_sq, dist * dist);

        // Projected-mass route: min over unit x in U_i^{(b)} of ||P_c x||^2
        // is the smallest eigenvalue of B^T P_c B.
        Eigen::MatrixXd pc = uc.projector();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            ub.basis().transpose() * pc * ub.basis(), Eigen::EigenvaluesOnly);
        min_mass = std::min(min_mass, std::max(0.0, es.eigenvalues().minCoeff()));
    }
    report.delta_max = std::sqrt(std::max(0.0, 1.0 - max_sq));
    report.delta_max_projected = std::sqrt(min_mass);
    return report;
}

bool PropagationBoundReport::all_hold() const {
    return std::all_of(levels.begin(), levels.end(),
                       [](const PropagationBoundLevel& l) { return l.holds; });
}

PropagationBoundReport propagation_bound_check(const Eigen::MatrixXd& a,
                                               const VectorTuple& tuple,
                                               const DegeneracyPattern& pattern) {
    const int d = tuple.ambient_dim();
    if (a.rows() != d || a.cols() != d)
        throw DimensionError("map dimension mismatch");
    SvdResult svd = svd_ordered(a);

    PropagationBoundReport report;
    report.admissibility =
        admissibility(tuple, VectorTuple(svd.right), pattern);
    if (!(report.admissibility.delta_max > 0))
        throw PreconditionError(
            "tuple is not admissible w.r.t. the right singular vectors");
    const double delta = report.admissibility.delta_max;

    Eigen::MatrixXd ab = a * tuple.matrix();
    for (int i = 0; i + 1 < pattern.blocks(); ++i) {
        Subspace evolved = Subspace::span_of(ab.leftCols(pattern.prefix(i)));
        Subspace left = Subspace::from_orthonormal(
            svd.left.leftCols(pattern.prefix(i)));
        PropagationBoundLevel level;
        level.lhs = distance(evolved, left);
        level.rhs = svd.group_max(pattern, i + 1) /
                    (delta * svd.group_min(pattern, i));
        level.holds = level.lhs <= level.rhs + 1e-9;
        level.margin = level.rhs - level.lhs;
        report.levels.push_back(level);
    }
    return report;
}

double extendable_admissibility(const std::vector<Eigen::MatrixXd>& groups,
                                const VectorTuple& reference,
                                const DegeneracyPattern& pattern) {
    const int d = reference.ambient_dim();
    const int p = pattern.blocks();
    if (static_cast<int>(groups.size()) != p)
        throw DimensionError("one vector group per block required");
    if (!reference.is_orthonormal(1e-10))
        throw ReferenceError("reference tuple is not an orthonormal basis");

    double best = 1.0;
    for (int i = 0; i < p; ++i) {
        const Eigen::MatrixXd& g = groups[static_cast<size_t>(i)];
        if (g.rows() != d || g.cols() != pattern.size(i))
            throw DimensionError("group " + std::to_string(i + 1) +
                                 " has wrong shape");
        const int off = pattern.offset(i);
        const int span_dim = d - off;
        Eigen::MatrixXd cw = reference.matrix().rightCols(span_dim);

        // Domain gate: block vectors must lie in span(c_{i_1},...,c_{p_dp}).
        for (int j = 0; j < g.cols(); ++j) {
            Eigen::VectorXd v = g.col(j);
            Eigen::VectorXd res = v - cw * (cw.transpose() * v);
            if (res.norm() > 1e-10 * std::max(v.norm(), 1e-30))
                throw BlockDomainError("block " + std::to_string(i + 1) +
                                       " leaves its admissible span");
        }

        // Extension: reference vectors for blocks < i, then the group, then an
        // orthogonal completion inside the allowed span.
        Eigen::MatrixXd ext(d, d);
        ext.leftCols(off) = reference.matrix().leftCols(off);
        ext.middleCols(off, g.cols()) = g;
        const int rest = span_dim - static_cast<int>(g.cols());
        if (rest > 0) {
            Eigen::MatrixXd coords = cw.transpose() * g;  // span coordinates
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(coords);
            Eigen::MatrixXd qfull = qr.householderQ();
            ext.rightCols(rest) = cw * qfull.rightCols(rest);
        }

        AdmissibilityReport rep =
            admissibility(VectorTuple(ext), reference, pattern);
        best = std::min(best, rep.delta_max);
    }
    return best;
}

std::vector<double> sample_admissibility_deltas(int d, double radius,
                                                const DegeneracyPattern& pattern,
                                                int n_samples,
                                                std::uint64_t seed) {
    if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
    if (pattern.total() != d) throw DimensionError("pattern must sum to d");
    VectorTuple reference = VectorTuple::standard_basis(d);
    std::vector<double> deltas(static_cast<size_t>(n_samples));
    parallel_for(n_samples, [&](int s) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
        VectorTuple tuple(rng.uniform_ball_tuple(d, d, radius));
        deltas[static_cast<size_t>(s)] =
            admissibility(tuple, reference, pattern).delta_max;
    });
    return deltas;
}

double sample_nonadmissible_fraction(int d, double radius,
                                     const DegeneracyPattern& pattern,
                                     double delta, int n_samples,
                                     std::uint64_t seed) {
    auto deltas = sample_admissibility_deltas(d, radius, pattern, n_samples, seed);
    long bad = std::count_if(deltas.begin(), deltas.end(),
                             [&](double dm) { return dm < delta; });
    return static_cast<double>(bad) / static_cast<double>(n_samples);
}

}  // namespace clv
