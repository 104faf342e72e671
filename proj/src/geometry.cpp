#include "clv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

namespace clv {

namespace {

void check_same_ambient(const Subspace& m, const Subspace& n) {
    if (m.ambient_dim() != n.ambient_dim())
        throw DimensionError("ambient dimensions differ (" +
                             std::to_string(m.ambient_dim()) + " vs " +
                             std::to_string(n.ambient_dim()) + ")");
}

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

double spectral_norm(const Eigen::MatrixXd& a) {
    if (!a.allFinite()) throw NumericError("matrix has non-finite entries");
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()(0);
}

double distance(const Subspace& m, const Subspace& n) {
    check_same_ambient(m, n);
    Eigen::MatrixXd diff = m.projector() - n.projector();
    // ||X|| = sqrt(lambda_max(X^2)). Squaring keeps the evaluation bit-for-bit
    // symmetric in (M,N): (-X)(-X) and XX round identically.
    Eigen::MatrixXd sq = diff * diff;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sq,
                                                      Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().maxCoeff();
    return clamp01(std::sqrt(std::max(0.0, lam)));
}

double cos_min_angle(const Subspace& m, const Subspace& n) {
    check_same_ambient(m, n);
    if (m.dim() == 0 || n.dim() == 0) return 0.0;
    return clamp01(spectral_norm(m.projector() * n.projector()));
}

double cos_angle(const Subspace& m, const Subspace& n) {
    check_same_ambient(m, n);
    if (m.dim() == 0 || n.dim() == 0) return 0.0;
    Subspace common = intersect_alternating(m, n, 1e-12);
    double v = spectral_norm(m.projector() * n.projector() - common.projector());
    return std::min(std::nextafter(1.0, 0.0), std::max(0.0, v));
}

Filtration gram_schmidt(const VectorTuple& tuple,
                        const DegeneracyPattern& pattern) {
    if (pattern.total() != tuple.count())
        throw DimensionError("pattern does not match tuple length");
    const int d = tuple.ambient_dim();
    const int m = tuple.count();
    const int p = pattern.blocks();
    const Eigen::MatrixXd& b = tuple.matrix();

    // Rank gate: check prefixes so a failure names the first offending block.
    for (int i = 0; i < p; ++i) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.leftCols(pattern.prefix(i)));
        const auto& s = svd.singularValues();
        if (s(0) == 0.0 || s(s.size() - 1) <= 1e-10 * s(0))
            throw DegeneracyError(
                "tuple is rank deficient at block " + std::to_string(i + 1) +
                " (vectors 1.." + std::to_string(pattern.prefix(i)) + ")");
    }

    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, m);
    Eigen::MatrixXd r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
    for (int j = 0; j < m; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);

    Filtration f;
    f.spaces.reserve(static_cast<size_t>(p));
    f.blocks.reserve(static_cast<size_t>(p));
    for (int i = 0; i < p; ++i) {
        f.spaces.push_back(
            Subspace::from_orthonormal(q.leftCols(pattern.prefix(i))));
        f.blocks.push_back(Subspace::from_orthonormal(
            q.middleCols(pattern.offset(i), pattern.size(i))));
    }
    return f;
}

Subspace intersect_alternating(const Subspace& m, const Subspace& n,
                               double tol) {
    check_same_ambient(m, n);
    if (tol <= 0) throw ConfigError("tolerance must be positive");
    const int d = m.ambient_dim();
    if (m.dim() == 0 || n.dim() == 0) return Subspace(d);

    const Eigen::MatrixXd pm = m.projector();
    const Eigen::MatrixXd pn = n.projector();
    const Eigen::MatrixXd pmpn = pm * pn;

    // Differences of successive iterates decay like c^2 per step. The cap is
    // refreshed from a running contraction estimate (the first iterates see
    // the fast-decaying directions only and would undershoot it), and the
    // stopping threshold tightens until the extracted projector meets tol.
    constexpr long kIterCeiling = 500000;
    Eigen::MatrixXd x = pmpn;
    Eigen::MatrixXd x_next = pmpn * x;
    double diff = spectral_norm(x_next - x);
    double threshold = tol / 10;
    long k = 1;
    long cap = 64;
    while (true) {
        while (diff >= threshold && k < cap) {
            x = x_next;
            x_next = pmpn * x;
            double next_diff = spectral_norm(x_next - x);
            if (next_diff > 0 && diff > 0) {
                double c_est = std::sqrt(std::min(next_diff / diff, 1.0));
                c_est = std::min(std::max(c_est, 1e-6), 1.0 - 1e-12);
                long horizon = 10 * static_cast<long>(std::ceil(
                                        std::log(tol) / std::log(c_est)));
                cap = std::min(std::max(cap, horizon), kIterCeiling);
            }
            diff = next_diff;
            ++k;
        }

        Subspace s = Subspace::from_projector(
            0.5 * (x_next + x_next.transpose()));
        double residual = spectral_norm(x_next - s.projector());
        if (residual <= tol) return s;
        if (k >= cap)
            throw IterationLimitError(
                "alternating projections stalled (residual " +
                    std::to_string(residual) + " > tol after " +
                    std::to_string(k + 1) + " iterations)",
                residual);
        threshold /= 10;
    }
}

Subspace apply_map(const Eigen::MatrixXd& a, const Subspace& m) {
    const int d = m.ambient_dim();
    if (a.rows() != d || a.cols() != d)
        throw DimensionError("map must be a square matrix over the ambient space");
    if (!a.allFinite()) throw NumericError("map has non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) <= 0.0)
        throw SingularMatrixError("map is singular");
    if (m.dim() == 0) return Subspace(d);
    Eigen::MatrixXd image = a * m.basis();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(image);
    Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(d, m.dim());
    Eigen::MatrixXd r =
        qr.matrixQR().topRows(m.dim()).triangularView<Eigen::Upper>();
    for (int j = 0; j < m.dim(); ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return Subspace::from_orthonormal(std::move(q));
}

}  // namespace clv
