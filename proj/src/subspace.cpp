#include "clv/subspace.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace clv {

DegeneracyPattern::DegeneracyPattern(std::vector<int> sizes)
    : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw ConfigError("degeneracy pattern must be non-empty");
    prefix_.reserve(sizes_.size());
    for (int s : sizes_) {
        if (s < 1) throw ConfigError("degeneracy pattern sizes must be >= 1");
        total_ += s;
        prefix_.push_back(total_);
    }
}

DegeneracyPattern DegeneracyPattern::nondegenerate(int d) {
    return DegeneracyPattern(std::vector<int>(static_cast<size_t>(d), 1));
}

DegeneracyPattern DegeneracyPattern::from_sorted_rates(
    const Eigen::VectorXd& rates, double tol) {
    if (rates.size() == 0) throw ConfigError("empty rate vector");
    std::vector<int> sizes{1};
    for (int j = 1; j < rates.size(); ++j) {
        if (rates(j) > rates(j - 1) + 1e-12)
            throw ConfigError("rates must be non-increasing");
        if (rates(j - 1) - rates(j) <= tol)
            ++sizes.back();
        else
            sizes.push_back(1);
    }
    return DegeneracyPattern(std::move(sizes));
}

DegeneracyPattern DegeneracyPattern::reversed() const {
    std::vector<int> r(sizes_.rbegin(), sizes_.rend());
    return DegeneracyPattern(std::move(r));
}

Subspace::Subspace(int ambient_dim)
    : ambient_dim_(ambient_dim), basis_(ambient_dim, 0) {
    if (ambient_dim < 1) throw DimensionError("ambient dimension must be >= 1");
}

Subspace Subspace::from_orthonormal(Eigen::MatrixXd basis) {
    const int d = static_cast<int>(basis.rows());
    const int k = static_cast<int>(basis.cols());
    if (d < 1) throw DimensionError("ambient dimension must be >= 1");
    if (k > d) throw DimensionError("subspace dimension exceeds ambient dimension");
    if (!basis.allFinite()) throw NumericError("basis has non-finite entries");
    if (k > 0) {
        Eigen::MatrixXd gram = basis.transpose() * basis;
        double err = (gram - Eigen::MatrixXd::Identity(k, k))
                         .cwiseAbs()
                         .maxCoeff();
        if (err > 1e-12)
            throw NumericError("basis columns are not orthonormal (error " +
                               std::to_string(err) + ")");
    }
    return Subspace(d, std::move(basis));
}

Subspace Subspace::span_of(const Eigen::MatrixXd& vectors) {
    const int d = static_cast<int>(vectors.rows());
    const int k = static_cast<int>(vectors.cols());
    if (d < 1) throw DimensionError("ambient dimension must be >= 1");
    if (k == 0) return Subspace(d);
    if (!vectors.allFinite()) throw NumericError("vectors have non-finite entries");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(vectors);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0 || s(s.size() - 1) <= 1e-10 * s(0))
        throw DegeneracyError("spanning set is rank deficient");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vectors);
    Eigen::MatrixXd q =
        qr.householderQ() * Eigen::MatrixXd::Identity(d, k);
    Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j)
        if (r(j, j) < 0) q.col(j) = -q.col(j);
    return Subspace(d, std::move(q));
}

Subspace Subspace::from_projector(const Eigen::MatrixXd& projector) {
    const int d = static_cast<int>(projector.rows());
    if (projector.cols() != d) throw DimensionError("projector must be square");
    if (!projector.allFinite())
        throw NumericError("projector has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        0.5 * (projector + projector.transpose()));
    int k = 0;
    for (int j = 0; j < d; ++j)
        if (es.eigenvalues()(j) > 0.5) ++k;
    // Eigenvalues are ascending, the kept ones are the last k columns.
    Eigen::MatrixXd basis = es.eigenvectors().rightCols(k);
    return Subspace(d, std::move(basis));
}

Subspace Subspace::standard(int ambient_dim, std::initializer_list<int> axes) {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(
        ambient_dim, static_cast<Eigen::Index>(axes.size()));
    int j = 0;
    for (int axis : axes) {
        if (axis < 0 || axis >= ambient_dim)
            throw DimensionError("axis out of range");
        b(axis, j++) = 1.0;
    }
    return from_orthonormal(std::move(b));
}

Subspace Subspace::complement() const {
    const int d = ambient_dim_;
    const int k = dim();
    if (k == 0)
        return from_orthonormal(Eigen::MatrixXd::Identity(d, d));
    if (k == d) return Subspace(d);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_);
    Eigen::MatrixXd qfull = qr.householderQ();
    return Subspace(d, qfull.rightCols(d - k));
}

bool Subspace::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != ambient_dim_) throw DimensionError("vector dimension mismatch");
    double nx = x.norm();
    if (nx == 0.0) return true;
    Eigen::VectorXd res = x - basis_ * (basis_.transpose() * x);
    return res.norm() <= tol * nx;
}

VectorTuple::VectorTuple(Eigen::MatrixXd vectors) : vectors_(std::move(vectors)) {
    if (vectors_.rows() < 1) throw DimensionError("ambient dimension must be >= 1");
    if (vectors_.cols() > vectors_.rows())
        throw DimensionError("tuple length exceeds ambient dimension");
    if (!vectors_.allFinite()) throw NumericError("tuple has non-finite entries");
}

VectorTuple VectorTuple::standard_basis(int d) {
    return VectorTuple(Eigen::MatrixXd::Identity(d, d));
}

Eigen::MatrixXd VectorTuple::prefix(const DegeneracyPattern& pattern,
                                    int i) const {
    if (pattern.total() != count())
        throw DimensionError("pattern does not match tuple length");
    return vectors_.leftCols(pattern.prefix(i));
}

Eigen::MatrixXd VectorTuple::group(const DegeneracyPattern& pattern,
                                   int i) const {
    if (pattern.total() != count())
        throw DimensionError("pattern does not match tuple length");
    return vectors_.middleCols(pattern.offset(i), pattern.size(i));
}

bool VectorTuple::is_orthonormal(double tol) const {
    const int k = count();
    if (k == 0) return true;
    Eigen::MatrixXd gram = vectors_.transpose() * vectors_;
    return (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace clv
