#pragma once

#include <initializer_list>
#include <vector>

#include <Eigen/Core>

#include "clv/errors.hpp"

namespace clv {

// Multiplicities (d_1, ..., d_p) splitting a tuple of length d into blocks.
class DegeneracyPattern {
public:
    DegeneracyPattern() = default;
    explicit DegeneracyPattern(std::vector<int> sizes);

    static DegeneracyPattern nondegenerate(int d);

    // Groups a non-increasing rate vector: adjacent entries closer than tol
    // fall into the same block (tol = 0 groups exact repeats).
    static DegeneracyPattern from_sorted_rates(const Eigen::VectorXd& rates,
                                               double tol);

    int blocks() const { return static_cast<int>(sizes_.size()); }
    int total() const { return total_; }
    int size(int i) const { return sizes_.at(static_cast<size_t>(i)); }
    // d_1 + ... + d_i  (prefix(0) = d_1); offset(i) = prefix(i) - size(i).
    int prefix(int i) const { return prefix_.at(static_cast<size_t>(i)); }
    int offset(int i) const { return prefix(i) - size(i); }
    const std::vector<int>& sizes() const { return sizes_; }
    DegeneracyPattern reversed() const;

    bool operator==(const DegeneracyPattern& other) const {
        return sizes_ == other.sizes_;
    }

private:
    std::vector<int> sizes_;
    std::vector<int> prefix_;
    int total_ = 0;
};

// A linear subspace of R^d stored as a d x k matrix with orthonormal columns.
// k = 0 (the zero subspace) is a valid value.
class Subspace {
public:
    // Zero subspace of R^d.
    explicit Subspace(int ambient_dim);

    // Accepts a basis that is already orthonormal (checked to 1e-12).
    static Subspace from_orthonormal(Eigen::MatrixXd basis);

    // Orthonormalizes the given spanning set; requires full column rank.
    static Subspace span_of(const Eigen::MatrixXd& vectors);

    // Extracts the range of an approximate orthogonal projector: keeps
    // eigenvectors with eigenvalue > 0.5.
    static Subspace from_projector(const Eigen::MatrixXd& projector);

    // span(e_{axes[0]}, e_{axes[1]}, ...), 0-based axes.
    static Subspace standard(int ambient_dim, std::initializer_list<int> axes);

    int ambient_dim() const { return ambient_dim_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }
    Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }
    Subspace complement() const;

    bool contains(const Eigen::VectorXd& x, double tol = 1e-10) const;

private:
    Subspace(int ambient_dim, Eigen::MatrixXd basis)
        : ambient_dim_(ambient_dim), basis_(std::move(basis)) {}

    int ambient_dim_;
    Eigen::MatrixXd basis_;  // d x k, orthonormal columns
};

// An ordered tuple of vectors in R^d (matrix columns), grouped externally by
// a DegeneracyPattern where needed.
class VectorTuple {
public:
    explicit VectorTuple(Eigen::MatrixXd vectors);

    static VectorTuple standard_basis(int d);

    int ambient_dim() const { return static_cast<int>(vectors_.rows()); }
    int count() const { return static_cast<int>(vectors_.cols()); }
    const Eigen::MatrixXd& matrix() const { return vectors_; }
    Eigen::VectorXd vector(int j) const { return vectors_.col(j); }

    // First d_1 + ... + d_{i+1} columns (i is a 0-based block index).
    Eigen::MatrixXd prefix(const DegeneracyPattern& pattern, int i) const;
    // Columns of block i.
    Eigen::MatrixXd group(const DegeneracyPattern& pattern, int i) const;

    // Orthonormal within the given tolerance?
    bool is_orthonormal(double tol = 1e-10) const;

private:
    Eigen::MatrixXd vectors_;
};

// Output of the Gram-Schmidt procedure for subspaces: nested filtration
// spaces U_1 c ... c U_p together with orthogonal block complements F_i.
struct Filtration {
    std::vector<Subspace> spaces;  // dim(spaces[i]) = d_1 + ... + d_{i+1}
    std::vector<Subspace> blocks;  // mutually orthogonal, F_1 + ... + F_i = U_i
};

}  // namespace clv
