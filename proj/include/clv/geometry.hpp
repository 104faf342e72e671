#pragma once

#include "clv/subspace.hpp"

namespace clv {

// Largest singular value (operator 2-norm). Throws NumericError on NaN/Inf.
double spectral_norm(const Eigen::MatrixXd& a);

// d(M,N) = ||P_M - P_N||. A metric on subspaces with values in [0,1];
// equals 1 whenever dim(M) != dim(N). Symmetric bit-for-bit.
double distance(const Subspace& m, const Subspace& n);

// c_0(M,N) = ||P_M P_N||, the cosine of the minimal angle. The max over an
// empty set is 0, so any zero subspace gives 0.
double cos_min_angle(const Subspace& m, const Subspace& n);

// c(M,N) = ||P_M P_N - P_{M cap N}||, always < 1. The intersection is
// obtained via intersect_alternating.
double cos_angle(const Subspace& m, const Subspace& n);

// Gram-Schmidt procedure for subspaces: returns the filtration spaces
// U_i = span(first d_1+...+d_i vectors) and orthogonal blocks F_i.
// Throws DegeneracyError naming the first block whose prefix is rank
// deficient (smallest singular value <= 1e-10 x largest).
Filtration gram_schmidt(const VectorTuple& tuple,
                        const DegeneracyPattern& pattern);

// M cap N by von Neumann's method of alternating projections. Iterates
// (P_M P_N)^k until successive products differ by < tol/10 in spectral norm
// or a geometric-decay-based cap is hit, then extracts the subspace by
// spectral thresholding. Throws IterationLimitError (carrying the residual)
// if ||(P_M P_N)^k - P_S|| > tol at the stopping iterate.
Subspace intersect_alternating(const Subspace& m, const Subspace& n,
                               double tol = 1e-12);

// Image A(M) with re-orthonormalized basis, for invertible A.
Subspace apply_map(const Eigen::MatrixXd& a, const Subspace& m);

}  // namespace clv
