#pragma once

#include "bqrec/types.hpp"

namespace bqrec {

/// Number of singular values above rel_tol * sigma_max. The zero and the empty
/// matrix have rank 0. Throws DomainError on non-finite entries or rel_tol <= 0.
int numerical_rank(const Matrix& M, double rel_tol = kDefaultRankTolerance);

/// Singular values in decreasing order.
Vector singular_values(const Matrix& M);

struct LeastSquaresResult {
    Vector x;
    int rank = 0;
    double residual_norm = 0.0;
};

/// Minimum-norm least-squares solution of A x = b through a complete
/// orthogonal decomposition (column-pivoted QR followed by an RQ step). The
/// pivot threshold is rel_tol.
LeastSquaresResult solve_least_squares(const Matrix& A, const Vector& b,
                                       double rel_tol = kDefaultRankTolerance);

}  // namespace bqrec
