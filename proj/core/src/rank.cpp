#include "bqrec/rank.hpp"

#include "bqrec/errors.hpp"

#include <cmath>

namespace bqrec {
namespace {

void require_finite(const Matrix& M, const char* what) {
    if (!M.allFinite()) {
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
}

}  // namespace

Vector singular_values(const Matrix& M) {
    require_finite(M, "singular_values");
    if (M.size() == 0) return Vector();
    return Eigen::BDCSVD<Matrix>(M).singularValues();
}

int numerical_rank(const Matrix& M, double rel_tol) {
    if (!(rel_tol > 0.0) || !std::isfinite(rel_tol)) {
        throw DomainError("numerical_rank: tolerance must be positive");
    }
    require_finite(M, "numerical_rank");
    if (M.size() == 0) return 0;
    const Vector s = singular_values(M);
    if (s.size() == 0 || s[0] == 0.0) return 0;
    const double cutoff = rel_tol * s[0];
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s[i] > cutoff) ++r;
    }
    return r;
}

LeastSquaresResult solve_least_squares(const Matrix& A, const Vector& b, double rel_tol) {
    if (A.rows() != b.size()) {
        throw ArgumentError("solve_least_squares: row count does not match right-hand side");
    }
    require_finite(A, "solve_least_squares");
    if (!b.allFinite()) {
        throw DomainError("solve_least_squares: non-finite right-hand side");
    }
    LeastSquaresResult out;
    if (A.cols() == 0) {
        out.residual_norm = b.norm();
        return out;
    }
    if (A.rows() == 0) {
        out.x = Vector::Zero(A.cols());
        return out;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
    cod.setThreshold(rel_tol);
    cod.compute(A);
    out.x = cod.solve(b);
    out.rank = static_cast<int>(cod.rank());
    out.residual_norm = (A * out.x - b).norm();
    return out;
}

}  // namespace bqrec
