#pragma once

#include "bqrec/basis.hpp"
#include "bqrec/bilinear.hpp"
#include "bqrec/types.hpp"

#include <functional>
#include <span>

namespace bqrec {

/// Length of the half-vectorisation of a symmetric K x K matrix.
constexpr std::size_t svech_size(std::size_t K) { return K * (K + 1) / 2; }

/// Position of entry (r, c), r <= c, in the half-vectorisation. Entries are
/// taken column by column from the upper triangle: (0,0), (0,1), (1,1), (0,2), ...
constexpr std::size_t svech_index(std::size_t r, std::size_t c) { return c * (c + 1) / 2 + r; }

/// Upper-triangle flattening with unscaled off-diagonals. Throws ArgumentError
/// if S is not square or not symmetric within 1e-12 (relative to max |S_ij|).
Vector svech(const Matrix& S);

/// Inverse of svech.
Matrix unsvech(const Vector& v, std::size_t K);

/// Measurement row for f^T L f: diagonal entries f_k^2, off-diagonal 2 f_j f_k,
/// so that quad_row(f).dot(svech(L)) == f.dot(L * f).
Vector quad_row(const Vector& f);

/// N x K(K+1)/2 block with row n = quad_row(f_n), features(n, k) = f_k(t_n).
Matrix assemble_quadratic_block(const Matrix& features);

/// prod_i (2 alpha_i + 1): number of monomials of degree <= 2 alpha.
std::size_t product_degree_budget(const MultiDegree& alpha);

/// Upper bound on the rank of any quadratic block built from this basis,
/// counted from the degrees of the products f_j f_k in the extending ring (with
/// the X^2 + Y^2 = 1 reduction for trigonometric bases). 2K - 1 for monomials,
/// complex exponentials and trigonometric bases of odd K.
/// Throws UnsupportedError for bases without degree metadata.
std::size_t max_quadratic_rank(const BasisFamily& basis);

/// N x (JK + K(K+1)/2): row n = [vec(g_n f_n^T)^T | scale * quad_row(f_n)^T].
Matrix assemble_stacked(const BilinearMeasurementSet& ms, double quadratic_scale = 1.0);

/// One entry p_j of a row appended to a full-rank matrix, as a function of time
/// with its ring degree.
struct RowTerm {
    std::function<double(double)> value;
    MultiDegree degree;
};

/// True when the last term's degree exceeds every other term's degree in at
/// least one variable.
bool last_degree_dominates(std::span<const RowTerm> row);

/// Appends new_col to the r x r matrix A, then the row [p_0(t) ... p_r(t)], and
/// reports whether the (r+1) x (r+1) result has full numerical rank.
///
/// Throws PreconditionError when A is not square and full rank, when sizes do
/// not match, or when the degree metadata is missing or inconsistent.
bool lemma3_extension_check(const Matrix& A, const Vector& new_col, std::span<const RowTerm> row,
                            double t, double rel_tol = kDefaultRankTolerance);

}  // namespace bqrec
