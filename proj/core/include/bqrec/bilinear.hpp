#pragma once

#include "bqrec/basis.hpp"
#include "bqrec/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace bqrec {

/// Measurements b_n = g_n^T C f_n where g_n is drawn from a set of M distinct
/// anchor vectors and f_n = f(t_n).
///
/// Construction validates shapes, anchor uniqueness and that no
/// (anchor, time) pair repeats; it does not check general position, which is
/// a precondition of theorem1_verdict instead.
class BilinearMeasurementSet {
public:
    /// Features are computed as eval_basis(basis, t_n).
    BilinearMeasurementSet(std::vector<Vector> anchors, std::vector<std::size_t> assignments,
                           std::vector<double> times, BasisFamily basis,
                           std::optional<Vector> b = std::nullopt);

    /// Caller-supplied features (row n = f_n), for feature maps that are not a
    /// plain basis evaluation such as per-machine integration limits.
    static BilinearMeasurementSet with_features(std::vector<Vector> anchors,
                                                std::vector<std::size_t> assignments,
                                                std::vector<double> times, Matrix features,
                                                BasisFamily basis,
                                                std::optional<Vector> b = std::nullopt);

    std::size_t J() const noexcept { return J_; }
    std::size_t K() const noexcept { return static_cast<std::size_t>(basis_.size()); }
    std::size_t N() const noexcept { return assignments_.size(); }
    std::size_t M() const noexcept { return anchors_.size(); }

    const std::vector<Vector>& anchors() const noexcept { return anchors_; }
    const std::vector<std::size_t>& assignments() const noexcept { return assignments_; }
    const std::vector<double>& times() const noexcept { return times_; }
    /// N x K, row n = f_n^T.
    const Matrix& features() const noexcept { return features_; }
    const BasisFamily& basis() const noexcept { return basis_; }
    const std::optional<Vector>& measurements() const noexcept { return b_; }

    const Vector& g(std::size_t n) const { return anchors_.at(assignments_.at(n)); }

    /// k_m: how many measurements use anchor m.
    std::vector<std::size_t> anchor_counts() const;

    /// Measurements restricted to the given row indices (anchors kept).
    BilinearMeasurementSet subset(const std::vector<std::size_t>& rows) const;

private:
    BilinearMeasurementSet(std::vector<Vector> anchors, std::vector<std::size_t> assignments,
                           std::vector<double> times, Matrix features, BasisFamily basis,
                           std::optional<Vector> b, int);
    void validate() const;

    std::size_t J_ = 0;
    std::vector<Vector> anchors_;
    std::vector<std::size_t> assignments_;
    std::vector<double> times_;
    Matrix features_;
    BasisFamily basis_;
    std::optional<Vector> b_;
};

/// Appends the measurements of b to a. Both sets must share anchors and basis.
BilinearMeasurementSet concatenate(const BilinearMeasurementSet& a,
                                   const BilinearMeasurementSet& b);

/// out[k J + j] = g[j] f[k], i.e. the column-major vectorisation of g f^T.
Vector vec_outer(const Vector& g, const Vector& f);

/// Inverse of the vectorisation: C(j, k) = x[k J + j].
Matrix unvec(const Vector& x, std::size_t J, std::size_t K);

/// Gamma: N x JK with row n = vec_outer(g_n, f_n)^T.
Matrix assemble_gamma(const BilinearMeasurementSet& ms);

/// Returns the first J-subset of anchors (or the full set when M < J) that is
/// numerically dependent, or nullopt when the anchors are in general position.
/// Exhaustive up to 1e5 subsets, 1000 seeded random subsets above.
std::optional<std::vector<std::size_t>> find_dependent_subset(
    const std::vector<Vector>& anchors, std::size_t J, double rel_tol = kDefaultRankTolerance,
    std::uint64_t seed = 0);

struct Theorem1Verdict {
    bool solvable = false;
    std::size_t lhs = 0;       ///< sum_m min(k_m, K)
    std::size_t required = 0;  ///< J K
    std::size_t deficit = 0;   ///< required - lhs when not solvable
    std::vector<std::size_t> counts;
    /// J K measurement indices, no anchor more than K times (empty if not solvable).
    std::vector<std::size_t> witness;
};

/// Solvability of the bilinear system: sum_m min(k_m, K) >= J K.
/// Throws PreconditionError naming the offending anchors if they are not in
/// general position.
Theorem1Verdict theorem1_verdict(const BilinearMeasurementSet& ms,
                                 double rel_tol = kDefaultRankTolerance);

struct BilinearSolution {
    Matrix C;  ///< J x K
    int rank = 0;
    double residual_norm = 0.0;
};

/// Least-squares solution of Gamma vec(C) = b over all rows.
/// Throws ArgumentError without measurements, NonUniqueSolutionError when the
/// verdict fails or Gamma has numerical rank below J K.
BilinearSolution solve_bilinear(const BilinearMeasurementSet& ms,
                                double rel_tol = kDefaultRankTolerance);

}  // namespace bqrec
