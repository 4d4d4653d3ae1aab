#pragma once

#include "bqrec/basis.hpp"
#include "bqrec/bilinear.hpp"
#include "bqrec/types.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace bqrec {

struct RangeMeasurement {
    std::size_t anchor = 0;
    double time = 0.0;
    double distance = 0.0;
};

/// A device moving on r(t) = C f(t) in R^D with range measurements to one of M
/// fixed anchors at each sampling time.
///
/// Construction rejects anchors with D + 1 members in a common affine
/// subspace (PreconditionError naming the subset), negative or non-finite
/// distances, and times outside the basis interval.
class Scenario {
public:
    Scenario(BasisFamily basis, std::vector<Vector> anchors,
             std::vector<RangeMeasurement> measurements,
             std::optional<Matrix> C_true = std::nullopt);

    std::size_t D() const noexcept { return D_; }
    std::size_t K() const noexcept { return static_cast<std::size_t>(basis_.size()); }
    std::size_t M() const noexcept { return anchors_.size(); }
    std::size_t N() const noexcept { return measurements_.size(); }

    const BasisFamily& basis() const noexcept { return basis_; }
    const std::vector<Vector>& anchors() const noexcept { return anchors_; }
    const std::vector<RangeMeasurement>& measurements() const noexcept { return measurements_; }
    const std::optional<Matrix>& C_true() const noexcept { return C_true_; }

    std::vector<std::size_t> anchor_counts() const;

private:
    std::size_t D_ = 0;
    BasisFamily basis_;
    std::vector<Vector> anchors_;
    std::vector<RangeMeasurement> measurements_;
    std::optional<Matrix> C_true_;
};

/// Which anchor each simulated measurement uses.
struct AssignmentPolicy {
    enum class Kind { RoundRobin, Random, Explicit };
    Kind kind = Kind::RoundRobin;
    std::vector<std::size_t> anchors;  ///< Explicit only; one entry per measurement

    static AssignmentPolicy round_robin() { return {}; }
    static AssignmentPolicy random() { return {Kind::Random, {}}; }
    static AssignmentPolicy explicit_list(std::vector<std::size_t> list) {
        return {Kind::Explicit, std::move(list)};
    }
};

struct SimulationSpec {
    std::size_t D = 2;
    BasisFamily basis = BasisFamily::monomial(3);
    std::size_t M = 4;
    std::size_t N = 11;
    AssignmentPolicy policy;
    std::uint64_t seed = 0;
    /// Random anchors are uniform in [-extent, extent]^D.
    double anchor_extent = 5.0;
    std::optional<std::vector<Vector>> anchors;  ///< overrides the random anchors
    std::optional<Matrix> C_true;                ///< overrides the N(0, 1) draw
};

/// Draws C_true ~ N(0, 1) (D x K), anchors in general position (rejection
/// sampling), sample_times for the measurement times and exact distances
/// d_n = |a_{m_n} - C_true f(t_n)|. Throws ArgumentError when M < D + 1 for
/// random anchors or an explicit policy references an anchor >= M.
Scenario simulate_scenario(const SimulationSpec& spec);

/// b_n = (|a_{m_n}|^2 - d_n^2) / 2.
Vector linearized_measurements(const Scenario& scenario);

struct Corollary2Report {
    bool ok = false;
    std::size_t lhs = 0;             ///< sum_m min(k_m, K)
    std::size_t required = 0;        ///< K (D + 1)
    std::size_t total_required = 0;  ///< D K + max_quadratic_rank; K (D + 2) - 1 for monomials
    std::size_t N = 0;
    std::vector<std::size_t> counts;
};

/// ok iff N >= total_required and sum_m min(k_m, K) >= K (D + 1).
Corollary2Report corollary2_check(const Scenario& scenario);

struct StackedRankReport {
    int rank = 0;
    int required = 0;
    int bilinear_rank = 0;
    std::size_t rows = 0;
    std::size_t columns = 0;
};

struct TrajectoryEstimate {
    Matrix C_hat;  ///< D x K
    Matrix L_hat;  ///< K x K, symmetric
    double residual = 0.0;
    /// max_n |f_n^T C_hat^T C_hat f_n - (-2)(b_n - a_n^T C_hat f_n)|: agreement of
    /// the measured quadratic form with the dropped constraint L = C^T C.
    double quadratic_consistency = 0.0;
    StackedRankReport rank_report;
};

/// Homogenises anchors as g_n = [a_{m_n}; 1], stacks the bilinear block with
/// the quadratic block scaled by -1/2 and solves the linear system.
///
/// C_hat is read from the minimum-norm solution; it is unique whenever the
/// stacked rank reaches D K + max_quadratic_rank. The quadratic form f^T L f is
/// identified but, for K >= 3, L itself is not: L_hat is the matrix closest to
/// C_hat^T C_hat among those reproducing the measured quadratic form.
///
/// Throws NonUniqueSolutionError (with the stacked rank) when the measurement
/// condition fails or the stacked rank is short.
TrajectoryEstimate localize(const Scenario& scenario, double rel_tol = kDefaultRankTolerance);

/// D x T matrix; column i is C f(times[i]).
Matrix eval_trajectory(const Matrix& C, const BasisFamily& basis, const std::vector<double>& times);

struct ExtensionChainReport {
    bool base_full_rank = false;
    std::vector<int> degrees;      ///< degree of the appended quadratic column per step
    std::vector<bool> full_rank;   ///< rank result per step
    std::vector<bool> dominating;  ///< degree precondition per step
};

/// Builds the K (D + 1) square bilinear system of the localization problem
/// (round-robin over the first D + 1 anchors, K times each) and appends the
/// quadratic columns t^K, ..., t^{2K-2} one at a time, each with a new
/// measurement row, checking full rank after every step. Monomial bases only.
ExtensionChainReport localization_extension_chain(const BasisFamily& basis,
                                                  const std::vector<Vector>& anchors,
                                                  std::uint64_t seed,
                                                  double rel_tol = kDefaultRankTolerance);

}  // namespace bqrec
