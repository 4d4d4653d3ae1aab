#include "bqrec/localization.hpp"

#include "bqrec/errors.hpp"
#include "bqrec/quadratic.hpp"
#include "bqrec/rank.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace bqrec {
namespace {

std::vector<Vector> homogenize(const std::vector<Vector>& anchors) {
    std::vector<Vector> g;
    g.reserve(anchors.size());
    for (const auto& a : anchors) {
        Vector h(a.size() + 1);
        h << a, 1.0;
        g.push_back(std::move(h));
    }
    return g;
}

std::vector<std::size_t> assign(const AssignmentPolicy& policy, std::size_t M, std::size_t N,
                                std::mt19937_64& rng) {
    std::vector<std::size_t> out(N);
    switch (policy.kind) {
        case AssignmentPolicy::Kind::RoundRobin:
            for (std::size_t n = 0; n < N; ++n) out[n] = n % M;
            break;
        case AssignmentPolicy::Kind::Random: {
            std::uniform_int_distribution<std::size_t> pick(0, M - 1);
            for (auto& m : out) m = pick(rng);
            break;
        }
        case AssignmentPolicy::Kind::Explicit:
            if (policy.anchors.size() != N) {
                throw ArgumentError("explicit assignment list must have one entry per measurement");
            }
            for (std::size_t n = 0; n < N; ++n) {
                if (policy.anchors[n] >= M) {
                    throw ArgumentError("assignment policy uses anchor " +
                                        std::to_string(policy.anchors[n]) + " but only " +
                                        std::to_string(M) + " anchors exist");
                }
                out[n] = policy.anchors[n];
            }
            break;
    }
    return out;
}

}  // namespace

Scenario::Scenario(BasisFamily basis, std::vector<Vector> anchors,
                   std::vector<RangeMeasurement> measurements, std::optional<Matrix> C_true)
    : basis_(std::move(basis)),
      anchors_(std::move(anchors)),
      measurements_(std::move(measurements)),
      C_true_(std::move(C_true)) {
    if (anchors_.empty()) {
        throw ArgumentError("scenario needs at least one anchor");
    }
    D_ = static_cast<std::size_t>(anchors_.front().size());
    if (D_ == 0) {
        throw ArgumentError("anchors must have positive dimension");
    }
    for (std::size_t m = 0; m < anchors_.size(); ++m) {
        if (static_cast<std::size_t>(anchors_[m].size()) != D_ || !anchors_[m].allFinite()) {
            throw ArgumentError("anchor " + std::to_string(m) + " is malformed");
        }
    }
    if (auto bad = find_dependent_subset(homogenize(anchors_), D_ + 1)) {
        throw PreconditionError("anchors are not in affine general position", *bad);
    }
    for (std::size_t n = 0; n < measurements_.size(); ++n) {
        const auto& r = measurements_[n];
        if (r.anchor >= anchors_.size()) {
            throw ArgumentError("measurement " + std::to_string(n) + " refers to a missing anchor");
        }
        if (!std::isfinite(r.distance) || r.distance < 0.0) {
            throw DomainError("measurement " + std::to_string(n) + " has an invalid distance");
        }
        if (!basis_.interval().contains(r.time)) {
            throw DomainError("measurement " + std::to_string(n) + " lies outside the interval");
        }
    }
    if (C_true_ && (static_cast<std::size_t>(C_true_->rows()) != D_ ||
                    C_true_->cols() != basis_.size())) {
        throw ArgumentError("C_true must be D x K");
    }
}

std::vector<std::size_t> Scenario::anchor_counts() const {
    std::vector<std::size_t> counts(anchors_.size(), 0);
    for (const auto& r : measurements_) ++counts[r.anchor];
    return counts;
}

Scenario simulate_scenario(const SimulationSpec& spec) {
    if (spec.D == 0 || spec.N == 0) {
        throw ArgumentError("simulate_scenario: D and N must be positive");
    }
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto K = static_cast<Eigen::Index>(spec.basis.size());
    const auto D = static_cast<Eigen::Index>(spec.D);

    Matrix C(D, K);
    if (spec.C_true) {
        C = *spec.C_true;
    } else {
        for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = normal(rng);
    }

    std::vector<Vector> anchors;
    if (spec.anchors) {
        anchors = *spec.anchors;
    } else {
        if (spec.M < spec.D + 1) {
            throw ArgumentError("simulate_scenario: need at least D + 1 anchors");
        }
        std::uniform_real_distribution<double> box(-spec.anchor_extent, spec.anchor_extent);
        for (int attempt = 0;; ++attempt) {
            if (attempt == 1000) {
                throw ConfigurationError("could not draw anchors in general position");
            }
            anchors.assign(spec.M, Vector(D));
            for (auto& a : anchors) {
                for (Eigen::Index d = 0; d < D; ++d) a[d] = box(rng);
            }
            if (!find_dependent_subset(homogenize(anchors), spec.D + 1, 1e-6)) break;
        }
    }
    const std::size_t M = anchors.size();

    const auto assignment = assign(spec.policy, M, spec.N, rng);
    const auto times = sample_times(spec.basis.interval(), spec.N, rng());
    std::vector<RangeMeasurement> meas;
    meas.reserve(spec.N);
    for (std::size_t n = 0; n < spec.N; ++n) {
        const Vector r = C * eval_basis(spec.basis, times[n]);
        meas.push_back({assignment[n], times[n], (anchors[assignment[n]] - r).norm()});
    }
    return Scenario(spec.basis, std::move(anchors), std::move(meas), C);
}

Vector linearized_measurements(const Scenario& scenario) {
    Vector b(static_cast<Eigen::Index>(scenario.N()));
    for (std::size_t n = 0; n < scenario.N(); ++n) {
        const auto& r = scenario.measurements()[n];
        b[static_cast<Eigen::Index>(n)] =
            0.5 * (scenario.anchors()[r.anchor].squaredNorm() - r.distance * r.distance);
    }
    return b;
}

Corollary2Report corollary2_check(const Scenario& scenario) {
    Corollary2Report rep;
    const std::size_t K = scenario.K();
    const std::size_t D = scenario.D();
    rep.counts = scenario.anchor_counts();
    for (auto k : rep.counts) rep.lhs += std::min(k, K);
    rep.required = K * (D + 1);
    rep.total_required = D * K + max_quadratic_rank(scenario.basis());
    rep.N = scenario.N();
    rep.ok = rep.N >= rep.total_required && rep.lhs >= rep.required;
    return rep;
}

TrajectoryEstimate localize(const Scenario& scenario, double rel_tol) {
    const std::size_t D = scenario.D();
    const std::size_t K = scenario.K();
    const std::size_t J = D + 1;

    std::vector<std::size_t> assignment;
    std::vector<double> times;
    for (const auto& r : scenario.measurements()) {
        assignment.push_back(r.anchor);
        times.push_back(r.time);
    }
    const Vector b = linearized_measurements(scenario);
    const BilinearMeasurementSet ms(homogenize(scenario.anchors()), assignment, times,
                                    scenario.basis(), b);

    const auto check = corollary2_check(scenario);
    const Matrix stacked = assemble_stacked(ms, -0.5);

    TrajectoryEstimate est;
    auto& rr = est.rank_report;
    rr.rows = stacked.rows() > 0 ? static_cast<std::size_t>(stacked.rows()) : 0;
    rr.columns = static_cast<std::size_t>(stacked.cols());
    rr.required = static_cast<int>(check.total_required);
    rr.rank = numerical_rank(stacked, rel_tol);
    rr.bilinear_rank = numerical_rank(assemble_gamma(ms), rel_tol);

    if (!check.ok || rr.rank < rr.required) {
        throw NonUniqueSolutionError(
            "trajectory is not uniquely determined: stacked rank " + std::to_string(rr.rank) +
                " (required " + std::to_string(rr.required) + "), sum min(k_m, K) = " +
                std::to_string(check.lhs) + " (required " + std::to_string(check.required) + ")",
            rr.rank, rr.required);
    }

    const auto ls = solve_least_squares(stacked, b, rel_tol);
    est.residual = ls.residual_norm;
    const Matrix bilinear = unvec(ls.x.head(static_cast<Eigen::Index>(J * K)), J, K);
    est.C_hat = bilinear.topRows(static_cast<Eigen::Index>(D));

    // Quadratic form measured by each row once the bilinear part is known.
    const Matrix& F = ms.features();
    Vector quad_values(F.rows());
    for (Eigen::Index n = 0; n < F.rows(); ++n) {
        const Vector& a = scenario.anchors()[assignment[static_cast<std::size_t>(n)]];
        quad_values[n] = -2.0 * (b[n] - a.dot(est.C_hat * F.row(n).transpose()));
    }
    const Matrix Q = assemble_quadratic_block(F);
    const Matrix L0 = est.C_hat.transpose() * est.C_hat;
    const Vector l0 = svech(L0);
    const Vector mismatch = quad_values - Q * l0;
    est.quadratic_consistency = mismatch.size() ? mismatch.cwiseAbs().maxCoeff() : 0.0;
    const auto correction = solve_least_squares(Q, mismatch, rel_tol);
    est.L_hat = unsvech(l0 + correction.x, K);
    return est;
}

Matrix eval_trajectory(const Matrix& C, const BasisFamily& basis, const std::vector<double>& times) {
    if (C.cols() != basis.size()) {
        throw ArgumentError("eval_trajectory: C must have K columns");
    }
    return C * eval_basis_columns(basis, times);
}

ExtensionChainReport localization_extension_chain(const BasisFamily& basis,
                                                  const std::vector<Vector>& anchors,
                                                  std::uint64_t seed, double rel_tol) {
    if (basis.kind() != BasisKind::Monomial) {
        throw UnsupportedError("extension chain is implemented for monomial bases");
    }
    if (anchors.empty()) {
        throw ArgumentError("extension chain needs anchors");
    }
    const auto D = static_cast<std::size_t>(anchors.front().size());
    const std::size_t J = D + 1;
    const auto K = static_cast<std::size_t>(basis.size());
    if (anchors.size() < J) {
        throw ArgumentError("extension chain needs at least D + 1 anchors");
    }
    const auto g = homogenize(anchors);
    const std::size_t base = K * J;
    const std::size_t extra = K - 1;
    const auto times = sample_times(basis.interval(), base + extra, seed);
    // shuffle the base rows
    std::vector<double> order = times;
    std::shuffle(order.begin(), order.end(), std::mt19937_64(seed ^ 0x9e3779b97f4a7c15ULL));

    std::vector<std::size_t> assignment;
    for (std::size_t n = 0; n < base; ++n) assignment.push_back(n % J);

    Matrix A(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(base));
    for (std::size_t n = 0; n < base; ++n) {
        A.row(static_cast<Eigen::Index>(n)) =
            vec_outer(g[assignment[n]], eval_basis(basis, order[n])).transpose();
    }

    ExtensionChainReport rep;
    rep.base_full_rank = numerical_rank(A, rel_tol) == static_cast<int>(base);
    if (!rep.base_full_rank) return rep;

    std::vector<double> row_times(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(base));
    for (std::size_t s = 0; s < extra; ++s) {
        const int degree = static_cast<int>(K + s);
        const std::size_t r = static_cast<std::size_t>(A.rows());
        Vector col(A.rows());
        for (std::size_t n = 0; n < r; ++n) col[static_cast<Eigen::Index>(n)] = std::pow(row_times[n], degree);

        const std::size_t anchor = s % g.size();
        std::vector<RowTerm> row;
        row.reserve(r + 1);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t j = 0; j < J; ++j) {
                const double coeff = g[anchor][static_cast<Eigen::Index>(j)];
                const int pk = static_cast<int>(k);
                row.push_back({[coeff, pk](double t) { return coeff * std::pow(t, pk); }, {pk}});
            }
        }
        for (int d = static_cast<int>(K); d <= degree; ++d) {
            row.push_back({[d](double t) { return std::pow(t, d); }, {d}});
        }
        const double t = order[base + s];
        rep.degrees.push_back(degree);
        rep.dominating.push_back(last_degree_dominates(row));
        const bool ok = lemma3_extension_check(A, col, row, t, rel_tol);
        rep.full_rank.push_back(ok);
        if (!ok) break;

        Matrix next(r + 1, r + 1);
        next.topLeftCorner(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = A;
        next.topRightCorner(static_cast<Eigen::Index>(r), 1) = col;
        for (std::size_t j = 0; j <= r; ++j) next(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = row[j].value(t);
        A = std::move(next);
        row_times.push_back(t);
    }
    return rep;
}

}  // namespace bqrec
