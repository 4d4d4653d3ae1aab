#include "bqrec/bilinear.hpp"

#include "bqrec/errors.hpp"
#include "bqrec/rank.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>

namespace bqrec {
namespace {

Matrix features_from_basis(const BasisFamily& basis, const std::vector<double>& times) {
    Matrix F(static_cast<Eigen::Index>(times.size()), basis.size());
    for (std::size_t n = 0; n < times.size(); ++n) {
        F.row(static_cast<Eigen::Index>(n)) = eval_basis(basis, times[n]).transpose();
    }
    return F;
}

double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return r;
}

bool subset_dependent(const std::vector<Vector>& anchors, const std::vector<std::size_t>& idx,
                      double rel_tol) {
    Matrix S(anchors.front().size(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        S.col(static_cast<Eigen::Index>(c)) = anchors[idx[c]];
    }
    return numerical_rank(S, rel_tol) < static_cast<int>(idx.size());
}

}  // namespace

BilinearMeasurementSet::BilinearMeasurementSet(std::vector<Vector> anchors,
                                               std::vector<std::size_t> assignments,
                                               std::vector<double> times, BasisFamily basis,
                                               std::optional<Vector> b)
    : BilinearMeasurementSet(std::move(anchors), std::move(assignments), times,
                             features_from_basis(basis, times), basis, std::move(b), 0) {}

BilinearMeasurementSet::BilinearMeasurementSet(std::vector<Vector> anchors,
                                               std::vector<std::size_t> assignments,
                                               std::vector<double> times, Matrix features,
                                               BasisFamily basis, std::optional<Vector> b, int)
    : anchors_(std::move(anchors)),
      assignments_(std::move(assignments)),
      times_(std::move(times)),
      features_(std::move(features)),
      basis_(std::move(basis)),
      b_(std::move(b)) {
    J_ = anchors_.empty() ? 0 : static_cast<std::size_t>(anchors_.front().size());
    validate();
}

BilinearMeasurementSet BilinearMeasurementSet::with_features(std::vector<Vector> anchors,
                                                             std::vector<std::size_t> assignments,
                                                             std::vector<double> times,
                                                             Matrix features, BasisFamily basis,
                                                             std::optional<Vector> b) {
    return BilinearMeasurementSet(std::move(anchors), std::move(assignments), std::move(times),
                                  std::move(features), std::move(basis), std::move(b), 0);
}

void BilinearMeasurementSet::validate() const {
    if (anchors_.empty()) {
        throw ArgumentError("measurement set needs at least one anchor");
    }
    if (J_ == 0) {
        throw ArgumentError("anchors must have positive dimension");
    }
    for (std::size_t m = 0; m < anchors_.size(); ++m) {
        if (static_cast<std::size_t>(anchors_[m].size()) != J_) {
            throw ArgumentError("anchor " + std::to_string(m) + " has the wrong dimension");
        }
        if (!anchors_[m].allFinite()) {
            throw DomainError("anchor " + std::to_string(m) + " has non-finite entries");
        }
        for (std::size_t p = 0; p < m; ++p) {
            if (anchors_[p] == anchors_[m]) {
                throw ArgumentError("anchors " + std::to_string(p) + " and " + std::to_string(m) +
                                    " are equal");
            }
        }
    }
    const std::size_t N = assignments_.size();
    if (times_.size() != N) {
        throw ArgumentError("assignments and times differ in length");
    }
    if (static_cast<std::size_t>(features_.rows()) != N ||
        features_.cols() != static_cast<Eigen::Index>(basis_.size())) {
        throw ArgumentError("feature matrix must be N x K");
    }
    if (!features_.allFinite()) {
        throw DomainError("feature matrix has non-finite entries");
    }
    std::set<std::pair<std::size_t, double>> seen;
    for (std::size_t n = 0; n < N; ++n) {
        if (assignments_[n] >= anchors_.size()) {
            throw ArgumentError("measurement " + std::to_string(n) + " refers to anchor " +
                                std::to_string(assignments_[n]) + " of " +
                                std::to_string(anchors_.size()));
        }
        if (!seen.emplace(assignments_[n], times_[n]).second) {
            throw ArgumentError("measurement " + std::to_string(n) +
                                " repeats an (anchor, time) pair");
        }
    }
    if (b_ && static_cast<std::size_t>(b_->size()) != N) {
        throw ArgumentError("measurement vector b must have N entries");
    }
}

std::vector<std::size_t> BilinearMeasurementSet::anchor_counts() const {
    std::vector<std::size_t> counts(anchors_.size(), 0);
    for (auto m : assignments_) {
        ++counts[m];
    }
    return counts;
}

BilinearMeasurementSet BilinearMeasurementSet::subset(const std::vector<std::size_t>& rows) const {
    std::vector<std::size_t> assignments;
    std::vector<double> times;
    Matrix F(static_cast<Eigen::Index>(rows.size()), features_.cols());
    std::optional<Vector> b;
    if (b_) b = Vector(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t n = rows[i];
        if (n >= N()) {
            throw ArgumentError("subset: row index out of range");
        }
        assignments.push_back(assignments_[n]);
        times.push_back(times_[n]);
        F.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(n));
        if (b) (*b)[static_cast<Eigen::Index>(i)] = (*b_)[static_cast<Eigen::Index>(n)];
    }
    return BilinearMeasurementSet(anchors_, std::move(assignments), std::move(times), std::move(F),
                                  basis_, std::move(b), 0);
}

BilinearMeasurementSet concatenate(const BilinearMeasurementSet& a,
                                   const BilinearMeasurementSet& b) {
    if (a.anchors() != b.anchors() || a.K() != b.K() || a.basis().kind() != b.basis().kind()) {
        throw ArgumentError("concatenate: measurement sets must share anchors and basis");
    }
    if (a.measurements().has_value() != b.measurements().has_value()) {
        throw ArgumentError("concatenate: either both or neither set carries measurements");
    }
    auto assignments = a.assignments();
    assignments.insert(assignments.end(), b.assignments().begin(), b.assignments().end());
    auto times = a.times();
    times.insert(times.end(), b.times().begin(), b.times().end());
    Matrix F(a.features().rows() + b.features().rows(), a.features().cols());
    F << a.features(), b.features();
    std::optional<Vector> meas;
    if (a.measurements()) {
        meas = Vector(a.measurements()->size() + b.measurements()->size());
        *meas << *a.measurements(), *b.measurements();
    }
    return BilinearMeasurementSet::with_features(a.anchors(), std::move(assignments),
                                                 std::move(times), std::move(F), a.basis(),
                                                 std::move(meas));
}

Vector vec_outer(const Vector& g, const Vector& f) {
    const Eigen::Index J = g.size();
    Vector out(J * f.size());
    for (Eigen::Index k = 0; k < f.size(); ++k) {
        out.segment(k * J, J) = g * f[k];
    }
    return out;
}

Matrix unvec(const Vector& x, std::size_t J, std::size_t K) {
    if (static_cast<std::size_t>(x.size()) != J * K) {
        throw ArgumentError("unvec: vector length must be J*K");
    }
    return Eigen::Map<const Matrix>(x.data(), static_cast<Eigen::Index>(J),
                                    static_cast<Eigen::Index>(K));
}

Matrix assemble_gamma(const BilinearMeasurementSet& ms) {
    const auto J = static_cast<Eigen::Index>(ms.J());
    const auto K = static_cast<Eigen::Index>(ms.K());
    Matrix G(static_cast<Eigen::Index>(ms.N()), J * K);
    for (std::size_t n = 0; n < ms.N(); ++n) {
        G.row(static_cast<Eigen::Index>(n)) =
            vec_outer(ms.g(n), ms.features().row(static_cast<Eigen::Index>(n)).transpose())
                .transpose();
    }
    return G;
}

std::optional<std::vector<std::size_t>> find_dependent_subset(const std::vector<Vector>& anchors,
                                                              std::size_t J, double rel_tol,
                                                              std::uint64_t seed) {
    const std::size_t M = anchors.size();
    if (M == 0) return std::nullopt;
    const std::size_t r = std::min(M, J);
    if (binomial(M, r) <= 1e5) {
        // lexicographic walk over r-combinations
        std::vector<std::size_t> idx(r);
        std::iota(idx.begin(), idx.end(), 0);
        while (true) {
            if (subset_dependent(anchors, idx, rel_tol)) return idx;
            std::ptrdiff_t i = static_cast<std::ptrdiff_t>(r) - 1;
            while (i >= 0 && idx[i] == M - r + static_cast<std::size_t>(i)) --i;
            if (i < 0) break;
            ++idx[i];
            for (std::size_t j = static_cast<std::size_t>(i) + 1; j < r; ++j) idx[j] = idx[j - 1] + 1;
        }
        return std::nullopt;
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> all(M);
    std::iota(all.begin(), all.end(), 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<std::size_t> idx;
        std::sample(all.begin(), all.end(), std::back_inserter(idx), r, rng);
        if (subset_dependent(anchors, idx, rel_tol)) return idx;
    }
    return std::nullopt;
}

Theorem1Verdict theorem1_verdict(const BilinearMeasurementSet& ms, double rel_tol) {
    if (auto bad = find_dependent_subset(ms.anchors(), ms.J(), rel_tol)) {
        throw PreconditionError("anchors are not in general position", *bad);
    }
    Theorem1Verdict v;
    v.counts = ms.anchor_counts();
    v.required = ms.J() * ms.K();
    for (auto k : v.counts) {
        v.lhs += std::min(k, ms.K());
    }
    v.solvable = v.lhs >= v.required;
    if (!v.solvable) {
        v.deficit = v.required - v.lhs;
        return v;
    }
    // greedy by anchor order, measurement order within an anchor
    for (std::size_t m = 0; m < ms.M() && v.witness.size() < v.required; ++m) {
        std::size_t taken = 0;
        for (std::size_t n = 0; n < ms.N() && taken < ms.K() && v.witness.size() < v.required;
             ++n) {
            if (ms.assignments()[n] == m) {
                v.witness.push_back(n);
                ++taken;
            }
        }
    }
    std::sort(v.witness.begin(), v.witness.end());
    return v;
}

BilinearSolution solve_bilinear(const BilinearMeasurementSet& ms, double rel_tol) {
    if (!ms.measurements()) {
        throw ArgumentError("solve_bilinear: measurement set carries no b values");
    }
    const int required = static_cast<int>(ms.J() * ms.K());
    const Matrix gamma = assemble_gamma(ms);
    const auto verdict = theorem1_verdict(ms, rel_tol);
    if (!verdict.solvable) {
        throw NonUniqueSolutionError(
            "bilinear system is not solvable: sum of capped anchor counts " +
                std::to_string(verdict.lhs) + " < " + std::to_string(verdict.required),
            numerical_rank(gamma, rel_tol), required);
    }
    const int rank = numerical_rank(gamma, rel_tol);
    if (rank < required) {
        throw NonUniqueSolutionError("Gamma has numerical rank " + std::to_string(rank) + " < " +
                                         std::to_string(required),
                                     rank, required);
    }
    const auto ls = solve_least_squares(gamma, *ms.measurements(), rel_tol);
    return BilinearSolution{unvec(ls.x, ms.J(), ms.K()), rank, ls.residual_norm};
}

}  // namespace bqrec
