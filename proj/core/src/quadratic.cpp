#include "bqrec/quadratic.hpp"

#include "bqrec/errors.hpp"
#include "bqrec/rank.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace bqrec {

Vector svech(const Matrix& S) {
    if (S.rows() != S.cols()) {
        throw ArgumentError("svech: matrix must be square");
    }
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if (((S - S.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
        throw ArgumentError("svech: matrix is not symmetric");
    }
    const auto K = static_cast<std::size_t>(S.rows());
    Vector v(static_cast<Eigen::Index>(svech_size(K)));
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t r = 0; r <= c; ++r) {
            v[static_cast<Eigen::Index>(svech_index(r, c))] =
                S(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return v;
}

Matrix unsvech(const Vector& v, std::size_t K) {
    if (static_cast<std::size_t>(v.size()) != svech_size(K)) {
        throw ArgumentError("unsvech: length must be K(K+1)/2");
    }
    Matrix S(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t r = 0; r <= c; ++r) {
            const double x = v[static_cast<Eigen::Index>(svech_index(r, c))];
            S(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = x;
            S(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = x;
        }
    }
    return S;
}

Vector quad_row(const Vector& f) {
    const auto K = static_cast<std::size_t>(f.size());
    Vector row(static_cast<Eigen::Index>(svech_size(K)));
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t r = 0; r <= c; ++r) {
            const double p = f[static_cast<Eigen::Index>(r)] * f[static_cast<Eigen::Index>(c)];
            row[static_cast<Eigen::Index>(svech_index(r, c))] = r == c ? p : 2.0 * p;
        }
    }
    return row;
}

Matrix assemble_quadratic_block(const Matrix& features) {
    const auto K = static_cast<std::size_t>(features.cols());
    Matrix Q(features.rows(), static_cast<Eigen::Index>(svech_size(K)));
    for (Eigen::Index n = 0; n < features.rows(); ++n) {
        Q.row(n) = quad_row(features.row(n).transpose()).transpose();
    }
    return Q;
}

std::size_t product_degree_budget(const MultiDegree& alpha) {
    std::size_t budget = 1;
    for (int a : alpha) {
        if (a < 0) throw ArgumentError("degrees must be non-negative");
        budget *= static_cast<std::size_t>(2 * a + 1);
    }
    return budget;
}

std::size_t max_quadratic_rank(const BasisFamily& basis) {
    if (!basis.has_degrees()) {
        throw UnsupportedError("basis kind '" + std::string(to_string(basis.kind())) +
                               "' carries no ring-degree metadata");
    }
    const auto& deg = basis.degrees();
    const auto K = deg.size();
    std::size_t budget = 0;
    if (basis.kind() == BasisKind::TrigPolynomial) {
        // degrees are {deg_Y, deg_X}; reduce Y^2 = 1 - X^2
        int max_x_even = -1;
        int max_x_odd = -1;
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = i; j < K; ++j) {
                int y = deg[i][0] + deg[j][0];
                int x = deg[i][1] + deg[j][1];
                if (y == 2) {
                    y = 0;
                    x += 2;
                }
                if (y == 0) {
                    max_x_even = std::max(max_x_even, x);
                } else {
                    max_x_odd = std::max(max_x_odd, x);
                }
            }
        }
        budget = static_cast<std::size_t>(max_x_even + 1) + static_cast<std::size_t>(max_x_odd + 1);
    } else {
        std::set<MultiDegree> sums;
        for (std::size_t i = 0; i < K; ++i) {
            for (std::size_t j = i; j < K; ++j) {
                MultiDegree s(deg[i].size());
                for (std::size_t v = 0; v < s.size(); ++v) s[v] = deg[i][v] + deg[j][v];
                sums.insert(std::move(s));
            }
        }
        budget = sums.size();
    }
    return std::min(budget, svech_size(K));
}

Matrix assemble_stacked(const BilinearMeasurementSet& ms, double quadratic_scale) {
    const Matrix gamma = assemble_gamma(ms);
    const Matrix Q = assemble_quadratic_block(ms.features());
    Matrix S(gamma.rows(), gamma.cols() + Q.cols());
    S << gamma, quadratic_scale * Q;
    return S;
}

bool last_degree_dominates(std::span<const RowTerm> row) {
    if (row.empty()) return false;
    const auto& last = row.back().degree;
    for (std::size_t v = 0; v < last.size(); ++v) {
        bool dominates = true;
        for (std::size_t j = 0; j + 1 < row.size(); ++j) {
            if (row[j].degree[v] >= last[v]) {
                dominates = false;
                break;
            }
        }
        if (dominates) return true;
    }
    return false;
}

bool lemma3_extension_check(const Matrix& A, const Vector& new_col, std::span<const RowTerm> row,
                            double t, double rel_tol) {
    const Eigen::Index r = A.rows();
    if (A.cols() != r) {
        throw PreconditionError("lemma3_extension_check: A must be square");
    }
    if (new_col.size() != r || static_cast<Eigen::Index>(row.size()) != r + 1) {
        throw PreconditionError("lemma3_extension_check: column must have r entries and row r+1");
    }
    if (numerical_rank(A, rel_tol) != r) {
        throw PreconditionError("lemma3_extension_check: A is not full rank");
    }
    const std::size_t vars = row.back().degree.size();
    if (vars == 0) {
        throw PreconditionError("lemma3_extension_check: appended term has no degree metadata");
    }
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (row[j].degree.size() != vars || !row[j].value) {
            throw PreconditionError("lemma3_extension_check: degree metadata of term " +
                                        std::to_string(j) + " is missing or inconsistent",
                                    {j});
        }
    }
    Matrix ext(r + 1, r + 1);
    ext.topLeftCorner(r, r) = A;
    ext.topRightCorner(r, 1) = new_col;
    for (Eigen::Index j = 0; j <= r; ++j) {
        ext(r, j) = row[static_cast<std::size_t>(j)].value(t);
    }
    return numerical_rank(ext, rel_tol) == r + 1;
}

}  // namespace bqrec
