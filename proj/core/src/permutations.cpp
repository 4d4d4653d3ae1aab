#include "bqrec/permutations.hpp"

#include "bqrec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bqrec {
namespace {

void require_block_division(std::size_t N, std::size_t J) {
    if (J == 0 || N % J != 0) {
        throw ArgumentError("block width " + std::to_string(J) + " does not divide " +
                            std::to_string(N));
    }
}

std::uint64_t factorial(std::size_t n) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

// Recursively picks each block as an increasing J-combination of the unused
// values, in lexicographic order.
void build_representatives(std::size_t J, std::vector<int>& prefix, std::vector<bool>& used,
                           std::size_t N, std::vector<std::vector<int>>& out) {
    if (prefix.size() == N) {
        out.push_back(prefix);
        return;
    }
    const std::size_t block_start = prefix.size();
    // choose the next element of the current block
    const std::size_t pos_in_block = block_start % J;
    const int min_value = pos_in_block == 0 ? 0 : prefix.back() + 1;
    for (int v = min_value; v < static_cast<int>(N); ++v) {
        if (used[v]) continue;
        used[v] = true;
        prefix.push_back(v);
        build_representatives(J, prefix, used, N, out);
        prefix.pop_back();
        used[v] = false;
    }
}

__extension__ using Int128 = __int128;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar direct_det(const DenseMatrix<Scalar>& M);

template <>
std::int64_t direct_det<std::int64_t>(const IntMatrix& M) {
    return bareiss_determinant(M);
}

template <>
double direct_det<double>(const Matrix& M) {
    return lu_determinant(M);
}

template <typename Scalar>
Scalar checked_accumulate(Scalar acc, Scalar term) {
    if constexpr (std::is_integral_v<Scalar>) {
        Scalar out{};
        if (__builtin_add_overflow(acc, term, &out)) {
            throw DomainError("integer determinant overflow");
        }
        return out;
    } else {
        return acc + term;
    }
}

template <typename Scalar>
Scalar checked_multiply(Scalar a, Scalar b) {
    if constexpr (std::is_integral_v<Scalar>) {
        Scalar out{};
        if (__builtin_mul_overflow(a, b, &out)) {
            throw DomainError("integer determinant overflow");
        }
        return out;
    } else {
        return a * b;
    }
}

template <typename Scalar>
Scalar det_by_blocks_impl(const DenseMatrix<Scalar>& M, std::size_t J, std::size_t K,
                          std::size_t max_size) {
    const std::size_t N = J * K;
    if (M.rows() != M.cols() || static_cast<std::size_t>(M.rows()) != N) {
        throw ArgumentError("det_by_blocks: expected a " + std::to_string(N) + "x" +
                            std::to_string(N) + " matrix");
    }
    if (N == 0) {
        return Scalar{1};
    }
    const auto classes = enumerate_classes(N, J, max_size);
    DenseMatrix<Scalar> block(J, J);
    Scalar total{0};
    for (const auto& cls : classes) {
        Scalar product{1};
        for (std::size_t k = 0; k < K && product != Scalar{0}; ++k) {
            for (std::size_t r = 0; r < J; ++r) {
                for (std::size_t c = 0; c < J; ++c) {
                    block(r, c) = M(k * J + r, cls.representative[k * J + c]);
                }
            }
            product = checked_multiply(product, direct_det<Scalar>(block));
        }
        total = checked_accumulate(total, cls.sign > 0 ? product : -product);
    }
    return total;
}

}  // namespace

Permutation::Permutation(std::vector<int> entries) : entries_(std::move(entries)) {
    std::vector<bool> seen(entries_.size(), false);
    for (int v : entries_) {
        if (v < 0 || static_cast<std::size_t>(v) >= entries_.size() || seen[v]) {
            throw ArgumentError("not a permutation of 0..N-1");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t N) {
    std::vector<int> e(N);
    std::iota(e.begin(), e.end(), 0);
    return Permutation(std::move(e));
}

int perm_sign(const Permutation& p) {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        for (std::size_t j = i + 1; j < p.size(); ++j) {
            if (p[i] > p[j]) ++inversions;
        }
    }
    return inversions % 2 == 0 ? 1 : -1;
}

Permutation class_representative(const Permutation& p, std::size_t J) {
    require_block_division(p.size(), J);
    auto e = p.entries();
    for (std::size_t start = 0; start < e.size(); start += J) {
        std::sort(e.begin() + static_cast<std::ptrdiff_t>(start),
                  e.begin() + static_cast<std::ptrdiff_t>(start + J));
    }
    return Permutation(std::move(e));
}

bool equivalent(const Permutation& p, const Permutation& q, std::size_t J) {
    if (p.size() != q.size()) {
        throw ArgumentError("equivalent: permutations of different length");
    }
    require_block_division(p.size(), J);
    return class_representative(p, J) == class_representative(q, J);
}

std::uint64_t EquivClass::size() const {
    std::uint64_t s = 1;
    const std::uint64_t fj = factorial(J);
    for (std::size_t k = 0; k < K; ++k) {
        s *= fj;
    }
    return s;
}

std::vector<EquivClass> enumerate_classes(std::size_t N, std::size_t J, std::size_t max_size) {
    require_block_division(N, J);
    if (N > max_size) {
        throw ResourceError("enumerate_classes: N = " + std::to_string(N) +
                            " exceeds the enumeration cap " + std::to_string(max_size) +
                            " (cost grows like N!)");
    }
    std::vector<std::vector<int>> reps;
    std::vector<int> prefix;
    prefix.reserve(N);
    std::vector<bool> used(N, false);
    build_representatives(J, prefix, used, N, reps);

    std::vector<EquivClass> classes;
    classes.reserve(reps.size());
    for (auto& r : reps) {
        Permutation rep(std::move(r));
        const int s = perm_sign(rep);
        classes.push_back(EquivClass{std::move(rep), J, N / J, s});
    }
    return classes;
}

std::vector<Permutation> expand_class(const EquivClass& cls) {
    const std::size_t J = cls.J;
    const std::size_t K = cls.K;
    std::vector<std::vector<int>> partial{cls.representative.entries()};
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<std::vector<int>> next;
        next.reserve(partial.size() * factorial(J));
        for (const auto& base : partial) {
            std::vector<int> block(base.begin() + static_cast<std::ptrdiff_t>(k * J),
                                   base.begin() + static_cast<std::ptrdiff_t>((k + 1) * J));
            std::sort(block.begin(), block.end());
            do {
                auto member = base;
                std::copy(block.begin(), block.end(),
                          member.begin() + static_cast<std::ptrdiff_t>(k * J));
                next.push_back(std::move(member));
            } while (std::next_permutation(block.begin(), block.end()));
        }
        partial = std::move(next);
    }
    std::vector<Permutation> out;
    out.reserve(partial.size());
    for (auto& e : partial) {
        out.emplace_back(std::move(e));
    }
    return out;
}

std::int64_t bareiss_determinant(const IntMatrix& M) {
    if (M.rows() != M.cols()) {
        throw ArgumentError("determinant of a non-square matrix");
    }
    const Eigen::Index n = M.rows();
    if (n == 0) return 1;
    IntMatrix A = M;
    int sign = 1;
    std::int64_t prev = 1;
    for (Eigen::Index k = 0; k < n - 1; ++k) {
        if (A(k, k) == 0) {
            Eigen::Index swap = -1;
            for (Eigen::Index i = k + 1; i < n; ++i) {
                if (A(i, k) != 0) {
                    swap = i;
                    break;
                }
            }
            if (swap < 0) return 0;
            A.row(k).swap(A.row(swap));
            sign = -sign;
        }
        for (Eigen::Index i = k + 1; i < n; ++i) {
            for (Eigen::Index j = k + 1; j < n; ++j) {
                const Int128 num = static_cast<Int128>(A(i, j)) * A(k, k) -
                                   static_cast<Int128>(A(i, k)) * A(k, j);
                const Int128 q = num / prev;
                if (q > std::numeric_limits<std::int64_t>::max() ||
                    q < std::numeric_limits<std::int64_t>::min()) {
                    throw DomainError("bareiss_determinant: 64-bit overflow");
                }
                A(i, j) = static_cast<std::int64_t>(q);
            }
            A(i, k) = 0;
        }
        prev = A(k, k);
    }
    return sign * A(n - 1, n - 1);
}

double lu_determinant(const Matrix& M) {
    if (M.rows() != M.cols()) {
        throw ArgumentError("determinant of a non-square matrix");
    }
    if (M.rows() == 0) return 1.0;
    return M.partialPivLu().determinant();
}

std::int64_t det_by_blocks(const IntMatrix& M, std::size_t J, std::size_t K, std::size_t max_size) {
    return det_by_blocks_impl<std::int64_t>(M, J, K, max_size);
}

double det_by_blocks(const Matrix& M, std::size_t J, std::size_t K, std::size_t max_size) {
    return det_by_blocks_impl<double>(M, J, K, max_size);
}

std::vector<ClassCoefficient> gamma_coefficients(std::span<const Vector> g, std::size_t J,
                                                 std::size_t K, std::size_t max_size) {
    const std::size_t N = J * K;
    if (g.size() != N) {
        throw ArgumentError("gamma_coefficients: expected " + std::to_string(N) + " vectors");
    }
    for (const auto& v : g) {
        if (static_cast<std::size_t>(v.size()) != J) {
            throw ArgumentError("gamma_coefficients: vectors must have length J = " +
                                std::to_string(J));
        }
    }
    const auto classes = enumerate_classes(N, J, max_size);
    std::vector<ClassCoefficient> out;
    out.reserve(classes.size());
    Matrix G(J, J);
    for (const auto& cls : classes) {
        double gamma = 1.0;
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t c = 0; c < J; ++c) {
                G.col(static_cast<Eigen::Index>(c)) = g[cls.representative[k * J + c]];
            }
            gamma *= lu_determinant(G);
        }
        out.push_back(ClassCoefficient{cls, gamma});
    }
    return out;
}

double determinant_from_coefficients(std::span<const ClassCoefficient> coefficients,
                                     const Matrix& features) {
    double total = 0.0;
    for (const auto& c : coefficients) {
        const auto& rep = c.cls.representative;
        if (static_cast<std::size_t>(features.rows()) != rep.size() ||
            static_cast<std::size_t>(features.cols()) != c.cls.K) {
            throw ArgumentError("determinant_from_coefficients: features must be N x K");
        }
        double product = c.gamma * c.cls.sign;
        for (std::size_t k = 0; k < c.cls.K; ++k) {
            for (std::size_t j = 0; j < c.cls.J; ++j) {
                product *= features(rep[k * c.cls.J + j], static_cast<Eigen::Index>(k));
            }
        }
        total += product;
    }
    return total;
}

}  // namespace bqrec
