#pragma once

#include "bqrec/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bqrec {

/// A bijection of {0, ..., N-1}, stored as its image sequence.
class Permutation {
public:
    /// Throws ArgumentError unless entries is a bijection of {0, ..., N-1}.
    explicit Permutation(std::vector<int> entries);

    static Permutation identity(std::size_t N);

    std::size_t size() const noexcept { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<int>& entries() const noexcept { return entries_; }

    auto operator<=>(const Permutation&) const = default;

private:
    std::vector<int> entries_;
};

/// (-1)^(number of inversions).
int perm_sign(const Permutation& p);

/// p ~_J q: every aligned block of J positions holds the same value set.
/// Throws ArgumentError when the sizes differ or J does not divide N.
bool equivalent(const Permutation& p, const Permutation& q, std::size_t J);

/// Lexicographically first member of the ~_J class of p: each block sorted.
Permutation class_representative(const Permutation& p, std::size_t J);

/// One ~_J equivalence class of permutations of N = J K elements.
struct EquivClass {
    Permutation representative;
    std::size_t J = 1;
    std::size_t K = 1;
    int sign = 1;  ///< parity of the representative

    /// Number of members, (J!)^K.
    std::uint64_t size() const;
};

/// Enumeration is factorial in N; the default cap keeps it at 8 (2520 classes
/// for J = 2). Raise it explicitly if you accept the cost.
inline constexpr std::size_t kDefaultEnumerationCap = 8;

/// Every class of P_N / ~_J, ordered lexicographically by representative.
/// Throws ArgumentError if J does not divide N, ResourceError above the cap.
std::vector<EquivClass> enumerate_classes(std::size_t N, std::size_t J,
                                          std::size_t max_size = kDefaultEnumerationCap);

/// All (J!)^K members of a class.
std::vector<Permutation> expand_class(const EquivClass& cls);

/// Fraction-free (Bareiss) elimination. Exact for integer matrices whose minors
/// fit in 64 bits; throws DomainError on overflow.
std::int64_t bareiss_determinant(const IntMatrix& M);

/// Partial-pivot LU determinant.
double lu_determinant(const Matrix& M);

/// Determinant of a JK x JK matrix as a sum over ~_J classes of
/// sgn([s]) * prod_k det(M[rows Jk..J(k+1)-1, cols [s]_{Jk}..[s]_{J(k+1)-1}]).
std::int64_t det_by_blocks(const IntMatrix& M, std::size_t J, std::size_t K,
                           std::size_t max_size = kDefaultEnumerationCap);
double det_by_blocks(const Matrix& M, std::size_t J, std::size_t K,
                     std::size_t max_size = kDefaultEnumerationCap);

struct ClassCoefficient {
    EquivClass cls;
    double gamma = 0.0;  ///< prod_k det(G_{[s],k}); the class sign is kept on cls
};

/// gamma_[s] = prod_k det([g_{[s]_{kJ}} ... g_{[s]_{kJ+J-1}}]) for every class,
/// in enumeration order. g must hold N = J K vectors of length J.
std::vector<ClassCoefficient> gamma_coefficients(std::span<const Vector> g, std::size_t J,
                                                 std::size_t K,
                                                 std::size_t max_size = kDefaultEnumerationCap);

/// Evaluates sum_[s] sgn([s]) gamma_[s] prod_k prod_j f_k(t_{[s]_{kJ+j}}) where
/// features(n, k) = f_k(t_n). For square Gamma built from the same g and times
/// this equals det(Gamma).
double determinant_from_coefficients(std::span<const ClassCoefficient> coefficients,
                                     const Matrix& features);

}  // namespace bqrec
