#include "bqrec/errors.hpp"
#include "bqrec/rank.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <limits>

using namespace bqrec;

TEST(NumericalRank, Basics) {
    EXPECT_EQ(numerical_rank(Matrix::Identity(5, 5)), 5);
    EXPECT_EQ(numerical_rank(Matrix::Zero(4, 3)), 0);
    EXPECT_EQ(numerical_rank(Matrix(0, 0)), 0);
    EXPECT_EQ(numerical_rank(Matrix(0, 3)), 0);
}

TEST(NumericalRank, OuterProductIsRankOne) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Vector g = oracle::random_normal_vector(3, rng), f = oracle::random_normal_vector(4, rng);
        EXPECT_EQ(numerical_rank(g * f.transpose()), 1);
    }
}

TEST(NumericalRank, AgreesWithElimination) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const int r = 1 + static_cast<int>(rng() % 6), rows = 6 + static_cast<int>(rng() % 4), cols = 6;
        const Matrix M = oracle::random_normal_matrix(rows, r, rng) * oracle::random_normal_matrix(r, cols, rng);
        EXPECT_EQ(numerical_rank(M), std::min(r, cols));
        EXPECT_EQ(numerical_rank(M), oracle::elimination_rank(M));
    }
}

TEST(NumericalRank, ToleranceIsRelative) {
    Matrix M = Matrix::Zero(3, 3);
    M.diagonal() << 1e6, 1.0, 1e-3;
    EXPECT_EQ(numerical_rank(M, 1e-10), 3);
    EXPECT_EQ(numerical_rank(M, 1e-8), 2);
    EXPECT_EQ(numerical_rank(M * 1e-20, 1e-10), 3);
}

TEST(NumericalRank, Errors) {
    Matrix M = Matrix::Identity(2, 2);
    M(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(numerical_rank(M), DomainError);
    M(0, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(numerical_rank(M), DomainError);
    EXPECT_THROW(numerical_rank(Matrix::Identity(2, 2), 0.0), DomainError);
    EXPECT_THROW(numerical_rank(Matrix::Identity(2, 2), -1.0), DomainError);
}

TEST(SingularValues, Descending) {
    std::mt19937_64 rng(3);
    const Matrix M = oracle::random_normal_matrix(5, 4, rng);
    const Vector s = singular_values(M);
    ASSERT_EQ(s.size(), 4);
    for (int i = 1; i < 4; ++i) EXPECT_GE(s(i - 1), s(i));
    EXPECT_NEAR(s.squaredNorm(), M.squaredNorm(), 1e-10);
}

TEST(LeastSquares, ExactSystem) {
    std::mt19937_64 rng(4);
    const Matrix A = oracle::random_normal_matrix(8, 5, rng);
    const Vector x = oracle::random_normal_vector(5, rng);
    const auto res = solve_least_squares(A, A * x);
    EXPECT_EQ(res.rank, 5);
    EXPECT_LT((res.x - x).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(res.residual_norm, 1e-12);
}

TEST(LeastSquares, MinimumNormOnDeficientSystem) {
    std::mt19937_64 rng(5);
    const Matrix A = oracle::random_normal_matrix(6, 2, rng) * oracle::random_normal_matrix(2, 4, rng);
    const Vector b = A * oracle::random_normal_vector(4, rng);
    const auto res = solve_least_squares(A, b);
    EXPECT_EQ(res.rank, 2);
    EXPECT_LT((A * res.x - b).norm(), 1e-10);
    const Vector pinv = A.completeOrthogonalDecomposition().pseudoInverse() * b;
    EXPECT_LT((res.x - pinv).norm(), 1e-10);
}

TEST(LeastSquares, Errors) {
    EXPECT_THROW(solve_least_squares(Matrix::Identity(3, 3), Vector::Ones(2)), ArgumentError);
    Vector b = Vector::Ones(3);
    b(1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(solve_least_squares(Matrix::Identity(3, 3), b), DomainError);
}
