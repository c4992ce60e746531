#include <random>

#include <gtest/gtest.h>

#include "bridged/assignment.hpp"
#include "oracles.hpp"

using namespace bridged;

namespace {

oracle::Table to_table(const Matrix& m) {
    oracle::Table t(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
    return t;
}

}  // namespace

TEST(Assignment, SmallKnownInstance) {
    Matrix c(3, 3);
    c << 4, 1, 3, 2, 0, 5, 3, 2, 2;
    const auto a = solve_assignment(c);
    EXPECT_DOUBLE_EQ(assignment_total(c, a), 5.0);
}

TEST(Assignment, RectangularUsesDistinctColumns) {
    Matrix c(2, 4);
    c << 5, 1, 9, 9, 5, 1, 9, 0;
    const auto a = solve_assignment(c);
    EXPECT_NE(a[0], a[1]);
    EXPECT_DOUBLE_EQ(assignment_total(c, a), 1.0);
}

TEST(Assignment, RejectsMoreRowsThanColumnsAndNonFinite) {
    EXPECT_THROW(solve_assignment(Matrix::Zero(3, 2)), ArgumentError);
    Matrix c = Matrix::Zero(2, 2);
    c(0, 0) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(solve_assignment(c), NumericError);
}

TEST(Assignment, LexicographicTieBreakReturnsIdentityOnZeros) {
    const auto a = solve_max_assignment_lex(Matrix::Zero(4, 4));
    EXPECT_EQ(a, (std::vector<int>{0, 1, 2, 3}));
}

TEST(Assignment, LexicographicAmongOptimaPicksSmallest) {
    // Both identity and swap total 2; the smaller sequence {0,1} wins.
    Matrix w(2, 2);
    w << 1, 1, 1, 1;
    EXPECT_EQ(solve_max_assignment_lex(w), (std::vector<int>{0, 1}));
    Matrix v(2, 2);
    v << 0, 2, 2, 0;
    EXPECT_EQ(solve_max_assignment_lex(v), (std::vector<int>{1, 0}));
}

// Property: Hungarian matches exhaustive enumeration on random small
// instances, including integer-valued ones with many ties.
TEST(AssignmentProperty, MatchesBruteForceOnThousandsOfInstances) {
    std::mt19937_64 gen(2024);
    std::uniform_int_distribution<int> size(1, 5);
    std::uniform_int_distribution<int> small_int(0, 3);
    std::uniform_real_distribution<double> real(-5.0, 5.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const int r = size(gen);
        const int c = r + std::uniform_int_distribution<int>(0, 2)(gen);
        Matrix m(r, c);
        const bool ints = trial % 2 == 0;
        for (int i = 0; i < r; ++i) {
            for (int j = 0; j < c; ++j) m(i, j) = ints ? small_int(gen) : real(gen);
        }
        const auto a = solve_assignment(m);
        ASSERT_EQ(static_cast<int>(a.size()), r);
        std::vector<char> used(static_cast<std::size_t>(c), 0);
        for (int col : a) {
            ASSERT_GE(col, 0);
            ASSERT_LT(col, c);
            ASSERT_FALSE(used[static_cast<std::size_t>(col)]);
            used[static_cast<std::size_t>(col)] = 1;
        }
        ASSERT_NEAR(assignment_total(m, a), oracle::min_assignment_cost(to_table(m)), 1e-9) << "trial " << trial;

        // The max / lexicographic variants agree with the negated oracle.
        if (r == c) {
            const auto lex = solve_max_assignment_lex(m);
            ASSERT_NEAR(assignment_total(m, lex), -oracle::min_assignment_cost(to_table(-m)), 1e-9);
        }
    }
}
