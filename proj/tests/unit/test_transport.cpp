#include <random>

#include <gtest/gtest.h>

#include "bridged/transport.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bridged;
using testing_util::rows;

namespace {

Vector random_simplex(int n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Vector w(n);
    for (int i = 0; i < n; ++i) w(i) = u(gen);
    return w / w.sum();
}

Matrix random_cost(int n, int m, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix c(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) c(i, j) = u(gen);
    }
    return c;
}

Matrix line_distances(const std::vector<double>& xs) {
    const auto n = static_cast<Eigen::Index>(xs.size());
    Matrix d(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) d(i, j) = std::abs(xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)]);
    }
    return d;
}

oracle::Table table(const Matrix& m) {
    oracle::Table t(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
    }
    return t;
}

}  // namespace

TEST(Sinkhorn, ConstantCostGivesOuterProduct) {
    const Vector mu = (Vector(3) << 0.2, 0.3, 0.5).finished();
    const Vector nu = (Vector(2) << 0.6, 0.4).finished();
    const auto plan = sinkhorn(Matrix::Constant(3, 2, 1.7), mu, nu, 0.1);
    EXPECT_TRUE(plan.converged);
    const Matrix expected = mu * nu.transpose();
    EXPECT_LT((plan.coupling - expected).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(plan.coupling_entries, 6u);
}

TEST(Sinkhorn, SmallEpsMatchesExactTwoByTwo) {
    const Matrix cost = rows({{0, 1}, {1, 0}});
    const auto plan = sinkhorn(cost, uniform_weights(2), uniform_weights(2), 1e-3);
    const auto exact = oracle::exact_ot_2x2(table(cost), 0.5, 0.5);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) EXPECT_NEAR(plan.coupling(i, j), exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1e-3);
    }
    EXPECT_NEAR(plan.coupling(0, 0), 0.5, 1e-3);
}

// Random 2x2 instances against the closed-form entropic coupling.
TEST(Sinkhorn, MatchesClosedFormEntropicTwoByTwo) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> u(0.1, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = u(gen);
        const double b = u(gen);
        const double eps = trial % 2 == 0 ? 0.05 : 0.5;
        const Matrix cost = random_cost(2, 2, gen);
        const Vector mu = (Vector(2) << a, 1 - a).finished();
        const Vector nu = (Vector(2) << b, 1 - b).finished();
        const auto plan = sinkhorn(cost, mu, nu, eps, 20000, 1e-12);
        ASSERT_TRUE(plan.converged) << "trial " << trial;
        const auto exact = oracle::entropic_ot_2x2(table(cost), a, b, eps);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                EXPECT_NEAR(plan.coupling(i, j), exact[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1e-9) << "trial " << trial;
            }
        }
    }
}

TEST(Sinkhorn, RandomFiveBySevenMeetsMarginals) {
    std::mt19937_64 gen(5);
    const Vector mu = random_simplex(5, gen);
    const Vector nu = random_simplex(7, gen);
    const auto plan = sinkhorn(random_cost(5, 7, gen), mu, nu, 0.05, 2000, 1e-10);
    ASSERT_TRUE(plan.converged);
    EXPECT_LT((plan.coupling.rowwise().sum() - mu).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((plan.coupling.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_GE(plan.coupling.minCoeff(), 0.0);
    EXPECT_GT(plan.iterations, 0);
}

TEST(Sinkhorn, NonConvergenceIsFlaggedNotThrown) {
    std::mt19937_64 gen(6);
    const auto plan = sinkhorn(random_cost(6, 6, gen) * 50.0, random_simplex(6, gen), random_simplex(6, gen), 1e-3, 1, 1e-12);
    EXPECT_FALSE(plan.converged);
    EXPECT_EQ(plan.iterations, 1);
    EXPECT_GT(plan.marginal_violation, 1e-12);
}

TEST(Sinkhorn, InvalidInputs) {
    const Vector w = uniform_weights(2);
    EXPECT_THROW(sinkhorn(Matrix::Zero(2, 2), w, w, 0.0), ArgumentError);
    EXPECT_THROW(sinkhorn(Matrix::Zero(2, 3), w, w, 0.1), DimensionError);
    EXPECT_THROW(sinkhorn(Matrix::Zero(2, 2), (Vector(2) << 0.5, 0.6).finished(), w, 0.1), ArgumentError);
    EXPECT_THROW(sinkhorn(Matrix::Zero(2, 2), (Vector(2) << 1.0, 0.0).finished(), w, 0.1), ArgumentError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 1) = std::nan("");
    EXPECT_THROW(sinkhorn(bad, w, w, 0.1), NumericError);
}

// The entropic optimum is non-increasing as eps shrinks; every converged
// plan meets its marginals.
TEST(SinkhornProperty, ObjectiveMonotoneInEpsAndFeasible) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 6;
        const int m = 2 + (trial / 6) % 6;
        const Matrix cost = random_cost(n, m, gen);
        const Vector mu = random_simplex(n, gen);
        const Vector nu = random_simplex(m, gen);
        double previous = std::numeric_limits<double>::infinity();
        for (double eps : {1.0, 0.1, 0.01}) {
            const auto plan = sinkhorn(cost, mu, nu, eps, 20000, 1e-11);
            ASSERT_TRUE(plan.converged);
            EXPECT_LT(plan.marginal_violation, 1e-11);
            const double value = regularized_objective(plan, cost);
            EXPECT_LE(value, previous + 1e-9) << "trial " << trial << " eps " << eps;
            previous = value;
        }
    }
}

TEST(GwAlign, IdenticalThreePointSpacesRecoverIdentity) {
    const Matrix d = line_distances({0.0, 1.0, 3.0});
    const Vector w = uniform_weights(3);
    const auto plan = gw_align(d, d, w, w, GwConfig{}, RngSeed{1});
    const auto best = oracle::gw_best_permutation(table(d), table(d));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double expect = best[static_cast<std::size_t>(i)] == j ? 1.0 / 3.0 : 0.0;
            EXPECT_NEAR(plan.coupling(i, j), expect, 1e-3);
        }
    }
}

TEST(GwAlign, PermutedCopyRecoversPermutation) {
    const Matrix dx = line_distances({0.0, 1.0, 3.0});
    const Matrix dy = line_distances({3.0, 0.0, 1.0});
    const Vector w = uniform_weights(3);
    const auto plan = gw_align(dx, dy, w, w, GwConfig{}, RngSeed{1});
    const auto best = oracle::gw_best_permutation(table(dx), table(dy));
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(plan.coupling(i, best[static_cast<std::size_t>(i)]), 1.0 / 3.0, 1e-3);
    EXPECT_NEAR(gw_distortion(dx, dy, plan.coupling),
                oracle::gw_perm_distortion(table(dx), table(dy), best), 1e-3);
}

TEST(GwAlign, SinglePoint) {
    const Matrix d = Matrix::Zero(1, 1);
    const auto plan = gw_align(d, d, uniform_weights(1), uniform_weights(1), GwConfig{}, RngSeed{});
    ASSERT_EQ(plan.coupling.rows(), 1);
    EXPECT_NEAR(plan.coupling(0, 0), 1.0, 1e-12);
}

TEST(GwAlign, SwappingSpacesTransposesCoupling) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (double noise : {0.0, 0.5}) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (int i = 0; i < 5; ++i) xs.push_back(u(gen));
        for (int i = 0; i < 4; ++i) ys.push_back(u(gen));
        const Matrix dx = line_distances(xs);
        const Matrix dy = line_distances(ys);
        const Vector mu = random_simplex(5, gen);
        const Vector nu = random_simplex(4, gen);
        GwConfig cfg;
        cfg.eps = 0.05;
        cfg.init_noise = noise;
        const auto a = gw_align(dx, dy, mu, nu, cfg, RngSeed{3});
        const auto b = gw_align(dy, dx, nu, mu, cfg, RngSeed{3});
        EXPECT_LT((a.coupling - b.coupling.transpose()).cwiseAbs().maxCoeff(), 1e-7) << "noise " << noise;
    }
}

TEST(GwAlign, MarginalFeasibilityOnRandomInstances) {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (int i = 0; i < 6; ++i) xs.push_back(u(gen));
        for (int i = 0; i < 8; ++i) ys.push_back(u(gen));
        GwConfig cfg;
        cfg.eps = 0.02;
        const Vector mu = random_simplex(6, gen);
        const Vector nu = random_simplex(8, gen);
        const auto plan = gw_align(line_distances(xs), line_distances(ys), mu, nu, cfg, RngSeed{static_cast<std::uint64_t>(trial)});
        EXPECT_LT((plan.coupling.rowwise().sum() - mu).cwiseAbs().maxCoeff(), 1e-6);
        EXPECT_LT((plan.coupling.colwise().sum().transpose() - nu).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(GwAlign, NonConvergenceIsFlagged) {
    const Matrix d = line_distances({0.0, 1.0, 3.0, 7.0});
    GwConfig cfg;
    cfg.max_iter = 1;
    cfg.tol = 0.0;
    const auto plan = gw_align(d, d, uniform_weights(4), uniform_weights(4), cfg, RngSeed{});
    EXPECT_FALSE(plan.converged);
    EXPECT_EQ(plan.iterations, 1);
}

TEST(GwAlign, InvalidInputs) {
    const Vector w = uniform_weights(2);
    Matrix asym = rows({{0, 1}, {2, 0}});
    EXPECT_THROW(gw_align(asym, asym, w, w, GwConfig{}, RngSeed{}), ArgumentError);
    Matrix diag = rows({{1, 1}, {1, 0}});
    EXPECT_THROW(gw_align(diag, diag, w, w, GwConfig{}, RngSeed{}), ArgumentError);
    GwConfig bad;
    bad.eps = -1.0;
    EXPECT_THROW(bad.validate(), ArgumentError);
    EXPECT_THROW(gw_align(line_distances({0, 1}), line_distances({0, 1}), w, uniform_weights(3), GwConfig{}, RngSeed{}), DimensionError);
}
