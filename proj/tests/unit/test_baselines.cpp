#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "bridged/baselines.hpp"
#include "bridged/random.hpp"
#include "bridged/split.hpp"
#include "helpers.hpp"

using namespace bridged;
using testing_util::rows;

namespace {

/// Brute-force KNN: full stable sort by (distance, index).
Matrix knn_oracle(const Matrix& px, const Matrix& py, const Matrix& q, int k) {
    Matrix out(q.rows(), py.cols());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        std::vector<std::pair<double, Eigen::Index>> d;
        for (Eigen::Index j = 0; j < px.rows(); ++j) d.emplace_back((px.row(j) - q.row(i)).squaredNorm(), j);
        std::sort(d.begin(), d.end());
        Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(py.cols());
        for (int r = 0; r < k; ++r) acc += py.row(d[static_cast<std::size_t>(r)].second);
        out.row(i) = acc / k;
    }
    return out;
}

/// Transductive split built by hand: pools exclude the pairs.
DataSplit manual_split(const Matrix& x_pool, const Matrix& y_pool, const Matrix& px, const Matrix& py) {
    DataSplit s;
    std::vector<std::string> pool_ids;
    for (Eigen::Index i = 0; i < x_pool.rows(); ++i) pool_ids.push_back("p" + std::to_string(i));
    std::vector<std::string> y_ids;
    for (Eigen::Index i = 0; i < y_pool.rows(); ++i) y_ids.push_back("q" + std::to_string(i));
    std::vector<std::string> pair_ids;
    for (Eigen::Index i = 0; i < px.rows(); ++i) pair_ids.push_back("k" + std::to_string(i));
    s.x_pool = PointSet(x_pool, pool_ids);
    s.y_pool = PointSet(y_pool, y_ids);
    s.x_test = s.x_pool;
    s.paired = PairedSet(px, py, pair_ids);
    return s;
}

}  // namespace

TEST(Knn, OneNeighbourAtPairedPointReturnsItsY) {
    const PairedSet p(rows({{0}, {5}, {9}}), rows({{1, 1}, {2, 2}, {3, 3}}));
    const auto out = knn_predict(p, PointSet(rows({{5}})), 1);
    EXPECT_TRUE(out.row(0) == rows({{2, 2}}).row(0));
}

TEST(Knn, AllNeighboursGiveGlobalMean) {
    const PairedSet p(rows({{0}, {5}, {9}}), rows({{1}, {2}, {6}}));
    const auto out = knn_predict(p, PointSet(rows({{-3}, {100}})), 3);
    EXPECT_DOUBLE_EQ(out(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(out(1, 0), 3.0);
}

TEST(Knn, TwoNearestOnALine) {
    const PairedSet p(rows({{0}, {1}, {3}}), rows({{10}, {20}, {40}}));
    const auto out = knn_predict(p, PointSet(rows({{2.2}})), 2);
    EXPECT_DOUBLE_EQ(out(0, 0), 30.0);
    // Equidistant neighbours: lower pair index wins.
    EXPECT_DOUBLE_EQ(knn_predict(p, PointSet(rows({{0.5}})), 1)(0, 0), 10.0);
}

TEST(Knn, InvalidK) {
    const PairedSet p(rows({{0}}), rows({{1}}));
    EXPECT_THROW(knn_predict(p, PointSet(rows({{0}})), 2), ArgumentError);
    EXPECT_THROW(knn_predict(p, PointSet(rows({{0}})), 0), ArgumentError);
}

// Property: matches a brute-force oracle and stays in the bounding box of
// the paired y's.
TEST(KnnProperty, MatchesBruteForceAndInterpolates) {
    std::mt19937_64 gen(31);
    std::uniform_int_distribution<int> grid(0, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + trial % 7;
        Matrix px(k, 2);
        Matrix py(k, 3);
        for (int i = 0; i < k; ++i) {
            px.row(i) << grid(gen), grid(gen);
            py.row(i) << grid(gen), grid(gen), grid(gen);
        }
        Matrix q(5, 2);
        for (int i = 0; i < 5; ++i) q.row(i) << grid(gen), grid(gen);
        const int kn = 1 + trial % k;
        const auto got = knn_predict(PairedSet(px, py), PointSet(q), kn);
        const auto want = knn_oracle(px, py, q, kn);
        ASSERT_LT((got - want).cwiseAbs().maxCoeff(), 1e-12) << "trial " << trial;
        for (Eigen::Index i = 0; i < got.rows(); ++i) {
            EXPECT_TRUE((got.row(i).array() >= py.colwise().minCoeff().array() - 1e-12).all());
            EXPECT_TRUE((got.row(i).array() <= py.colwise().maxCoeff().array() + 1e-12).all());
        }
    }
}

TEST(Ridge, RecoversAffineMap) {
    Matrix x(6, 2);
    x << 0, 0, 1, 0, 0, 1, 1, 1, 2, 3, -1, 2;
    Eigen::MatrixXd w(2, 1);
    w << 2, -3;
    Matrix y = x * w;
    y.array() += 5.0;
    const auto map = fit_ridge(PairedSet(x, y), 1e-10);
    const Matrix back = map.apply(x);
    EXPECT_LT((back - y).cwiseAbs().maxCoeff(), 1e-7);
    EXPECT_THROW(fit_ridge(PairedSet(x, y), 0.0), ArgumentError);
}

TEST(Barycentric, WeightedAverageAndZeroRows) {
    const Matrix c = rows({{0.25, 0.75}, {0, 0}});
    const auto out = barycentric_projection(c, rows({{0, 4}, {4, 0}}));
    EXPECT_DOUBLE_EQ(out(0, 0), 3.0);
    EXPECT_DOUBLE_EQ(out(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(out(1, 0), 0.0);
    EXPECT_THROW(barycentric_projection(c, rows({{1}})), DimensionError);
}

TEST(Eot, SingleOutputPointIsEveryPrediction) {
    const auto s = manual_split(rows({{0}, {1}, {2}}), rows({{7, 7}}), rows({{0.5}}), rows({{7, 7}}));
    const auto out = eot_predict(s, EotConfig{});
    ASSERT_EQ(out.predictions.rows(), 3);
    for (Eigen::Index i = 0; i < 3; ++i) {
        EXPECT_NEAR(out.predictions(i, 0), 7.0, 1e-12);
        EXPECT_NEAR(out.predictions(i, 1), 7.0, 1e-12);
    }
}

TEST(Eot, LargeEpsGivesOutputMean) {
    const auto s = manual_split(rows({{0}, {1}, {2}, {3}}), rows({{0}, {10}, {20}}), rows({{1.5}}), rows({{10}}));
    EotConfig cfg;
    cfg.eps = 1e6;
    const auto out = eot_predict(s, cfg);
    // Support is the y pool plus the paired y: mean of {0, 10, 20, 10}.
    for (Eigen::Index i = 0; i < out.predictions.rows(); ++i) EXPECT_NEAR(out.predictions(i, 0), 10.0, 1e-4);
}

// Two separated blobs, one pair each: small-eps EOT lands each query near
// the centroid of its own blob's outputs, as the bridge oracle would.
TEST(Eot, TwoBlobsSmallEpsNearOwnCentroid) {
    const Matrix cx = rows({{0, 0}, {20, 0}});
    const Matrix cy = rows({{0}, {30}});
    const auto x = testing_util::blobs(cx, 40, 1.0, 1);
    const auto y = testing_util::blobs(cy, 40, 1.0, 2);
    SplitOptions o;
    const auto split = make_split(x, y, pair_by_id(x, y), o, RngSeed{3});
    EotConfig cfg;
    cfg.eps = 0.01;
    const auto out = eot_predict(split, cfg);
    for (std::size_t i = 0; i < split.x_test.size(); ++i) {
        const int t = split.x_test.latent()[i];
        EXPECT_LT(std::abs(out.predictions(static_cast<Eigen::Index>(i), 0) - cy(t, 0)), 3.0) << "row " << i;
    }
    // Pairs join both supports when the pools were not enlarged.
    EXPECT_EQ(out.coupling_entries, (split.x_pool.size() + split.paired.size()) * (split.y_pool.size() + split.paired.size()));
}

TEST(Eot, InductiveQueriesAreAppended) {
    const Matrix cx = rows({{0, 0}, {20, 0}});
    const auto x = testing_util::blobs(cx, 30, 1.0, 4);
    const auto y = testing_util::blobs(rows({{0}, {30}}), 30, 1.0, 5);
    SplitOptions o;
    o.mode = SplitMode::inductive;
    const auto split = make_split(x, y, pair_by_id(x, y), o, RngSeed{6});
    const auto out = eot_predict(split, EotConfig{});
    EXPECT_EQ(static_cast<std::size_t>(out.predictions.rows()), split.x_test.size());
    EXPECT_TRUE(out.predictions.allFinite());
}

TEST(Gw, RigidCopyRecoversClusterCorrespondence) {
    const Matrix cx = rows({{0, 0}, {12, 0}, {0, 30}});
    const auto x = testing_util::blobs(cx, 20, 0.5, 7);
    // y = x rotated by 90 degrees and shifted.
    Matrix rot(2, 2);
    rot << 0, 1, -1, 0;
    Matrix yp = x.points() * rot;
    yp.array() += 3.0;
    const PointSet y(yp, x.ids(), x.latent());
    SplitOptions o;
    o.enlarge_pools = true;
    const auto split = make_split(x, y, pair_by_id(x, y), o, RngSeed{8});
    const auto out = gw_predict(split, GwPredictConfig{}, RngSeed{9});
    const Matrix cy = (cx * rot).array() + 3.0;
    for (int t = 0; t < 3; ++t) {
        Eigen::RowVectorXd err = Eigen::RowVectorXd::Zero(2);
        int n = 0;
        for (std::size_t i = 0; i < split.x_test.size(); ++i) {
            if (split.x_test.latent()[i] != t) continue;
            err += out.predictions.row(static_cast<Eigen::Index>(i)) - cy.row(t);
            ++n;
        }
        EXPECT_LT((err / n).norm(), 12.0 / 2.0) << "cluster " << t;
    }
}

TEST(Gw, SingleClusterGivesOutputMean) {
    const auto x = testing_util::blobs(rows({{0, 0}}), 30, 0.01, 10);
    const auto y = testing_util::blobs(rows({{5, 5, 5}}), 30, 0.01, 11);
    SplitOptions o;
    o.enlarge_pools = true;
    const auto split = make_split(x, y, pair_by_id(x, y), o, RngSeed{12});
    const auto out = gw_predict(split, GwPredictConfig{}, RngSeed{13});
    const Eigen::RowVectorXd mean = split.y_pool.points().colwise().mean();
    for (Eigen::Index i = 0; i < out.predictions.rows(); ++i) EXPECT_LT((out.predictions.row(i) - mean).norm(), 0.05);
}

// Mirror-symmetric instance: GW cannot tell identity from reflection, the
// single pair can. The chosen restart has the smallest paired error among
// all restarts, and its read-out sends the paired end to the right end.
TEST(Gw, RestartSelectionPrefersLowerPairedError) {
    const Matrix pool = rows({{0.5}, {1}, {10}, {10.5}, {11}});
    const auto split = manual_split(pool, pool, rows({{0}}), rows({{0}}));
    GwPredictConfig cfg;
    cfg.restarts = 8;
    const auto out = gw_predict(split, cfg, RngSeed{14});

    // Recompute every restart with the same seeds and supports.
    Matrix support(6, 1);
    support << 0.5, 1, 10, 10.5, 11, 0;
    Matrix d = euclidean_distances(support);
    d /= d.maxCoeff();
    const Vector w = uniform_weights(6);
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < cfg.restarts; ++r) {
        GwConfig g = cfg.gw;
        g.init_noise = r == 0 ? 0.0 : cfg.restart_noise;
        const auto plan = gw_align(d, d, w, w, g, derive_seed(RngSeed{14}, static_cast<std::uint64_t>(r)));
        const Matrix all = barycentric_projection(plan.coupling, support);
        best = std::min(best, std::abs(all(5, 0)));
    }
    EXPECT_LT(best, 2.0);
    // Query 0.5 sits next to the paired point at 0, so it reads out near the
    // low end rather than the reflected high end.
    EXPECT_LT(out.predictions(0, 0), 5.5);
}

TEST(Gw, InvalidRestarts) {
    const auto s = manual_split(rows({{0}, {1}}), rows({{0}, {1}}), rows({{0}}), rows({{0}}));
    GwPredictConfig cfg;
    cfg.restarts = 0;
    EXPECT_THROW(gw_predict(s, cfg, RngSeed{}), ArgumentError);
}

TEST(Baselines, EmptyPairedSetIsArgumentError) {
    DataSplit s;
    s.x_pool = PointSet(rows({{0}}));
    s.y_pool = PointSet(rows({{0}}));
    s.x_test = s.x_pool;
    EXPECT_THROW(eot_predict(s, EotConfig{}), ArgumentError);
}
