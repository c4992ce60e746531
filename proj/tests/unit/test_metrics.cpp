#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bridged/metrics.hpp"
#include "bridged/predictor.hpp"
#include "bridged/split.hpp"
#include "bridged/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace bridged;
using testing_util::rows;

namespace {

Labels random_labels(std::size_t n, int classes, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> pick(0, classes - 1);
    Labels out(n);
    for (auto& v : out) v = pick(gen);
    return out;
}

ClusterModel model_with(Matrix centroids) {
    ClusterModel m;
    m.centroids = std::move(centroids);
    return m;
}

}  // namespace

TEST(Mse, Examples) {
    const Matrix t = rows({{1, 2}, {3, 4}});
    EXPECT_DOUBLE_EQ(mse(t, t), 0.0);
    EXPECT_DOUBLE_EQ(mse(t.array() + 1.0, t), 1.0);
    // Squared differences {0, 4} and {2, 2}.
    const Matrix p = rows({{1, 4}, {3 + std::sqrt(2.0), 4 - std::sqrt(2.0)}});
    EXPECT_NEAR(mse(p, t), 2.0, 1e-12);
}

TEST(Mse, Errors) {
    EXPECT_THROW(mse(Matrix(0, 2), Matrix(0, 2)), EvaluationError);
    EXPECT_THROW(mse(rows({{1}}), rows({{1, 2}})), DimensionError);
}

TEST(RetrievalMse, Examples) {
    const Matrix truth = rows({{1, 1}});
    EXPECT_DOUBLE_EQ(retrieval_mse(truth, rows({{0, 0}, {1, 1}}), truth), 0.0);
    EXPECT_DOUBLE_EQ(retrieval_mse(rows({{50, -3}}), truth, truth), 0.0);
    // Prediction is nearer {4, 0} than {1, 1}: score that wrong vector.
    const Matrix pool = rows({{1, 1}, {4, 0}, {-5, -5}});
    EXPECT_DOUBLE_EQ(retrieval_mse(rows({{3.5, 0}}), pool, truth), (9.0 + 1.0) / 2.0);
}

TEST(RetrievalMse, MultiReferenceUsesClosest) {
    const Matrix pool = rows({{0, 0}, {10, 10}});
    const std::vector<Matrix> refs{rows({{10, 12}, {0, 1}})};
    // Snapped to {0, 0}; the closer reference is {0, 1}.
    EXPECT_DOUBLE_EQ(retrieval_mse(rows({{1, 1}}), pool, refs), 0.5);
}

TEST(Ami, Examples) {
    EXPECT_DOUBLE_EQ(ami({0, 0, 1, 1, 2}, {0, 0, 1, 1, 2}), 1.0);
    EXPECT_NEAR(ami({0, 0, 1, 1, 2}, {2, 2, 0, 0, 1}), 1.0, 1e-12);
    EXPECT_NEAR(ami({0, 1, 0, 1, 2}, {3, 3, 3, 3, 3}), 0.0, 1e-12);
    const auto parts = oracle::ami_parts({0, 0, 1, 1}, {0, 1, 0, 1});
    EXPECT_NEAR(ami({0, 0, 1, 1}, {0, 1, 0, 1}), (parts.mi - parts.emi) / (parts.h_max - parts.emi), 1e-12);
    EXPECT_THROW(ami({0, 1}, {0}), ArgumentError);
}

// Property: AMI equals the exhaustive oracle, is symmetric and invariant
// under relabelling, and never exceeds 1.
TEST(AmiProperty, MatchesExhaustiveOracle) {
    std::mt19937_64 gen(41);
    int checked = 0;
    for (int trial = 0; trial < 1500; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        const auto a = random_labels(n, 1 + trial % 3, gen);
        const auto b = random_labels(n, 1 + (trial / 3) % 3, gen);
        const auto parts = oracle::ami_parts(a, b);
        const double denom = parts.h_max - parts.emi;
        if (std::abs(denom) < 1e-9) continue;
        ++checked;
        const double got = ami(a, b);
        ASSERT_NEAR(got, (parts.mi - parts.emi) / denom, 1e-9) << "trial " << trial;
        EXPECT_NEAR(got, ami(b, a), 1e-12);
        EXPECT_LE(got, 1.0 + 1e-12);
        Labels shifted = a;
        for (auto& v : shifted) v = (v + 1) % 3;
        EXPECT_NEAR(ami(shifted, b), got, 1e-12);
    }
    EXPECT_GE(checked, 1000);
}

TEST(Misclustering, Examples) {
    const Labels lat{0, 0, 1, 1, 2, 2};
    const auto same = misclustering_rate(lat, lat, 3);
    EXPECT_DOUBLE_EQ(same.rate, 0.0);
    EXPECT_EQ(same.permutation, (std::vector<int>{0, 1, 2}));
    // assignments are latents under the cycle 0->1->2->0.
    const auto cyc = misclustering_rate({1, 1, 2, 2, 0, 0}, lat, 3);
    EXPECT_DOUBLE_EQ(cyc.rate, 0.0);
    EXPECT_EQ(cyc.permutation, (std::vector<int>{2, 0, 1}));
    const Labels ten{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
    Labels flipped = ten;
    flipped[3] = 1;
    EXPECT_DOUBLE_EQ(misclustering_rate(flipped, ten, 2).rate, 0.1);
}

TEST(MisclusteringProperty, MatchesBruteForce) {
    std::mt19937_64 gen(42);
    for (int trial = 0; trial < 1500; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 8);
        const int c = 1 + trial % 3;
        const auto a = random_labels(n, c, gen);
        const auto t = random_labels(n, c, gen);
        const auto got = misclustering_rate(a, t, c);
        ASSERT_NEAR(got.rate, oracle::misclustering(a, t, c), 1e-12) << "trial " << trial;
        // The returned permutation achieves the rate.
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (got.permutation[static_cast<std::size_t>(a[i])] != t[i]) ++wrong;
        }
        EXPECT_NEAR(static_cast<double>(wrong) / static_cast<double>(n), got.rate, 1e-12);
    }
}

TEST(DyMean, Examples) {
    EXPECT_DOUBLE_EQ(d_y_mean(PointSet(rows({{0, 0}, {3, 4}})), model_with(rows({{0, 0}, {3, 4}}))), 0.0);
    EXPECT_DOUBLE_EQ(d_y_mean(PointSet(rows({{-1}, {1}})), model_with(rows({{0}}))), 1.0);
    // Two clusters: distances 1, 2, 5 (3-4-5 triangle) and 0.
    const PointSet pts(rows({{1, 0}, {0, -2}, {13, 4}, {10, 0}}));
    EXPECT_DOUBLE_EQ(d_y_mean(pts, model_with(rows({{0, 0}, {10, 0}}))), (1.0 + 2.0 + 5.0 + 0.0) / 4.0);
}

TEST(CentroidDistanceTerms, PerPointSquaredDistanceOverDim) {
    const auto terms = centroid_distance_terms(rows({{1, 0}, {13, 4}}), model_with(rows({{0, 0}, {10, 0}})));
    ASSERT_EQ(terms.size(), 2u);
    EXPECT_DOUBLE_EQ(terms[0], 0.5);
    EXPECT_DOUBLE_EQ(terms[1], 12.5);
}

TEST(Winrate, PaperHalfOfSixHundred) {
    std::map<std::string, std::vector<double>> m{{"A", {}}, {"B", {}}};
    for (int t = 0; t < 600; ++t) {
        m["A"].push_back(t < 300 ? 0.1 : 0.9);
        m["B"].push_back(0.5);
    }
    const auto w = winrate(m);
    EXPECT_DOUBLE_EQ(w.at("A"), 0.50);
    EXPECT_DOUBLE_EQ(w.at("B"), 0.50);
}

TEST(Winrate, SingleModelTiesAndNonFinite) {
    EXPECT_DOUBLE_EQ(winrate({{"A", {3.0, 1.0}}}).at("A"), 1.0);
    const auto tied = winrate({{"A", {1.0, 2.0}}, {"B", {1.0, 2.0}}});
    EXPECT_DOUBLE_EQ(tied.at("A"), 0.5);
    EXPECT_DOUBLE_EQ(tied.at("B"), 0.5);
    const double nan = std::nan("");
    const auto w = winrate({{"A", {nan, 5.0}}, {"B", {9.0, 1.0}}});
    EXPECT_DOUBLE_EQ(w.at("B"), 1.0);
    EXPECT_THROW(winrate({{"A", {1.0}}, {"B", {1.0, 2.0}}}), ArgumentError);
}

TEST(WinrateProperty, MatchesOracleAndSumsToOne) {
    std::mt19937_64 gen(43);
    std::uniform_int_distribution<int> value(0, 3);
    for (int trial = 0; trial < 1000; ++trial) {
        const int models = 1 + trial % 3;
        const std::size_t trials = 1 + static_cast<std::size_t>(trial % 8);
        std::map<std::string, std::vector<double>> m;
        for (int k = 0; k < models; ++k) {
            auto& v = m[std::string(1, static_cast<char>('a' + k))];
            for (std::size_t t = 0; t < trials; ++t) v.push_back(value(gen));
        }
        const auto got = winrate(m);
        const auto want = oracle::winrate(m);
        double total = 0.0;
        for (const auto& [k, v] : want) {
            ASSERT_NEAR(got.at(k), v, 1e-12) << "trial " << trial;
            EXPECT_GE(got.at(k), 0.0);
            total += got.at(k);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

// With every point correctly clustered and bridged, each forward error is
// the squared distance from the truth to its own output centroid.
TEST(MetricsProperty, DecompositionConsistency) {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto spec = make_separated_spec(4, 6, 5, 14.0, RngSeed{seed});
        const auto s = sample_mixture(spec, 400, RngSeed{seed + 100});
        SplitOptions o;
        o.enlarge_pools = true;
        const auto split = make_split(s.x, s.y, pair_by_id(s.x, s.y), o, RngSeed{seed + 200});
        PipelineConfig pc;
        pc.clusters = 4;
        const auto r = run_pipeline(split, pc, RngSeed{seed});
        const double eps_x = misclustering_rate(r.x_model.assignments, r.x_fit.latent(), 4).rate;
        const double eps_y = misclustering_rate(r.y_model.assignments, r.y_fit.latent(), 4).rate;
        const double acc = bridging_accuracy(r.bridge, r.x_model, r.y_model, r.x_fit.latent(), r.y_fit.latent());
        if (eps_x != 0.0 || eps_y != 0.0 || acc != 1.0) continue;
        ++checked;
        Matrix pred(static_cast<Eigen::Index>(r.forward.size()), 5);
        for (std::size_t i = 0; i < r.forward.size(); ++i) pred.row(static_cast<Eigen::Index>(i)) = r.forward[i].value;
        const auto terms = centroid_distance_terms(split.x_test_truth, r.y_model);
        double mean = 0.0;
        for (double t : terms) mean += t;
        mean /= static_cast<double>(terms.size());
        EXPECT_NEAR(mse(pred, split.x_test_truth), mean, 1e-9);
    }
    EXPECT_GE(checked, 8);
}
