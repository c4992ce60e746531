#include "bridged/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include <fmt/format.h>

#include "bridged/assignment.hpp"

namespace bridged {

namespace {

void check_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() == 0) throw EvaluationError("no predictions to evaluate");
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(fmt::format("prediction shape {}x{} differs from truth {}x{}", a.rows(),
                                        a.cols(), b.rows(), b.cols()));
    }
}

Eigen::Index nearest_row(const Matrix& pool, const Eigen::Ref<const Eigen::RowVectorXd>& v) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < pool.rows(); ++r) {
        const double d = (pool.row(r) - v).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = r;
        }
    }
    return best;
}

/// Dense relabelling to 0..k-1 in order of first appearance.
Labels compact(const Labels& labels, int& classes) {
    std::unordered_map<int, int> map;
    Labels out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = map.emplace(labels[i], static_cast<int>(map.size()));
        out[i] = it->second;
    }
    classes = static_cast<int>(map.size());
    return out;
}

double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts) {
        if (c > 0.0) h -= (c / n) * std::log(c / n);
    }
    return h;
}

}  // namespace

double mse(const Matrix& pred, const Matrix& truth) {
    check_same_shape(pred, truth);
    if (pred.cols() == 0) throw ArgumentError("predictions have dimension 0");
    return (pred - truth).squaredNorm() / static_cast<double>(pred.rows() * pred.cols());
}

double retrieval_mse(const Matrix& pred, const Matrix& pool, const Matrix& truth) {
    check_same_shape(pred, truth);
    if (pool.rows() == 0) throw EvaluationError("retrieval pool is empty");
    if (pool.cols() != pred.cols()) throw ArgumentError("retrieval pool dimension mismatch");
    Matrix snapped(pred.rows(), pred.cols());
    for (Eigen::Index i = 0; i < pred.rows(); ++i) snapped.row(i) = pool.row(nearest_row(pool, pred.row(i)));
    return mse(snapped, truth);
}

double retrieval_mse(const Matrix& pred, const Matrix& pool, std::span<const Matrix> references) {
    if (pred.rows() == 0) throw EvaluationError("no predictions to evaluate");
    if (static_cast<std::size_t>(pred.rows()) != references.size()) {
        throw ArgumentError("one reference list per prediction is required");
    }
    if (pool.rows() == 0) throw EvaluationError("retrieval pool is empty");
    if (pool.cols() != pred.cols()) throw ArgumentError("retrieval pool dimension mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i) {
        const auto& refs = references[static_cast<std::size_t>(i)];
        if (refs.rows() == 0 || refs.cols() != pred.cols()) {
            throw ArgumentError(fmt::format("reference list {} is empty or mis-sized", i));
        }
        const auto snapped = pool.row(nearest_row(pool, pred.row(i)));
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index r = 0; r < refs.rows(); ++r) best = std::min(best, (refs.row(r) - snapped).squaredNorm());
        total += best / static_cast<double>(pred.cols());
    }
    return total / static_cast<double>(pred.rows());
}

double ami(const Labels& labels_a, const Labels& labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw ArgumentError(fmt::format("label vectors differ in length ({} vs {})", labels_a.size(),
                                        labels_b.size()));
    }
    if (labels_a.size() < 2) throw ArgumentError("AMI needs at least two points");
    int ka = 0;
    int kb = 0;
    const auto a = compact(labels_a, ka);
    const auto b = compact(labels_b, kb);
    if (ka == 1 && kb == 1) return 1.0;

    const auto n_points = labels_a.size();
    const double n = static_cast<double>(n_points);
    std::vector<double> table(static_cast<std::size_t>(ka * kb), 0.0);
    std::vector<double> ra(static_cast<std::size_t>(ka), 0.0);
    std::vector<double> rb(static_cast<std::size_t>(kb), 0.0);
    for (std::size_t i = 0; i < n_points; ++i) {
        table[static_cast<std::size_t>(a[i] * kb + b[i])] += 1.0;
        ra[static_cast<std::size_t>(a[i])] += 1.0;
        rb[static_cast<std::size_t>(b[i])] += 1.0;
    }

    double mi = 0.0;
    for (int i = 0; i < ka; ++i) {
        for (int j = 0; j < kb; ++j) {
            const double nij = table[static_cast<std::size_t>(i * kb + j)];
            if (nij > 0.0) {
                mi += nij / n * std::log(n * nij / (ra[static_cast<std::size_t>(i)] * rb[static_cast<std::size_t>(j)]));
            }
        }
    }

    // Expected MI under random relabelling with fixed marginals.
    const double lg_n = std::lgamma(n + 1.0);
    double emi = 0.0;
    for (int i = 0; i < ka; ++i) {
        const double ai = ra[static_cast<std::size_t>(i)];
        for (int j = 0; j < kb; ++j) {
            const double bj = rb[static_cast<std::size_t>(j)];
            const double lo = std::max(1.0, ai + bj - n);
            const double hi = std::min(ai, bj);
            const double fixed = std::lgamma(ai + 1.0) + std::lgamma(bj + 1.0) +
                                 std::lgamma(n - ai + 1.0) + std::lgamma(n - bj + 1.0) - lg_n;
            for (double nij = lo; nij <= hi; nij += 1.0) {
                const double log_p = fixed - std::lgamma(nij + 1.0) - std::lgamma(ai - nij + 1.0) -
                                     std::lgamma(bj - nij + 1.0) - std::lgamma(n - ai - bj + nij + 1.0);
                emi += nij / n * std::log(n * nij / (ai * bj)) * std::exp(log_p);
            }
        }
    }

    const double norm = std::max(entropy(ra, n), entropy(rb, n));
    double denom = norm - emi;
    constexpr double tiny = std::numeric_limits<double>::epsilon();
    denom = denom < 0.0 ? std::min(denom, -tiny) : std::max(denom, tiny);
    return (mi - emi) / denom;
}

Misclustering misclustering_rate(const Labels& assignments, const Labels& latents, int clusters) {
    if (assignments.size() != latents.size()) {
        throw ArgumentError("assignments and latents differ in length");
    }
    if (assignments.empty()) throw EvaluationError("no labels to compare");
    Matrix table = Matrix::Zero(clusters, clusters);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int c = assignments[i];
        const int t = latents[i];
        if (c < 0 || c >= clusters || t < 0 || t >= clusters) {
            throw ArgumentError(fmt::format("label out of [0, {}) at position {}", clusters, i));
        }
        table(c, t) += 1.0;
    }
    Misclustering out;
    out.permutation = solve_max_assignment_lex(table);
    const double agree = assignment_total(table, out.permutation);
    out.rate = 1.0 - agree / static_cast<double>(assignments.size());
    return out;
}

double d_y_mean(const PointSet& y_points, const ClusterModel& y_model) {
    if (y_points.empty()) throw EvaluationError("no points for D_Y");
    double total = 0.0;
    for (std::size_t i = 0; i < y_points.size(); ++i) {
        const int c = assign(y_model, y_points.row(i));
        total += (y_points.row(i) - y_model.centroids.row(c)).norm();
    }
    return total / static_cast<double>(y_points.size());
}

std::vector<double> centroid_distance_terms(const Matrix& y_points, const ClusterModel& y_model) {
    std::vector<double> out(static_cast<std::size_t>(y_points.rows()));
    for (Eigen::Index i = 0; i < y_points.rows(); ++i) {
        const int c = assign(y_model, y_points.row(i));
        out[static_cast<std::size_t>(i)] =
            (y_points.row(i) - y_model.centroids.row(c)).squaredNorm() / static_cast<double>(y_points.cols());
    }
    return out;
}

std::map<std::string, double> winrate(const std::map<std::string, std::vector<double>>& per_trial_mse) {
    if (per_trial_mse.empty()) throw ArgumentError("winrate needs at least one model");
    const auto trials = per_trial_mse.begin()->second.size();
    if (trials == 0) throw ArgumentError("winrate needs at least one trial");
    for (const auto& [name, values] : per_trial_mse) {
        if (values.size() != trials) {
            throw ArgumentError(fmt::format("model '{}' has {} trials, expected {}", name,
                                            values.size(), trials));
        }
    }
    std::map<std::string, double> score;
    for (const auto& [name, values] : per_trial_mse) score[name] = 0.0;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        double best = inf;
        for (const auto& [name, values] : per_trial_mse) {
            const double v = std::isfinite(values[t]) ? values[t] : inf;
            best = std::min(best, v);
        }
        std::vector<std::string> winners;
        for (const auto& [name, values] : per_trial_mse) {
            const double v = std::isfinite(values[t]) ? values[t] : inf;
            if (v == best) winners.push_back(name);
        }
        for (const auto& w : winners) score[w] += 1.0 / static_cast<double>(winners.size());
    }
    for (auto& [name, s] : score) s /= static_cast<double>(trials);
    return score;
}

}  // namespace bridged
