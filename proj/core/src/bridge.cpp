#include "bridged/bridge.hpp"

#include <fmt/format.h>

#include "bridged/assignment.hpp"

namespace bridged {

namespace {

std::vector<int> majority_rows(const Eigen::MatrixXi& counts) {
    std::vector<int> out(static_cast<std::size_t>(counts.rows()), kUnresolved);
    for (Eigen::Index a = 0; a < counts.rows(); ++a) {
        int best = 0;
        for (Eigen::Index b = 0; b < counts.cols(); ++b) {
            if (counts(a, b) > best) {
                best = counts(a, b);
                out[static_cast<std::size_t>(a)] = static_cast<int>(b);
            }
        }
    }
    return out;
}

std::vector<int> matching_rows(const Eigen::MatrixXi& counts) {
    const auto rows = counts.rows();
    const auto cols = counts.cols();
    std::vector<int> out(static_cast<std::size_t>(rows), kUnresolved);
    if (rows == 0 || cols == 0) return out;
    const Matrix w = counts.cast<double>();
    if (rows <= cols) {
        const auto m = solve_max_assignment_lex(w);
        for (Eigen::Index a = 0; a < rows; ++a) out[static_cast<std::size_t>(a)] = m[static_cast<std::size_t>(a)];
    } else {
        const Matrix wt = w.transpose();
        const auto m = solve_max_assignment_lex(wt);
        for (Eigen::Index b = 0; b < cols; ++b) out[static_cast<std::size_t>(m[static_cast<std::size_t>(b)])] = static_cast<int>(b);
    }
    return out;
}

std::vector<int> margin_rows(const Eigen::MatrixXi& counts) {
    const auto rows = counts.rows();
    const auto cols = counts.cols();
    std::vector<int> out(static_cast<std::size_t>(rows), kUnresolved);
    std::vector<char> row_open(static_cast<std::size_t>(rows), 1);
    std::vector<char> col_open(static_cast<std::size_t>(cols), 1);
    for (Eigen::Index step = 0; step < std::min(rows, cols); ++step) {
        int pick_row = -1;
        int pick_col = -1;
        long pick_margin = -1;
        for (Eigen::Index a = 0; a < rows; ++a) {
            if (!row_open[static_cast<std::size_t>(a)]) continue;
            int top_col = -1;
            long top = -1;
            long second = -1;
            for (Eigen::Index b = 0; b < cols; ++b) {
                if (!col_open[static_cast<std::size_t>(b)]) continue;
                const long v = counts(a, b);
                if (v > top) {
                    second = top;
                    top = v;
                    top_col = static_cast<int>(b);
                } else if (v > second) {
                    second = v;
                }
            }
            // A single open column has no runner-up.
            const long margin = top - std::max(second, 0L);
            if (margin > pick_margin) {
                pick_margin = margin;
                pick_row = static_cast<int>(a);
                pick_col = top_col;
            }
        }
        out[static_cast<std::size_t>(pick_row)] = pick_col;
        row_open[static_cast<std::size_t>(pick_row)] = 0;
        col_open[static_cast<std::size_t>(pick_col)] = 0;
    }
    return out;
}

}  // namespace

std::string to_string(BridgeMethod method) {
    switch (method) {
        case BridgeMethod::majority: return "majority";
        case BridgeMethod::hungarian: return "hungarian";
        case BridgeMethod::margin: return "margin";
    }
    return "majority";
}

BridgeMethod parse_bridge_method(const std::string& text) {
    if (text == "majority") return BridgeMethod::majority;
    if (text == "hungarian") return BridgeMethod::hungarian;
    if (text == "margin") return BridgeMethod::margin;
    throw ArgumentError(fmt::format("unknown bridge method '{}'", text));
}

VoteMatrix build_votes(const ClusterModel& x_model, const ClusterModel& y_model,
                       const PairedSet& paired) {
    if (paired.empty()) throw ArgumentError("paired set is empty");
    if (paired.x_dim() != x_model.dim() || paired.y_dim() != y_model.dim()) {
        throw ArgumentError(fmt::format("paired dims ({}, {}) do not match models ({}, {})",
                                        paired.x_dim(), paired.y_dim(), x_model.dim(), y_model.dim()));
    }
    VoteMatrix votes{Eigen::MatrixXi::Zero(x_model.clusters(), y_model.clusters())};
    for (Eigen::Index j = 0; j < paired.x().rows(); ++j) {
        const int a = assign(x_model, paired.x().row(j));
        const int b = assign(y_model, paired.y().row(j));
        ++votes.counts(a, b);
    }
    return votes;
}

Bridge learn_majority(const VoteMatrix& votes) {
    return {majority_rows(votes.counts), majority_rows(votes.counts.transpose()),
            BridgeMethod::majority, votes};
}

Bridge learn_hungarian(const VoteMatrix& votes) {
    // The inverse permutation of the forward matching is itself a maximum
    // matching of the transpose; taking it keeps the two maps consistent
    // when several optima exist.
    auto forward = matching_rows(votes.counts);
    std::vector<int> inverse(forward.size(), kUnresolved);
    for (std::size_t a = 0; a < forward.size(); ++a) {
        if (forward[a] != kUnresolved) inverse[static_cast<std::size_t>(forward[a])] = static_cast<int>(a);
    }
    return {std::move(forward), std::move(inverse), BridgeMethod::hungarian, votes};
}

Bridge learn_margin(const VoteMatrix& votes) {
    return {margin_rows(votes.counts), margin_rows(votes.counts.transpose()),
            BridgeMethod::margin, votes};
}

Bridge learn_bridge(const VoteMatrix& votes, BridgeMethod method) {
    switch (method) {
        case BridgeMethod::majority: return learn_majority(votes);
        case BridgeMethod::hungarian: return learn_hungarian(votes);
        case BridgeMethod::margin: return learn_margin(votes);
    }
    return learn_majority(votes);
}

std::vector<int> cluster_to_latent(const Labels& assignments, const Labels& latents, int clusters,
                                   int latent_classes) {
    if (assignments.size() != latents.size()) {
        throw ArgumentError("assignments and latents differ in length");
    }
    Matrix table = Matrix::Zero(clusters, latent_classes);
    for (std::size_t i = 0; i < assignments.size(); ++i) {
        const int a = assignments[i];
        const int t = latents[i];
        if (a < 0 || a >= clusters || t < 0 || t >= latent_classes) {
            throw ArgumentError("label out of range in cluster_to_latent");
        }
        table(a, t) += 1.0;
    }
    std::vector<int> out(static_cast<std::size_t>(clusters), kUnresolved);
    if (clusters <= latent_classes) {
        const auto m = solve_max_assignment_lex(table);
        for (int a = 0; a < clusters; ++a) out[static_cast<std::size_t>(a)] = m[static_cast<std::size_t>(a)];
    } else {
        const Matrix tt = table.transpose();
        const auto m = solve_max_assignment_lex(tt);
        for (int t = 0; t < latent_classes; ++t) out[static_cast<std::size_t>(m[static_cast<std::size_t>(t)])] = t;
    }
    return out;
}

double bridging_accuracy(const Bridge& bridge, const ClusterModel& x_model,
                         const ClusterModel& y_model, const Labels& x_latents,
                         const Labels& y_latents) {
    if (x_latents.empty() || y_latents.empty()) {
        throw EvaluationError("bridging accuracy needs latent labels on both pools");
    }
    if (x_latents.size() != x_model.assignments.size() ||
        y_latents.size() != y_model.assignments.size()) {
        throw EvaluationError("latent labels do not align with the fitted pools");
    }
    int classes = 0;
    for (int t : x_latents) classes = std::max(classes, t + 1);
    for (int t : y_latents) classes = std::max(classes, t + 1);

    const auto sigma_x = cluster_to_latent(x_model.assignments, x_latents, x_model.clusters(), classes);
    const auto sigma_y = cluster_to_latent(y_model.assignments, y_latents, y_model.clusters(), classes);
    std::vector<int> y_of_latent(static_cast<std::size_t>(classes), kUnresolved);
    for (int b = 0; b < y_model.clusters(); ++b) {
        const int t = sigma_y[static_cast<std::size_t>(b)];
        if (t != kUnresolved) y_of_latent[static_cast<std::size_t>(t)] = b;
    }

    const auto mass = x_model.cluster_sizes();
    const double n = static_cast<double>(x_model.assignments.size());
    double correct = 0.0;
    for (int a = 0; a < x_model.clusters(); ++a) {
        const int t = sigma_x[static_cast<std::size_t>(a)];
        if (t == kUnresolved) continue;
        const int truth = y_of_latent[static_cast<std::size_t>(t)];
        const int got = bridge.forward[static_cast<std::size_t>(a)];
        if (truth != kUnresolved && got == truth) correct += static_cast<double>(mass[static_cast<std::size_t>(a)]);
    }
    return correct / n;
}

}  // namespace bridged
