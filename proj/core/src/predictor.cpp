#include "bridged/predictor.hpp"

#include <chrono>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "bridged/io.hpp"
#include "bridged/random.hpp"

namespace bridged {

namespace {

std::vector<Prediction> predict_through(const PointSet& test, const ClusterModel& source_model,
                                        const ClusterModel& target_model,
                                        const std::vector<int>& map) {
    if (!test.empty() && test.dim() != source_model.dim()) {
        throw ArgumentError(fmt::format("test points have dimension {}, model expects {}",
                                        test.dim(), source_model.dim()));
    }
    if (map.size() != static_cast<std::size_t>(source_model.clusters())) {
        throw ArgumentError("bridge size does not match the source model");
    }
    std::vector<Prediction> out(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        auto& p = out[i];
        p.id = test.id(i);
        p.source = assign(source_model, test.row(i));
        p.target = map[static_cast<std::size_t>(p.source)];
        if (p.target == kUnresolved) {
            p.status = PredictionStatus::unresolved_bridge;
        } else {
            p.status = PredictionStatus::ok;
            p.value = target_model.centroids.row(p.target);
        }
    }
    return out;
}

PointSet stack_for_fit(const PointSet& pool, const PointSet& extra) {
    Matrix pts(static_cast<Eigen::Index>(pool.size() + extra.size()), pool.empty() ? extra.dim() : pool.dim());
    if (!pool.empty()) pts.topRows(static_cast<Eigen::Index>(pool.size())) = pool.points();
    if (!extra.empty()) pts.bottomRows(static_cast<Eigen::Index>(extra.size())) = extra.points();
    std::optional<Labels> lat;
    if (pool.has_latent() && extra.has_latent()) {
        lat = pool.latent();
        lat->insert(lat->end(), extra.latent().begin(), extra.latent().end());
    }
    return PointSet(std::move(pts), {}, std::move(lat));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string to_string(PredictionStatus status) {
    return status == PredictionStatus::ok ? "ok" : "unresolved_bridge";
}

std::vector<Prediction> predict_forward(const PointSet& x_test, const ClusterModel& x_model,
                                        const ClusterModel& y_model, const Bridge& bridge) {
    return predict_through(x_test, x_model, y_model, bridge.forward);
}

std::vector<Prediction> predict_inverse(const PointSet& y_test, const ClusterModel& y_model,
                                        const ClusterModel& x_model, const Bridge& bridge) {
    return predict_through(y_test, y_model, x_model, bridge.inverse);
}

std::string to_string(Direction direction) {
    switch (direction) {
        case Direction::forward: return "forward";
        case Direction::inverse: return "inverse";
        case Direction::both: return "both";
    }
    return "forward";
}

Direction parse_direction(const std::string& text) {
    if (text == "forward") return Direction::forward;
    if (text == "inverse") return Direction::inverse;
    if (text == "both") return Direction::both;
    throw ArgumentError(fmt::format("unknown direction '{}'", text));
}

PipelineResult run_pipeline(const DataSplit& split, const PipelineConfig& config, RngSeed seed) {
    PipelineResult r;
    auto t0 = std::chrono::steady_clock::now();
    if (config.enlarge_pools && !split.pools_enlarged) {
        r.x_fit = stack_for_fit(split.x_pool, split.paired.x_points());
        r.y_fit = stack_for_fit(split.y_pool, split.paired.y_points());
    } else {
        r.x_fit = split.x_pool;
        r.y_fit = split.y_pool;
    }
    r.x_model = fit_clustering(r.x_fit, config.clusters, config.clustering, derive_seed(seed, 0));
    r.y_model = fit_clustering(r.y_fit, config.clusters, config.clustering, derive_seed(seed, 1));
    r.times.fit_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    r.bridge = learn_bridge(build_votes(r.x_model, r.y_model, split.paired), config.bridge_method);
    r.times.bridge_s = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    if (config.direction != Direction::inverse) {
        r.forward = predict_forward(split.x_test, r.x_model, r.y_model, r.bridge);
    }
    if (config.direction != Direction::forward) {
        r.inverse = predict_inverse(split.y_test, r.y_model, r.x_model, r.bridge);
    }
    r.times.predict_s = seconds_since(t0);
    return r;
}

std::size_t unresolved_count(const std::vector<Prediction>& predictions) {
    std::size_t n = 0;
    for (const auto& p : predictions) n += p.status == PredictionStatus::unresolved_bridge;
    return n;
}

void write_predictions_csv(std::ostream& out, const std::vector<Prediction>& predictions, int dim) {
    out << "id,source_cluster,target_cluster,status";
    for (int j = 0; j < dim; ++j) out << ",v" << j;
    out << '\n';
    for (const auto& p : predictions) {
        out << p.id << ',' << p.source << ',';
        if (p.target != kUnresolved) out << p.target;
        out << ',' << to_string(p.status);
        for (int j = 0; j < dim; ++j) {
            out << ',';
            if (p.status == PredictionStatus::ok) out << format_real(p.value(j));
        }
        out << '\n';
    }
}

std::vector<Prediction> read_predictions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("predictions file is empty");
    std::vector<Prediction> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (fields.size() < 4) throw ParseError(fmt::format("predictions:{}: too few fields", line_no));
        Prediction p;
        p.id = fields[0];
        try {
            p.source = std::stoi(fields[1]);
            p.target = fields[2].empty() ? kUnresolved : std::stoi(fields[2]);
            if (fields[3] == "ok") {
                p.status = PredictionStatus::ok;
                p.value.resize(static_cast<Eigen::Index>(fields.size() - 4));
                for (std::size_t j = 4; j < fields.size(); ++j) p.value(static_cast<Eigen::Index>(j - 4)) = std::stod(fields[j]);
            } else if (fields[3] == "unresolved_bridge") {
                p.status = PredictionStatus::unresolved_bridge;
            } else {
                throw ParseError(fmt::format("predictions:{}: unknown status '{}'", line_no, fields[3]));
            }
        } catch (const std::logic_error&) {
            throw ParseError(fmt::format("predictions:{}: malformed number", line_no));
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace bridged
