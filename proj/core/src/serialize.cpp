#include "bridged/serialize.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace bridged {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ParseError(fmt::format("'{}' must be a non-empty array of rows", what));
    const auto cols = j.front().size();
    Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_array() || j[i].size() != cols) {
            throw DimensionError(fmt::format("'{}' row {} has the wrong length", what, i));
        }
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
    return m;
}

json map_json(const std::vector<int>& map) {
    json out = json::array();
    for (int v : map) {
        if (v == kUnresolved) {
            out.push_back(nullptr);
        } else {
            out.push_back(v);
        }
    }
    return out;
}

std::vector<int> map_from(const json& j) {
    std::vector<int> out;
    for (const auto& v : j) out.push_back(v.is_null() ? kUnresolved : v.get<int>());
    return out;
}

json votes_json(const VoteMatrix& votes) {
    json rows = json::array();
    for (Eigen::Index a = 0; a < votes.counts.rows(); ++a) {
        json row = json::array();
        for (Eigen::Index b = 0; b < votes.counts.cols(); ++b) row.push_back(votes.counts(a, b));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class Fn>
auto parse_guard(const std::string& text, Fn&& fn) {
    try {
        return fn(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

void put_optional(json& j, const char* key, const std::optional<double>& v) {
    if (v) {
        j[key] = *v;
    } else {
        j[key] = nullptr;
    }
}

}  // namespace

std::string to_json(const ClusterModel& model) {
    json j;
    j["algo"] = to_string(model.algo);
    j["C"] = model.clusters();
    j["d"] = model.dim();
    j["inertia"] = model.inertia;
    j["iterations"] = model.iterations;
    j["centroids"] = matrix_json(model.centroids);
    return j.dump(2);
}

ClusterModel cluster_model_from_json(const std::string& text) {
    return parse_guard(text, [](const json& j) {
        ClusterModel m;
        m.algo = parse_cluster_algo(j.at("algo").get<std::string>());
        m.centroids = matrix_from(j.at("centroids"), "centroids");
        m.inertia = j.value("inertia", 0.0);
        m.iterations = j.value("iterations", 0);
        if (j.contains("C") && j["C"].get<int>() != m.clusters()) throw DimensionError("model C disagrees with centroids");
        if (j.contains("d") && j["d"].get<int>() != m.dim()) throw DimensionError("model d disagrees with centroids");
        if (!m.centroids.allFinite()) throw NumericError("model centroids are not finite");
        return m;
    });
}

std::string to_json(const VoteMatrix& votes) {
    json j;
    j["counts"] = votes_json(votes);
    return j.dump(2);
}

std::string to_json(const Bridge& bridge) {
    json j;
    j["method"] = to_string(bridge.method);
    j["forward"] = map_json(bridge.forward);
    j["inverse"] = map_json(bridge.inverse);
    j["counts"] = votes_json(bridge.votes);
    return j.dump(2);
}

Bridge bridge_from_json(const std::string& text) {
    return parse_guard(text, [](const json& j) {
        Bridge b;
        b.method = parse_bridge_method(j.at("method").get<std::string>());
        b.forward = map_from(j.at("forward"));
        b.inverse = map_from(j.at("inverse"));
        if (b.forward.size() != b.inverse.size()) throw ParseError("bridge forward and inverse differ in length");
        const auto c = static_cast<int>(b.forward.size());
        for (const auto* side : {&b.forward, &b.inverse}) {
            for (int v : *side) {
                if (v != kUnresolved && (v < 0 || v >= c)) {
                    throw ParseError(fmt::format("bridge entry {} is outside [0, {})", v, c));
                }
            }
        }
        if (j.contains("counts")) {
            const auto& rows = j["counts"];
            const auto cols = rows.empty() ? 0 : rows.front().size();
            b.votes.counts.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
            for (std::size_t a = 0; a < rows.size(); ++a) {
                for (std::size_t c = 0; c < cols; ++c) b.votes.counts(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = rows[a][c].get<int>();
            }
        }
        return b;
    });
}

std::string to_json(const MixtureSpec& spec) {
    json j;
    j["priors"] = spec.priors;
    j["mu_x"] = matrix_json(spec.mu_x);
    j["mu_y"] = matrix_json(spec.mu_y);
    j["sigma_x"] = spec.sigma_x;
    j["sigma_y"] = spec.sigma_y;
    return j.dump(2);
}

MixtureSpec mixture_spec_from_json(const std::string& text, RngSeed seed) {
    return parse_guard(text, [&](const json& j) {
        if (j.contains("delta_over_sigma")) {
            auto spec = make_separated_spec(j.at("clusters").get<int>(), j.at("x_dim").get<int>(),
                                            j.at("y_dim").get<int>(),
                                            j.at("delta_over_sigma").get<double>(), seed);
            if (j.contains("sigma")) {
                // Rescale noise and means together so delta/sigma is preserved.
                const double s = j["sigma"].get<double>();
                spec.mu_x *= s;
                spec.mu_y *= s;
                spec.sigma_x = spec.sigma_y = s;
            }
            return spec;
        }
        MixtureSpec spec;
        spec.priors = j.at("priors").get<std::vector<double>>();
        spec.mu_x = matrix_from(j.at("mu_x"), "mu_x");
        spec.mu_y = matrix_from(j.at("mu_y"), "mu_y");
        const double shared = j.value("sigma", 1.0);
        spec.sigma_x = j.value("sigma_x", shared);
        spec.sigma_y = j.value("sigma_y", shared);
        spec.validate();
        return spec;
    });
}

std::string to_json(const MetricsReport& report) {
    json j;
    j["mse"] = report.mse;
    put_optional(j, "retrieval_mse", report.retrieval_mse);
    put_optional(j, "ami_x", report.ami_x);
    put_optional(j, "ami_y", report.ami_y);
    put_optional(j, "eps_x", report.eps_x);
    put_optional(j, "eps_y", report.eps_y);
    put_optional(j, "eps_b", report.eps_b);
    put_optional(j, "d_y_mean", report.d_y_mean);
    j["unresolved_count"] = report.unresolved_count;
    return j.dump(2);
}

std::string to_json(const BoundReport& report) {
    json j;
    j["delta_x"] = report.delta_x;
    j["delta_y"] = report.delta_y;
    j["bound_x"] = report.bound_x;
    j["bound_y"] = report.bound_y;
    return j.dump(2);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write '{}'", path.string()));
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

}  // namespace bridged
