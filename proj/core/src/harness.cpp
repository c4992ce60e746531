#include "bridged/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "bridged/io.hpp"
#include "bridged/random.hpp"
#include "bridged/synth.hpp"

namespace bridged {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Dataset {
    PointSet x;
    PointSet y;
    Pairing pairing;
};

Dataset load_files(const FileSource& files) {
    Dataset d{load_pointset(files.x), load_pointset(files.y), {}};
    d.pairing = pair_by_id(d.x, d.y);
    return d;
}

Dataset synthesize(const SyntheticSource& src, int clusters, RngSeed trial) {
    auto spec = make_separated_spec(clusters, src.x_dim, src.y_dim, src.delta_over_sigma,
                                    derive_seed(trial, 0));
    spec.mu_x *= src.sigma;
    spec.mu_y *= src.sigma;
    spec.sigma_x = spec.sigma_y = src.sigma;
    auto sample = sample_mixture(spec, src.samples, derive_seed(trial, 1));
    Dataset d{std::move(sample.x), std::move(sample.y), {}};
    d.pairing = pair_by_id(d.x, d.y);
    return d;
}

std::vector<Direction> directions_of(Direction d) {
    if (d == Direction::both) return {Direction::forward, Direction::inverse};
    return {d};
}

/// Split the row set of predictions into resolved values and their truths.
void collect_resolved(const std::vector<Prediction>& preds, const Matrix& truth, Matrix& values,
                      Matrix& truths) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].status == PredictionStatus::ok) rows.push_back(static_cast<Eigen::Index>(i));
    }
    values.resize(static_cast<Eigen::Index>(rows.size()), truth.cols());
    truths.resize(static_cast<Eigen::Index>(rows.size()), truth.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        values.row(static_cast<Eigen::Index>(r)) = preds[static_cast<std::size_t>(rows[r])].value;
        truths.row(static_cast<Eigen::Index>(r)) = truth.row(rows[r]);
    }
}

void score_regression(MetricsReport& m, const Matrix& pred, const Matrix& truth, const Matrix& pool) {
    if (pred.rows() == 0) {
        m.mse = kNaN;
        return;
    }
    m.mse = mse(pred, truth);
    m.retrieval_mse = retrieval_mse(pred, pool, truth);
}

const Matrix& require_truth(const DataSplit& split) {
    if (split.x_test.empty()) throw EvaluationError("split has no test points");
    if (split.x_test_truth.rows() != static_cast<Eigen::Index>(split.x_test.size())) {
        throw EvaluationError("test points lack a hidden partner to score against");
    }
    return split.x_test_truth;
}

double misclustering(const ClusterModel& model, const PointSet& fit) {
    const int width = std::max(model.clusters(), fit.latent_classes());
    return misclustering_rate(model.assignments, fit.latent(), width).rate;
}

ModelRecord run_bc(const ExperimentConfig& cfg, const DataSplit& split, int clusters, RngSeed seed) {
    ModelRecord rec;
    rec.model = ModelKind::bc;
    const Matrix& truth = require_truth(split);
    PipelineConfig pc;
    pc.clusters = clusters;
    pc.clustering = cfg.clustering;
    pc.bridge_method = cfg.bridge_method;
    pc.enlarge_pools = cfg.enlarge_pools;
    pc.direction = Direction::forward;
    const auto res = run_pipeline(split, pc, seed);
    rec.times = res.times;
    rec.distance_evals = res.x_model.distance_evals + res.y_model.distance_evals;

    Matrix values;
    Matrix truths;
    collect_resolved(res.forward, truth, values, truths);
    rec.metrics.unresolved_count = unresolved_count(res.forward);
    score_regression(rec.metrics, values, truths, split.y_pool.points());

    if (res.x_fit.has_latent() && res.y_fit.has_latent()) {
        rec.metrics.ami_x = ami(res.x_model.assignments, res.x_fit.latent());
        rec.metrics.ami_y = ami(res.y_model.assignments, res.y_fit.latent());
        rec.metrics.eps_x = misclustering(res.x_model, res.x_fit);
        rec.metrics.eps_y = misclustering(res.y_model, res.y_fit);
        rec.metrics.eps_b = 1.0 - bridging_accuracy(res.bridge, res.x_model, res.y_model,
                                                    res.x_fit.latent(), res.y_fit.latent());
    }
    rec.metrics.d_y_mean = d_y_mean(res.y_fit, res.y_model);
    return rec;
}

ModelRecord run_baseline(const ExperimentConfig& cfg, ModelKind kind, const DataSplit& split,
                         RngSeed seed) {
    ModelRecord rec;
    rec.model = kind;
    const Matrix& truth = require_truth(split);
    const auto t0 = Clock::now();
    Matrix pred;
    if (kind == ModelKind::knn) {
        pred = knn_predict(split.paired, split.x_test, cfg.knn_k);
        rec.times.predict_s = seconds_since(t0);
    } else {
        const auto out = kind == ModelKind::eot ? eot_predict(split, cfg.eot)
                                                : gw_predict(split, cfg.gw, seed);
        rec.times.fit_s = seconds_since(t0);
        rec.coupling_entries = out.coupling_entries;
        pred = out.predictions;
        if (!pred.allFinite()) throw NumericError("transport read-out is not finite");
    }
    score_regression(rec.metrics, pred, truth, split.y_pool.points());
    return rec;
}

ModelRecord failed(ModelKind kind, const std::string& message) {
    ModelRecord rec;
    rec.model = kind;
    rec.metrics.mse = kNaN;
    rec.error = message.empty() ? "unknown error" : message;
    return rec;
}

std::vector<TrialRecord> trial_on(const ExperimentConfig& config, const Dataset* preloaded,
                                  int clusters, int pairs, int seed_index, std::uint64_t trial_seed) {
    const RngSeed trial{trial_seed};
    std::vector<TrialRecord> out;
    std::optional<Dataset> local;
    std::string data_error;
    try {
        if (config.synthetic) local = synthesize(*config.synthetic, clusters, trial);
    } catch (const std::exception& e) {
        data_error = e.what();
    }
    const Dataset* data = local ? &*local : preloaded;

    const auto dirs = directions_of(config.direction);
    for (std::size_t di = 0; di < dirs.size(); ++di) {
        TrialRecord rec;
        rec.setting = {clusters, pairs, seed_index, trial_seed, config.mode, dirs[di]};
        std::optional<DataSplit> split;
        std::string split_error = data_error;
        if (split_error.empty()) {
            try {
                if (data == nullptr) throw ArgumentError("no data source");
                SplitOptions so;
                so.mode = config.mode;
                so.pairs_per_cluster = pairs;
                so.holdout_fraction = config.holdout_fraction;
                so.pools = config.pools;
                so.minor_pool_fraction = config.minor_pool_fraction;
                so.inverse = dirs[di] == Direction::inverse;
                auto s = make_split(data->x, data->y, data->pairing, so, derive_seed(trial, 2, di));
                split = so.inverse ? s.swapped() : std::move(s);
            } catch (const std::exception& e) {
                split_error = e.what();
            }
        }
        for (std::size_t mi = 0; mi < config.models.size(); ++mi) {
            const auto kind = config.models[mi];
            if (!split) {
                rec.models.push_back(failed(kind, split_error));
                continue;
            }
            const auto seed = derive_seed(trial, 3 + mi, di);
            try {
                rec.models.push_back(kind == ModelKind::bc ? run_bc(config, *split, clusters, seed)
                                                           : run_baseline(config, kind, *split, seed));
            } catch (const std::exception& e) {
                rec.models.push_back(failed(kind, e.what()));
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

// ---- JSON config -------------------------------------------------------

void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ArgumentError(fmt::format("'{}' must be an object", where));
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
            allowed.end()) {
            throw ArgumentError(fmt::format("unknown key '{}' in {}", key, where));
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

std::vector<ModelKind> read_models(const json& j) {
    std::vector<ModelKind> out;
    for (const auto& m : j) {
        const auto kind = parse_model_kind(m.get<std::string>());
        if (std::find(out.begin(), out.end(), kind) != out.end()) {
            throw ArgumentError(fmt::format("model '{}' listed twice", m.get<std::string>()));
        }
        out.push_back(kind);
    }
    return out;
}

void read_clustering(const json& j, ClusterOptions& c) {
    check_keys(j, "clustering", {"algo", "restarts", "max_iter", "tol", "batch"});
    if (j.contains("algo")) c.algo = parse_cluster_algo(j["algo"].get<std::string>());
    read(j, "restarts", c.restarts);
    read(j, "max_iter", c.max_iter);
    read(j, "tol", c.tol);
    read(j, "batch", c.batch);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string opt_real(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

std::string setting_key(const Setting& s) {
    return fmt::format("C={},pairs={}", s.clusters, s.pairs_per_cluster);
}

double finite_mean(const std::vector<double>& v) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : v) {
        if (std::isfinite(x)) {
            sum += x;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : kNaN;
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string to_string(ModelKind model) {
    switch (model) {
        case ModelKind::bc: return "bc";
        case ModelKind::knn: return "knn";
        case ModelKind::eot: return "eot";
        case ModelKind::gw: return "gw";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& text) {
    if (text == "bc") return ModelKind::bc;
    if (text == "knn") return ModelKind::knn;
    if (text == "eot") return ModelKind::eot;
    if (text == "gw") return ModelKind::gw;
    throw ArgumentError(fmt::format("unknown model '{}' (expected bc, knn, eot or gw)", text));
}

void ExperimentConfig::validate() const {
    if (synthetic.has_value() == files.has_value()) {
        throw ArgumentError("exactly one of data.synthetic and data.files is required");
    }
    if (clusters.empty()) throw ArgumentError("clusters grid is empty");
    if (pairs_per_cluster.empty()) throw ArgumentError("pairs_per_cluster grid is empty");
    if (models.empty()) throw ArgumentError("models list is empty");
    if (seeds < 1) throw ArgumentError("seeds must be >= 1");
    if (threads < 1) throw ArgumentError("threads must be >= 1");
    for (int c : clusters) {
        if (c < 1) throw ArgumentError(fmt::format("cluster count {} must be >= 1", c));
    }
    for (int p : pairs_per_cluster) {
        if (p < 1) throw ArgumentError(fmt::format("pairs_per_cluster {} must be >= 1", p));
    }
    if (!(minor_pool_fraction > 0.0 && minor_pool_fraction < 1.0)) {
        throw ArgumentError("pools.minor_fraction must be in (0, 1)");
    }
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
        throw ArgumentError("holdout_fraction must be in (0, 1)");
    }
    if (synthetic) {
        if (synthetic->x_dim < 1 || synthetic->y_dim < 1) throw ArgumentError("dimensions must be >= 1");
        if (!(synthetic->delta_over_sigma > 0.0)) throw ArgumentError("delta_over_sigma must be > 0");
        if (!(synthetic->sigma > 0.0)) throw ArgumentError("sigma must be > 0");
        if (synthetic->samples < 2) throw ArgumentError("samples must be >= 2");
    }
    gw.gw.validate();
}

ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    try {
        const json j = json::parse(text);
        check_keys(j, "config",
                   {"data", "clusters", "pairs_per_cluster", "seeds", "master_seed", "mode",
                    "direction", "models", "pools", "holdout_fraction", "clustering", "bridge",
                    "enlarge_pools", "knn_k", "eot", "gw", "threads", "output_dir"});
        if (!j.contains("data")) throw ArgumentError("config lacks 'data'");
        const auto& data = j["data"];
        check_keys(data, "data", {"synthetic", "files"});
        if (data.contains("synthetic")) {
            const auto& s = data["synthetic"];
            check_keys(s, "data.synthetic", {"x_dim", "y_dim", "delta_over_sigma", "sigma", "samples"});
            SyntheticSource src;
            read(s, "x_dim", src.x_dim);
            read(s, "y_dim", src.y_dim);
            read(s, "delta_over_sigma", src.delta_over_sigma);
            read(s, "sigma", src.sigma);
            read(s, "samples", src.samples);
            cfg.synthetic = src;
        }
        if (data.contains("files")) {
            const auto& f = data["files"];
            check_keys(f, "data.files", {"x", "y"});
            FileSource src{f.at("x").get<std::string>(), f.at("y").get<std::string>()};
            if (src.x.is_relative()) src.x = base_dir / src.x;
            if (src.y.is_relative()) src.y = base_dir / src.y;
            cfg.files = src;
        }
        read(j, "clusters", cfg.clusters);
        read(j, "pairs_per_cluster", cfg.pairs_per_cluster);
        read(j, "seeds", cfg.seeds);
        read(j, "master_seed", cfg.master_seed);
        if (j.contains("mode")) cfg.mode = parse_split_mode(j["mode"].get<std::string>());
        if (j.contains("direction")) cfg.direction = parse_direction(j["direction"].get<std::string>());
        if (j.contains("models")) cfg.models = read_models(j["models"]);
        if (j.contains("pools")) {
            const auto& p = j["pools"];
            check_keys(p, "pools", {"policy", "minor_fraction"});
            if (p.contains("policy")) {
                const auto policy = p["policy"].get<std::string>();
                if (policy == "shared") {
                    cfg.pools = PoolPolicy::shared;
                } else if (policy == "disjoint") {
                    cfg.pools = PoolPolicy::disjoint;
                } else {
                    throw ArgumentError(fmt::format("unknown pool policy '{}'", policy));
                }
            }
            read(p, "minor_fraction", cfg.minor_pool_fraction);
        }
        read(j, "holdout_fraction", cfg.holdout_fraction);
        if (j.contains("clustering")) read_clustering(j["clustering"], cfg.clustering);
        if (j.contains("bridge")) cfg.bridge_method = parse_bridge_method(j["bridge"].get<std::string>());
        read(j, "enlarge_pools", cfg.enlarge_pools);
        read(j, "knn_k", cfg.knn_k);
        if (j.contains("eot")) {
            const auto& e = j["eot"];
            check_keys(e, "eot", {"eps", "ridge_alpha", "max_iter", "tol"});
            read(e, "eps", cfg.eot.eps);
            read(e, "ridge_alpha", cfg.eot.ridge_alpha);
            read(e, "max_iter", cfg.eot.max_iter);
            read(e, "tol", cfg.eot.tol);
        }
        if (j.contains("gw")) {
            const auto& g = j["gw"];
            check_keys(g, "gw", {"eps", "max_iter", "tol", "inner_max_iter", "inner_tol", "restarts",
                                 "restart_noise"});
            read(g, "eps", cfg.gw.gw.eps);
            read(g, "max_iter", cfg.gw.gw.max_iter);
            read(g, "tol", cfg.gw.gw.tol);
            read(g, "inner_max_iter", cfg.gw.gw.inner_max_iter);
            read(g, "inner_tol", cfg.gw.gw.inner_tol);
            read(g, "restarts", cfg.gw.restarts);
            read(g, "restart_noise", cfg.gw.restart_noise);
        }
        read(j, "threads", cfg.threads);
        if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("config: {}", e.what()));
    }
    cfg.validate();
    return cfg;
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& config, int clusters,
                                   int pairs_per_cluster, int seed_index, std::uint64_t trial_seed) {
    std::optional<Dataset> files;
    if (config.files) files = load_files(*config.files);
    return trial_on(config, files ? &*files : nullptr, clusters, pairs_per_cluster, seed_index,
                    trial_seed);
}

std::vector<TrialRecord> run_trials(const ExperimentConfig& config) {
    config.validate();
    std::optional<Dataset> files;
    if (config.files) files = load_files(*config.files);

    struct Task {
        int clusters;
        int pairs;
        int seed_index;
    };
    std::vector<Task> tasks;
    for (int c : config.clusters) {
        for (int p : config.pairs_per_cluster) {
            for (int s = 0; s < config.seeds; ++s) tasks.push_back({c, p, s});
        }
    }
    const RngSeed master{config.master_seed};
    std::vector<std::vector<TrialRecord>> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            results[i] = trial_on(config, files ? &*files : nullptr, t.clusters, t.pairs,
                                  t.seed_index, derive_seed(master, i).value);
        }
    };
    const auto n_threads = std::min<std::size_t>(static_cast<std::size_t>(config.threads), tasks.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<TrialRecord> out;
    const auto dirs = directions_of(config.direction);
    for (std::size_t di = 0; di < dirs.size(); ++di) {
        for (auto& per_task : results) out.push_back(std::move(per_task[di]));
    }
    return out;
}

std::vector<WinrateRow> winrate_table(const std::vector<TrialRecord>& records) {
    // Keep first-seen order of directions, settings and models.
    std::vector<std::string> dirs;
    std::map<std::string, std::vector<std::string>> settings;
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<double>>> per_setting;
    std::map<std::string, std::map<std::string, std::vector<double>>> overall;
    for (const auto& r : records) {
        const auto dir = to_string(r.setting.direction);
        const auto key = setting_key(r.setting);
        if (std::find(dirs.begin(), dirs.end(), dir) == dirs.end()) dirs.push_back(dir);
        auto& keys = settings[dir];
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
        for (const auto& m : r.models) {
            per_setting[{dir, key}][to_string(m.model)].push_back(m.metrics.mse);
            overall[dir][to_string(m.model)].push_back(m.metrics.mse);
        }
    }
    std::vector<WinrateRow> rows;
    for (const auto& dir : dirs) {
        for (const auto& key : settings[dir]) rows.push_back({dir, key, winrate(per_setting[{dir, key}])});
        rows.push_back({dir, "overall", winrate(overall[dir])});
    }
    return rows;
}

void write_results(const std::vector<TrialRecord>& records, const ExperimentConfig& config,
                   const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error(fmt::format("cannot write '{}'", (dir / name).string()));
        return f;
    };

    {
        auto f = open("trials.csv");
        f << "direction,clusters,pairs_per_cluster,seed,mode,trial_seed,model,mse,retrieval_mse,"
             "eps_x,eps_y,eps_b,ami_x,ami_y,d_y_mean,unresolved_count,distance_evals,"
             "coupling_entries,status\n";
        for (const auto& r : records) {
            const auto& s = r.setting;
            for (const auto& m : r.models) {
                const auto& x = m.metrics;
                f << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                                 to_string(s.direction), s.clusters, s.pairs_per_cluster, s.seed_index,
                                 to_string(s.mode), s.trial_seed, to_string(m.model),
                                 format_real(x.mse), opt_real(x.retrieval_mse), opt_real(x.eps_x),
                                 opt_real(x.eps_y), opt_real(x.eps_b), opt_real(x.ami_x),
                                 opt_real(x.ami_y), opt_real(x.d_y_mean), x.unresolved_count,
                                 m.distance_evals, m.coupling_entries,
                                 m.error.empty() ? "ok" : csv_field("error: " + m.error));
            }
        }
    }
    {
        auto f = open("timings.csv");
        f << "direction,clusters,pairs_per_cluster,seed,model,fit_s,bridge_s,predict_s\n";
        for (const auto& r : records) {
            const auto& s = r.setting;
            for (const auto& m : r.models) {
                f << fmt::format("{},{},{},{},{},{},{},{}\n", to_string(s.direction), s.clusters,
                                 s.pairs_per_cluster, s.seed_index, to_string(m.model),
                                 format_real(m.times.fit_s), format_real(m.times.bridge_s),
                                 format_real(m.times.predict_s));
            }
        }
    }

    const auto table = winrate_table(records);
    {
        auto f = open("winrates.csv");
        f << "direction,setting";
        for (auto m : config.models) f << ',' << to_string(m);
        f << '\n';
        for (const auto& row : table) {
            f << row.direction << ',' << csv_field(row.setting);
            for (auto m : config.models) {
                const auto it = row.rates.find(to_string(m));
                f << ',' << (it == row.rates.end() ? std::string() : format_real(it->second));
            }
            f << '\n';
        }
    }

    {
        // Per (direction, C, pairs, model) means over trials with a finite value.
        struct Acc {
            Setting setting;
            ModelKind model;
            std::vector<double> mse, retrieval, eps_x, eps_y, eps_b, ami_x, ami_y, d_y;
            std::size_t errors = 0;
            std::size_t unresolved = 0;
        };
        std::vector<Acc> accs;
        auto find = [&](const Setting& s, ModelKind m) -> Acc& {
            for (auto& a : accs) {
                if (a.setting.direction == s.direction && a.setting.clusters == s.clusters &&
                    a.setting.pairs_per_cluster == s.pairs_per_cluster && a.model == m) {
                    return a;
                }
            }
            accs.push_back({s, m, {}, {}, {}, {}, {}, {}, {}, {}, 0, 0});
            return accs.back();
        };
        auto push = [](std::vector<double>& v, const std::optional<double>& x) { v.push_back(x ? *x : kNaN); };
        for (const auto& r : records) {
            for (const auto& m : r.models) {
                auto& a = find(r.setting, m.model);
                a.mse.push_back(m.metrics.mse);
                push(a.retrieval, m.metrics.retrieval_mse);
                push(a.eps_x, m.metrics.eps_x);
                push(a.eps_y, m.metrics.eps_y);
                push(a.eps_b, m.metrics.eps_b);
                push(a.ami_x, m.metrics.ami_x);
                push(a.ami_y, m.metrics.ami_y);
                push(a.d_y, m.metrics.d_y_mean);
                a.errors += m.error.empty() ? 0 : 1;
                a.unresolved += m.metrics.unresolved_count;
            }
        }
        json settings = json::array();
        for (const auto& a : accs) {
            std::size_t finite = 0;
            for (double v : a.mse) finite += std::isfinite(v) ? 1 : 0;
            settings.push_back({{"direction", to_string(a.setting.direction)},
                                {"clusters", a.setting.clusters},
                                {"pairs_per_cluster", a.setting.pairs_per_cluster},
                                {"mode", to_string(a.setting.mode)},
                                {"model", to_string(a.model)},
                                {"trials", a.mse.size()},
                                {"scored_trials", finite},
                                {"errors", a.errors},
                                {"unresolved_total", a.unresolved},
                                {"mean_mse", real_or_null(finite_mean(a.mse))},
                                {"mean_retrieval_mse", real_or_null(finite_mean(a.retrieval))},
                                {"mean_eps_x", real_or_null(finite_mean(a.eps_x))},
                                {"mean_eps_y", real_or_null(finite_mean(a.eps_y))},
                                {"mean_eps_b", real_or_null(finite_mean(a.eps_b))},
                                {"mean_ami_x", real_or_null(finite_mean(a.ami_x))},
                                {"mean_ami_y", real_or_null(finite_mean(a.ami_y))},
                                {"mean_d_y", real_or_null(finite_mean(a.d_y))}});
        }
        json wr = json::array();
        for (const auto& row : table) {
            wr.push_back({{"direction", row.direction}, {"setting", row.setting}, {"rates", row.rates}});
        }
        json agg = {{"master_seed", config.master_seed},
                    {"seeds", config.seeds},
                    {"settings", std::move(settings)},
                    {"winrates", std::move(wr)}};
        auto f = open("aggregate.json");
        f << agg.dump(2) << '\n';
    }
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config) {
    auto records = run_trials(config);
    write_results(records, config, config.output_dir);
    return records;
}

// ---- scaling -----------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ArgumentError("slope needs at least two points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ArgumentError("slope needs positive values");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

ScalingReport run_scaling_bench(const ScalingConfig& config) {
    if (config.sizes.size() < 2) throw ArgumentError("bench needs at least two sizes");
    for (std::size_t i = 1; i < config.sizes.size(); ++i) {
        if (config.sizes[i] <= config.sizes[i - 1]) throw ArgumentError("bench sizes must increase");
    }
    if (config.repeats < 1) throw ArgumentError("repeats must be >= 1");
    const RngSeed master{config.master_seed};
    const auto spec = make_separated_spec(config.clusters, config.x_dim, config.y_dim,
                                          config.delta_over_sigma, derive_seed(master, 0));
    ScalingReport report;
    std::set<ModelKind> stopped;
    for (std::size_t n : config.sizes) {
        auto sample = sample_mixture(spec, n, derive_seed(master, 1, n));
        SplitOptions so;
        so.pools = PoolPolicy::shared;
        so.pairs_per_cluster = 1;
        // Shared pools with the pairs merged back: n_X = n_Y = n.
        so.enlarge_pools = true;
        const auto split = make_split(sample.x, sample.y, pair_by_id(sample.x, sample.y), so,
                                      derive_seed(master, 2, n));
        for (auto model : config.models) {
            ScalingCell cell;
            cell.model = model;
            cell.n = n;
            if (stopped.count(model)) {
                cell.seconds = kNaN;
                cell.timed_out = true;
                report.cells.push_back(cell);
                continue;
            }
            std::vector<double> times;
            for (int r = 0; r < config.repeats; ++r) {
                const auto t0 = Clock::now();
                if (model == ModelKind::bc) {
                    PipelineConfig pc;
                    pc.clusters = config.clusters;
                    pc.clustering.restarts = 1;
                    pc.clustering.max_iter = config.bc_max_iter;
                    pc.clustering.tol = 0.0;
                    run_pipeline(split, pc, derive_seed(master, 3, static_cast<std::uint64_t>(r)));
                    const double d = config.x_dim;
                    const double dp = config.y_dim;
                    const double c = config.clusters;
                    cell.memory_units = static_cast<double>(split.x_pool.size()) * d +
                                        static_cast<double>(split.y_pool.size()) * dp + c * (d + dp) + c * c;
                } else if (model == ModelKind::knn) {
                    knn_predict(split.paired, split.x_test, 1);
                    cell.memory_units = static_cast<double>(split.paired.size()) * (config.x_dim + config.y_dim);
                } else if (model == ModelKind::eot) {
                    EotConfig ec;
                    ec.max_iter = config.transport_max_iter;
                    ec.tol = 0.0;
                    cell.memory_units = static_cast<double>(eot_predict(split, ec).coupling_entries);
                } else {
                    GwPredictConfig gc;
                    gc.restarts = 1;
                    gc.gw.max_iter = 1;
                    gc.gw.tol = 0.0;
                    gc.gw.inner_max_iter = config.transport_max_iter;
                    gc.gw.inner_tol = 0.0;
                    cell.memory_units = static_cast<double>(
                        gw_predict(split, gc, derive_seed(master, 4, static_cast<std::uint64_t>(r))).coupling_entries);
                }
                times.push_back(seconds_since(t0));
                if (times.back() > config.timeout_s) break;
            }
            cell.seconds = median(times);
            if (times.back() > config.timeout_s) {
                cell.timed_out = true;
                cell.seconds = kNaN;
                stopped.insert(model);
            }
            report.cells.push_back(cell);
        }
    }
    for (auto model : config.models) {
        std::vector<double> ns;
        std::vector<double> ts;
        std::vector<double> ms;
        for (const auto& c : report.cells) {
            if (c.model != model || c.timed_out) continue;
            ns.push_back(static_cast<double>(c.n));
            ts.push_back(std::max(c.seconds, 1e-9));
            ms.push_back(c.memory_units);
        }
        if (ns.size() >= 2) {
            report.time_slope[to_string(model)] = loglog_slope(ns, ts);
            report.memory_slope[to_string(model)] = loglog_slope(ns, ms);
        }
    }
    return report;
}

ScalingConfig parse_scaling_config(const std::string& text) {
    ScalingConfig cfg;
    try {
        const json j = json::parse(text);
        check_keys(j, "bench config",
                   {"sizes", "clusters", "x_dim", "y_dim", "delta_over_sigma", "models", "repeats",
                    "master_seed", "bc_max_iter", "transport_max_iter", "timeout_s"});
        read(j, "sizes", cfg.sizes);
        read(j, "clusters", cfg.clusters);
        read(j, "x_dim", cfg.x_dim);
        read(j, "y_dim", cfg.y_dim);
        read(j, "delta_over_sigma", cfg.delta_over_sigma);
        if (j.contains("models")) cfg.models = read_models(j["models"]);
        read(j, "repeats", cfg.repeats);
        read(j, "master_seed", cfg.master_seed);
        read(j, "bc_max_iter", cfg.bc_max_iter);
        read(j, "transport_max_iter", cfg.transport_max_iter);
        read(j, "timeout_s", cfg.timeout_s);
    } catch (const json::exception& e) {
        throw ParseError(fmt::format("bench config: {}", e.what()));
    }
    return cfg;
}

std::string to_json(const ScalingReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"model", to_string(c.model)},
                         {"n", c.n},
                         {"seconds", real_or_null(c.seconds)},
                         {"memory_units", c.memory_units},
                         {"timed_out", c.timed_out}});
    }
    json j = {{"cells", std::move(cells)},
              {"time_slope", report.time_slope},
              {"memory_slope", report.memory_slope},
              {"note", "seconds are wall-clock and machine-dependent; memory_units are exact counters"}};
    return j.dump(2);
}

}  // namespace bridged
