#include "bridged_cli/cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "bridged/bridge.hpp"
#include "bridged/clustering.hpp"
#include "bridged/harness.hpp"
#include "bridged/io.hpp"
#include "bridged/metrics.hpp"
#include "bridged/predictor.hpp"
#include "bridged/random.hpp"
#include "bridged/serialize.hpp"
#include "bridged/split.hpp"
#include "bridged/synth.hpp"

namespace bridged {

namespace {

namespace fs = std::filesystem;

/// Bad invocation: reported with exit code 2.
struct UsageError : Error {
    using Error::Error;
};

fs::path existing(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(fmt::format("{} is required", what));
    if (!fs::is_regular_file(path)) throw UsageError(fmt::format("{} '{}' does not exist", what, path));
    return path;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write '{}'", path.string()));
    return f;
}

struct Common {
    std::string out = ".";
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_out(CLI::App* cmd, Common& c) {
    cmd->add_option("--out", c.out, "Output directory")->required();
}

void add_seed(CLI::App* cmd, Common& c) {
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&c](const std::uint64_t& v) {
            c.seed = v;
            c.seed_set = true;
        },
        "Master seed");
}

// ---- generate ----------------------------------------------------------

struct GenerateArgs {
    Common common;
    std::string spec;
    std::size_t n = 1000;
};

void run_generate(const GenerateArgs& a, std::ostream& out) {
    const auto text = read_text_file(existing(a.spec, "--spec"));
    const RngSeed seed{a.common.seed};
    const auto spec = mixture_spec_from_json(text, derive_seed(seed, 0));
    const auto sample = sample_mixture(spec, a.n, derive_seed(seed, 1));
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    save_pointset(dir / "x.csv", sample.x);
    save_pointset(dir / "y.csv", sample.y);
    {
        auto f = open_out(dir / "latents.csv");
        f << "id,latent\n";
        for (std::size_t i = 0; i < sample.latent.size(); ++i) f << sample.x.id(i) << ',' << sample.latent[i] << '\n';
    }
    write_text_file(dir / "spec.json", to_json(spec));
    if (spec.clusters() >= 2) write_text_file(dir / "bound.json", to_json(eval_bound(spec)));
    out << fmt::format("wrote {} samples to {}\n", a.n, dir.string());
}

// ---- split -------------------------------------------------------------

struct SplitArgs {
    Common common;
    std::string x;
    std::string y;
    int pairs = 1;
    std::string mode = "transductive";
    std::string pools = "shared";
    double minor_fraction = 0.1;
    double holdout = 0.2;
    bool inverse = false;
};

void run_split(const SplitArgs& a, std::ostream& out) {
    const auto x = load_pointset(existing(a.x, "--x"));
    const auto y = load_pointset(existing(a.y, "--y"));
    SplitOptions so;
    so.mode = parse_split_mode(a.mode);
    so.pairs_per_cluster = a.pairs;
    so.holdout_fraction = a.holdout;
    so.minor_pool_fraction = a.minor_fraction;
    so.inverse = a.inverse;
    if (a.pools == "shared") {
        so.pools = PoolPolicy::shared;
    } else if (a.pools == "disjoint") {
        so.pools = PoolPolicy::disjoint;
    } else {
        throw UsageError(fmt::format("--pools must be shared or disjoint, got '{}'", a.pools));
    }
    const auto split = make_split(x, y, pair_by_id(x, y), so, RngSeed{a.common.seed});
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    save_pointset(dir / "x_pool.csv", split.x_pool);
    save_pointset(dir / "y_pool.csv", split.y_pool);
    save_pointset(dir / "paired_x.csv", split.paired.x_points());
    save_pointset(dir / "paired_y.csv", split.paired.y_points());
    save_pointset(dir / "x_test.csv", split.x_test);
    save_pointset(dir / "y_test.csv", split.y_test);
    if (split.x_test_truth.rows() > 0) {
        save_pointset(dir / "x_test_truth.csv", PointSet(split.x_test_truth, split.x_test.ids()));
    }
    if (split.y_test_truth.rows() > 0) {
        save_pointset(dir / "y_test_truth.csv", PointSet(split.y_test_truth, split.y_test.ids()));
    }
    out << fmt::format("n_X={} n_Y={} k={} test={}\n", split.x_pool.size(), split.y_pool.size(),
                       split.paired.size(), split.x_test.size());
}

// ---- fit ---------------------------------------------------------------

struct FitArgs {
    Common common;
    std::string data;
    int clusters = 3;
    std::string algo = "lloyd";
    int restarts = 10;
    int max_iter = 100;
    double tol = 1e-6;
    int batch = 256;
};

void run_fit(const FitArgs& a, std::ostream& out) {
    const auto data = load_pointset(existing(a.data, "--data"));
    ClusterOptions co;
    co.algo = parse_cluster_algo(a.algo);
    co.restarts = a.restarts;
    co.max_iter = a.max_iter;
    co.tol = a.tol;
    co.batch = a.batch;
    const auto model = fit_clustering(data, a.clusters, co, RngSeed{a.common.seed});
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    write_text_file(dir / "model.json", to_json(model));
    auto f = open_out(dir / "assignments.csv");
    f << "id,cluster\n";
    for (std::size_t i = 0; i < data.size(); ++i) f << data.id(i) << ',' << model.assignments[i] << '\n';
    out << fmt::format("C={} inertia={}\n", model.clusters(), format_real(model.inertia));
}

// ---- bridge ------------------------------------------------------------

struct BridgeArgs {
    Common common;
    std::string x_model;
    std::string y_model;
    std::string paired_x;
    std::string paired_y;
    std::string method = "majority";
};

void run_bridge(const BridgeArgs& a, std::ostream& out) {
    const auto xm = cluster_model_from_json(read_text_file(existing(a.x_model, "--x-model")));
    const auto ym = cluster_model_from_json(read_text_file(existing(a.y_model, "--y-model")));
    const auto px = load_pointset(existing(a.paired_x, "--paired-x"));
    const auto py = load_pointset(existing(a.paired_y, "--paired-y"));
    // Rows are matched by id.
    const auto pairing = pair_by_id(px, py);
    if (pairing.empty()) throw ArgumentError("paired files share no ids");
    Matrix mx(static_cast<Eigen::Index>(pairing.size()), px.dim());
    Matrix my(static_cast<Eigen::Index>(pairing.size()), py.dim());
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < pairing.size(); ++i) {
        mx.row(static_cast<Eigen::Index>(i)) = px.row(*px.find(pairing[i].first));
        my.row(static_cast<Eigen::Index>(i)) = py.row(*py.find(pairing[i].second));
        ids.push_back(pairing[i].first);
    }
    const PairedSet paired(std::move(mx), std::move(my), std::move(ids));
    const auto bridge = learn_bridge(build_votes(xm, ym, paired), parse_bridge_method(a.method));
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    write_text_file(dir / "bridge.json", to_json(bridge));
    std::size_t unresolved = 0;
    for (int b : bridge.forward) unresolved += b == kUnresolved ? 1 : 0;
    out << fmt::format("bridge learned from {} pairs, {} unresolved input clusters\n", paired.size(),
                       unresolved);
}

// ---- predict -----------------------------------------------------------

struct PredictArgs {
    Common common;
    std::string x_model;
    std::string y_model;
    std::string bridge;
    std::string data;
    std::string direction = "forward";
};

void run_predict(const PredictArgs& a, std::ostream& out) {
    const auto xm = cluster_model_from_json(read_text_file(existing(a.x_model, "--x-model")));
    const auto ym = cluster_model_from_json(read_text_file(existing(a.y_model, "--y-model")));
    const auto bridge = bridge_from_json(read_text_file(existing(a.bridge, "--bridge")));
    const auto data = load_pointset(existing(a.data, "--data"));
    const auto dir_kind = parse_direction(a.direction);
    if (dir_kind == Direction::both) throw UsageError("--direction must be forward or inverse");
    const bool fwd = dir_kind == Direction::forward;
    const auto preds = fwd ? predict_forward(data, xm, ym, bridge) : predict_inverse(data, ym, xm, bridge);
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    auto f = open_out(dir / "predictions.csv");
    write_predictions_csv(f, preds, fwd ? ym.dim() : xm.dim());
    out << fmt::format("{} predictions, {} unresolved\n", preds.size(), unresolved_count(preds));
}

// ---- evaluate ----------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string predictions;
    std::string truth;
    std::string pool;
};

void run_evaluate(const EvaluateArgs& a, std::ostream& out) {
    std::ifstream pf(existing(a.predictions, "--predictions"));
    const auto preds = read_predictions_csv(pf);
    const auto truth = load_pointset(existing(a.truth, "--truth"));
    MetricsReport report;
    report.unresolved_count = unresolved_count(preds);
    std::vector<Eigen::Index> rows;
    std::vector<std::size_t> truth_rows;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].status != PredictionStatus::ok) continue;
        const auto t = truth.find(preds[i].id);
        if (!t) throw EvaluationError(fmt::format("no truth row for prediction id '{}'", preds[i].id));
        rows.push_back(static_cast<Eigen::Index>(i));
        truth_rows.push_back(*t);
    }
    if (rows.empty()) throw EvaluationError("no resolved predictions to evaluate");
    Matrix pred(static_cast<Eigen::Index>(rows.size()), truth.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& v = preds[static_cast<std::size_t>(rows[r])].value;
        if (v.size() != truth.dim()) throw DimensionError("prediction and truth dimensions differ");
        pred.row(static_cast<Eigen::Index>(r)) = v;
    }
    const Matrix t = truth.subset(truth_rows).points();
    report.mse = mse(pred, t);
    if (!a.pool.empty()) report.retrieval_mse = retrieval_mse(pred, load_pointset(existing(a.pool, "--pool")).points(), t);
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    write_text_file(dir / "metrics.json", to_json(report));
    out << fmt::format("mse={} unresolved={}\n", format_real(report.mse), report.unresolved_count);
}

// ---- experiment / bench ------------------------------------------------

struct ExperimentArgs {
    Common common;
    std::string config;
    int threads = 0;
};

void run_experiment_cmd(const ExperimentArgs& a, std::ostream& out) {
    const auto path = existing(a.config, "--config");
    auto cfg = parse_experiment_config(read_text_file(path), path.parent_path());
    cfg.output_dir = a.common.out;
    if (a.common.seed_set) cfg.master_seed = a.common.seed;
    if (a.threads > 0) cfg.threads = a.threads;
    const auto records = run_experiment(cfg);
    std::size_t failures = 0;
    for (const auto& r : records) {
        for (const auto& m : r.models) failures += m.error.empty() ? 0 : 1;
    }
    out << fmt::format("{} trial records written to {} ({} model failures)\n", records.size(),
                       cfg.output_dir.string(), failures);
}

struct BenchArgs {
    Common common;
    std::string config;
};

void run_bench_cmd(const BenchArgs& a, std::ostream& out) {
    ScalingConfig cfg;
    if (!a.config.empty()) cfg = parse_scaling_config(read_text_file(existing(a.config, "--config")));
    if (a.common.seed_set) cfg.master_seed = a.common.seed;
    const auto report = run_scaling_bench(cfg);
    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    write_text_file(dir / "scaling.json", to_json(report));
    for (const auto& [model, slope] : report.time_slope) {
        out << fmt::format("{}: time slope {:.3f}, memory slope {:.3f}\n", model, slope,
                           report.memory_slope.at(model));
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bridged clustering: cluster two unpaired pools, bridge them with a few pairs, predict."};
    app.name("bridged");
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* c_gen = app.add_subcommand("generate", "Sample a paired Gaussian mixture");
    c_gen->add_option("--spec", gen.spec, "Mixture spec JSON")->required();
    c_gen->add_option("--n", gen.n, "Number of samples")->check(CLI::PositiveNumber);
    add_out(c_gen, gen.common);
    add_seed(c_gen, gen.common);

    SplitArgs sp;
    auto* c_split = app.add_subcommand("split", "Hide pairings and build pools, paired set and test set");
    c_split->add_option("--x", sp.x, "Input-space points")->required();
    c_split->add_option("--y", sp.y, "Output-space points")->required();
    c_split->add_option("--pairs-per-cluster", sp.pairs, "Paired samples per latent group");
    c_split->add_option("--mode", sp.mode, "transductive or inductive");
    c_split->add_option("--pools", sp.pools, "shared or disjoint");
    c_split->add_option("--minor-fraction", sp.minor_fraction, "Share of the smaller pool (disjoint)");
    c_split->add_option("--holdout", sp.holdout, "Test share (inductive)");
    c_split->add_flag("--inverse", sp.inverse, "Predict x from y");
    add_out(c_split, sp.common);
    add_seed(c_split, sp.common);

    FitArgs fit;
    auto* c_fit = app.add_subcommand("fit", "Cluster one pool");
    c_fit->add_option("--data", fit.data, "Points to cluster")->required();
    c_fit->add_option("--clusters,-C", fit.clusters, "Number of clusters")->check(CLI::PositiveNumber);
    c_fit->add_option("--algo", fit.algo, "lloyd, balanced or minibatch");
    c_fit->add_option("--restarts", fit.restarts, "k-means++ restarts");
    c_fit->add_option("--max-iter", fit.max_iter, "Iteration cap");
    c_fit->add_option("--tol", fit.tol, "Centroid shift tolerance");
    c_fit->add_option("--batch", fit.batch, "Mini-batch size");
    add_out(c_fit, fit.common);
    add_seed(c_fit, fit.common);

    BridgeArgs br;
    auto* c_bridge = app.add_subcommand("bridge", "Learn the cluster-to-cluster bridge");
    c_bridge->add_option("--x-model", br.x_model, "Input-space model.json")->required();
    c_bridge->add_option("--y-model", br.y_model, "Output-space model.json")->required();
    c_bridge->add_option("--paired-x", br.paired_x, "Paired input points")->required();
    c_bridge->add_option("--paired-y", br.paired_y, "Paired output points (same ids)")->required();
    c_bridge->add_option("--method", br.method, "majority, hungarian or margin");
    add_out(c_bridge, br.common);

    PredictArgs pr;
    auto* c_pred = app.add_subcommand("predict", "Predict through the bridge");
    c_pred->add_option("--x-model", pr.x_model, "Input-space model.json")->required();
    c_pred->add_option("--y-model", pr.y_model, "Output-space model.json")->required();
    c_pred->add_option("--bridge", pr.bridge, "bridge.json")->required();
    c_pred->add_option("--data", pr.data, "Query points")->required();
    c_pred->add_option("--direction", pr.direction, "forward or inverse");
    add_out(c_pred, pr.common);

    EvaluateArgs ev;
    auto* c_eval = app.add_subcommand("evaluate", "Score predictions against hidden partners");
    c_eval->add_option("--predictions", ev.predictions, "predictions.csv")->required();
    c_eval->add_option("--truth", ev.truth, "Truth points keyed by id")->required();
    c_eval->add_option("--pool", ev.pool, "Pool for retrieval MSE");
    add_out(c_eval, ev.common);

    ExperimentArgs ex;
    auto* c_exp = app.add_subcommand("experiment", "Run a seeded sweep");
    c_exp->add_option("--config", ex.config, "Experiment JSON")->required();
    c_exp->add_option("--threads", ex.threads, "Worker threads (results do not depend on it)");
    add_out(c_exp, ex.common);
    add_seed(c_exp, ex.common);

    BenchArgs be;
    auto* c_bench = app.add_subcommand("bench", "Runtime and memory scaling in n");
    c_bench->add_option("--config", be.config, "Bench JSON");
    add_out(c_bench, be.common);
    add_seed(c_bench, be.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (*c_gen) run_generate(gen, out);
        if (*c_split) run_split(sp, out);
        if (*c_fit) run_fit(fit, out);
        if (*c_bridge) run_bridge(br, out);
        if (*c_pred) run_predict(pr, out);
        if (*c_eval) run_evaluate(ev, out);
        if (*c_exp) run_experiment_cmd(ex, out);
        if (*c_bench) run_bench_cmd(be, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace bridged
