// wristctl: command-line front end for the wrist-motion digit toolkit.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wrist/eval.hpp"
#include "wrist/features.hpp"
#include "wrist/gbdt.hpp"
#include "wrist/pca.hpp"
#include "wrist/pipeline.hpp"
#include "wrist/select.hpp"
#include "wrist/stream.hpp"
#include "wrist/synth.hpp"

using namespace wrist;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

struct Globals {
    std::uint64_t seed = 42;
    bool quiet = false;
};

std::string read_text(const std::string& path) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path);
    return std::string(std::istreambuf_iterator<char>(f), {});
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    f << text;
    if (!f) throw Error("write failed for " + path);
}

bool is_trace(const std::string& text) {
    auto end = text.find('\n');
    std::string_view first(text.data(), end == std::string::npos ? text.size() : end);
    if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
    return first == kTraceHeader;
}

// Feature rows from either a trace CSV or a feature CSV.
LabeledMatrix load_features(const std::string& path, std::vector<std::string>* names) {
    std::string text = read_text(path);
    if (is_trace(text)) {
        if (names) *names = feature_names();
        return extract_matrix(parse_trace_csv(text));
    }
    std::istringstream in(text);
    return read_feature_csv(in, names);
}

void require_labels(const LabeledMatrix& m, const std::string& what) {
    for (std::size_t i = 0; i < m.y.size(); ++i)
        if (m.y[i] != 0 && m.y[i] != 1) throw DomainError(what + ": row " + std::to_string(i + 1) + " is unlabeled");
}

struct GridFlags {
    std::vector<int> n_estimators = GridAxes{}.n_estimators;
    std::vector<std::string> tree_algorithm{"hist", "exact"};
    std::vector<int> max_depth = GridAxes{}.max_depth;
    std::vector<double> learning_rate = GridAxes{}.learning_rate;
    bool smoke = false;

    void add(CLI::App* sub) {
        sub->add_option("--grid-n-estimators", n_estimators, "n_estimators values")->delimiter(',');
        sub->add_option("--grid-tree-algorithm", tree_algorithm, "tree_algorithm values")->delimiter(',');
        sub->add_option("--grid-max-depth", max_depth, "max_depth values")->delimiter(',');
        sub->add_option("--grid-learning-rate", learning_rate, "learning_rate values")->delimiter(',');
        sub->add_flag("--smoke", smoke, "shrink the grid to {1000} x {hist,exact} x {1,6} x {0.1}");
    }

    GridAxes axes() const {
        GridAxes a;
        if (smoke) {
            a.n_estimators = {1000};
            a.tree_algorithm = {TreeAlgorithm::hist, TreeAlgorithm::exact};
            a.max_depth = {1, 6};
            a.learning_rate = {0.1};
            return a;
        }
        a.n_estimators = n_estimators;
        a.tree_algorithm.clear();
        for (const auto& s : tree_algorithm) a.tree_algorithm.push_back(parse_tree_algorithm(s));
        a.max_depth = max_depth;
        a.learning_rate = learning_rate;
        return a;
    }
};

struct GeneratorFlags {
    GeneratorConfig cfg;
    std::vector<double> zero{cfg.duration_zero[0], cfg.duration_zero[1]};
    std::vector<double> one{cfg.duration_one[0], cfg.duration_one[1]};

    void add(CLI::App* sub) {
        sub->add_option("--sample-rate", cfg.sample_rate, "Hz");
        sub->add_option("--duration-zero", zero, "digit 0 duration range, seconds")->expected(2)->delimiter(',');
        sub->add_option("--duration-one", one, "digit 1 duration range, seconds")->expected(2)->delimiter(',');
        sub->add_option("--stroke-extent", cfg.stroke_extent, "m");
        sub->add_option("--accel-noise-sd", cfg.accel_noise_sd, "m/s^2");
        sub->add_option("--angle-noise-sd", cfg.angle_noise_sd, "degrees");
        sub->add_option("--tilt-gain-zero", cfg.tilt_gain_zero, "degrees");
        sub->add_option("--tilt-gain-one", cfg.tilt_gain_one, "degrees");
    }

    GeneratorConfig get() const {
        GeneratorConfig c = cfg;
        c.duration_zero[0] = zero[0];
        c.duration_zero[1] = zero[1];
        c.duration_one[0] = one[0];
        c.duration_one[1] = one[1];
        c.validate();
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wrist-motion digit recognition toolkit", "wristctl"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    auto* o_seed = app.add_option("--seed", g.seed, "random seed");
    app.add_flag("--quiet", g.quiet, "suppress progress messages");

    auto progress = [&](const std::string& s) {
        if (!g.quiet) std::cerr << s << '\n';
    };

    // generate
    auto* gen = app.add_subcommand("generate", "write a synthetic labeled corpus as trace CSV");
    std::size_t gen_n = 200;
    std::string gen_out = "-";
    GeneratorFlags gen_flags;
    gen->add_option("--n-per-class", gen_n, "segments per digit");
    gen->add_option("--out", gen_out, "output trace CSV (- for stdout)");
    gen_flags.add(gen);

    // extract
    auto* ext = app.add_subcommand("extract", "trace CSV to feature CSV");
    std::string ext_in, ext_out = "-";
    ext->add_option("--in", ext_in, "input trace CSV (- for stdin)")->required();
    ext->add_option("--out", ext_out, "output feature CSV (- for stdout)");

    // pca-report
    auto* pcr = app.add_subcommand("pca-report", "explained variance and top loadings");
    std::string pcr_in, pcr_out = "-";
    std::size_t pcr_k = 3;
    pcr->add_option("--in", pcr_in, "feature or trace CSV")->required();
    pcr->add_option("--components", pcr_k, "number of components to report")->check(CLI::PositiveNumber);
    pcr->add_option("--out", pcr_out, "report file (- for stdout)");

    // train
    auto* trn = app.add_subcommand("train", "fit a boosted tree model");
    std::string trn_in, trn_out, trn_config;
    TrainConfig tc;
    std::string trn_algo = "exact";
    trn->add_option("--in", trn_in, "feature or trace CSV with labels")->required();
    trn->add_option("--out", trn_out, "model file")->required();
    trn->add_option("--config", trn_config, "JSON config from grid-search; explicit flags override it");
    auto* o_n = trn->add_option("--n-estimators", tc.n_estimators, "boosting rounds");
    auto* o_lr = trn->add_option("--learning-rate", tc.learning_rate, "shrinkage");
    auto* o_d = trn->add_option("--max-depth", tc.max_depth, "tree depth limit");
    auto* o_a = trn->add_option("--tree-algorithm", trn_algo, "exact or hist");
    auto* o_l = trn->add_option("--lambda", tc.lambda, "L2 leaf regularization");
    auto* o_b = trn->add_option("--n-bins", tc.n_bins, "histogram bins for hist");
    auto* o_m = trn->add_option("--min-child-weight", tc.min_child_weight, "minimum hessian per child");

    // grid-search
    auto* grd = app.add_subcommand("grid-search", "k-fold grid search on a 60/20/20 split");
    std::string grd_in, grd_out = "-", grd_best;
    std::size_t grd_folds = 5;
    GridFlags grd_flags;
    grd->add_option("--in", grd_in, "feature or trace CSV with labels")->required();
    grd->add_option("--folds", grd_folds, "cross-validation folds")->check(CLI::Range(2, 100));
    grd->add_option("--out", grd_out, "grid report CSV (- for stdout)");
    grd->add_option("--best-config", grd_best, "write the best config as JSON");
    grd_flags.add(grd);

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "AUROC, confusion matrix and per-class metrics");
    std::string evl_model, evl_in, evl_roc;
    evl->add_option("--model", evl_model, "model file")->required();
    evl->add_option("--in", evl_in, "feature or trace CSV with labels")->required();
    evl->add_option("--roc-out", evl_roc, "write ROC points CSV");

    // replay
    auto* rpl = app.add_subcommand("replay", "segment a trace and predict each segment");
    std::string rpl_model, rpl_in;
    ReplayOptions ro;
    rpl->add_option("--model", rpl_model, "model file")->required();
    rpl->add_option("--input,--in", rpl_in, "trace CSV (- for stdin)")->required();
    rpl->add_flag("--real-time", ro.real_time, "pace rows by their timestamps");
    rpl->add_flag("--lenient", ro.lenient, "skip malformed rows to the next switch release");
    rpl->add_option("--max-samples", ro.max_samples, "segment buffer limit");

    // pipeline
    auto* pip = app.add_subcommand("pipeline", "generate, split, grid search, evaluate and replay");
    PipelineOptions po;
    std::string pip_mode = "projection";
    GridFlags pip_flags;
    GeneratorFlags pip_gen;
    pip->add_option("--n-per-class", po.n_per_class, "segments per digit");
    pip->add_option("--folds", po.folds, "cross-validation folds")->check(CLI::Range(2, 100));
    pip->add_option("--pca-mode", pip_mode, "projection or loadings")
        ->check(CLI::IsMember({"projection", "loadings"}));
    pip->add_option("--replay-per-class", po.replay_per_class, "fresh replay segments per digit");
    pip->add_option("--out-dir", po.out_dir, "directory for corpus, grids, model and summary");
    pip_flags.add(pip);
    pip_gen.add(pip);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        if (sub == gen) {
            auto d = generate_corpus(gen_n, gen_flags.get(), g.seed);
            write_text(gen_out, write_trace_csv(d.segments, true));
        } else if (sub == ext) {
            auto m = extract_matrix(parse_trace_csv(read_text(ext_in)));
            std::ostringstream out;
            write_feature_csv(out, m);
            write_text(ext_out, out.str());
        } else if (sub == pcr) {
            std::vector<std::string> names;
            auto m = load_features(pcr_in, &names);
            auto model = fit_pca(m.X);
            if (pcr_k > model.n_components())
                throw DomainError("--components exceeds the feature count " + std::to_string(model.n_components()));
            std::ostringstream out;
            out << "component,eigenvalue,explained_variance_ratio,cumulative\n";
            double cum = 0;
            for (std::size_t k = 0; k < model.n_components(); ++k) {
                cum += model.explained_variance_ratio[k];
                out << "PC" << k + 1 << ',' << format_double(model.eigenvalues[k]) << ','
                    << format_double(model.explained_variance_ratio[k]) << ',' << format_double(cum) << '\n';
            }
            out << '\n';
            write_loadings(out, model, loading_report(model, pcr_k, names));
            for (const auto& w : model.warnings) std::cerr << "pca-report: warning: " << w << '\n';
            write_text(pcr_out, out.str());
        } else if (sub == trn) {
            TrainConfig c;
            if (!trn_config.empty()) c = config_from_json(read_text(trn_config));
            if (o_n->count()) c.n_estimators = tc.n_estimators;
            if (o_lr->count()) c.learning_rate = tc.learning_rate;
            if (o_d->count()) c.max_depth = tc.max_depth;
            if (o_a->count()) c.tree_algorithm = parse_tree_algorithm(trn_algo);
            if (o_l->count()) c.lambda = tc.lambda;
            if (o_b->count()) c.n_bins = tc.n_bins;
            if (o_m->count()) c.min_child_weight = tc.min_child_weight;
            if (trn_config.empty() || o_seed->count()) c.seed = g.seed;
            std::vector<std::string> names;
            auto m = load_features(trn_in, &names);
            require_labels(m, "train");
            auto model = fit(m.X, m.y, c, names);
            write_text(trn_out, save_model(model));
            progress("train: " + std::to_string(model.trees.size()) + " trees on " + std::to_string(m.X.rows) +
                     " rows");
        } else if (sub == grd) {
            std::vector<std::string> names;
            auto m = load_features(grd_in, &names);
            require_labels(m, "grid-search");
            SplitSpec spec;
            spec.seed = g.seed;
            auto idx = split_indices(m.X.rows, spec);
            std::vector<int> ytr, yval;
            for (auto i : idx.train) ytr.push_back(m.y[i]);
            for (auto i : idx.val) yval.push_back(m.y[i]);
            auto grid = make_grid(grd_flags.axes(), g.seed);
            auto result = grid_search(m.X.select_rows(idx.train), ytr, m.X.select_rows(idx.val), yval, grid,
                                      grd_folds, g.seed, [&](std::size_t done, std::size_t total) {
                                          progress("grid-search: " + std::to_string(done) + "/" +
                                                   std::to_string(total));
                                      });
            std::ostringstream out;
            write_grid_csv(out, result);
            write_text(grd_out, out.str());
            if (!grd_best.empty()) write_text(grd_best, config_to_json(result.best_config()) + "\n");
        } else if (sub == evl) {
            auto model = load_model(read_text(evl_model));
            std::vector<std::string> names;
            auto m = load_features(evl_in, &names);
            require_labels(m, "evaluate");
            if (names != model.feature_names) throw CompatibilityError("evaluate: feature columns do not match the model");
            auto p = predict_proba(model, m.X);
            auto cm = confusion(p, m.y);
            write_metrics(std::cout, "evaluation on " + std::to_string(m.X.rows) + " rows", auroc(p, m.y), cm,
                          classification_metrics(cm));
            if (!evl_roc.empty()) {
                std::ostringstream out;
                write_roc_csv(out, roc_curve(p, m.y));
                write_text(evl_roc, out.str());
            }
        } else if (sub == rpl) {
            auto model = load_model(read_text(rpl_model));
            check_compatible(model);
            std::ifstream file;
            std::istream* in = &std::cin;
            if (rpl_in != "-") {
                file.open(rpl_in, std::ios::binary);
                if (!file) throw Error("cannot open " + rpl_in);
                in = &file;
            }
            // predictions print as they happen so real-time mode streams
            ro.on_prediction = [](const Prediction& p) { std::cout << format_prediction(p) << std::endl; };
            auto warn = [](const std::string& w) { std::cerr << "replay: warning: " << w << '\n'; };
            auto result = replay(*in, model, ro, warn);
            for (const auto& e : result.errors) std::cerr << "replay: skipped: " << e << '\n';
        } else if (sub == pip) {
            po.seed = g.seed;
            po.pca_mode = parse_pca_mode(pip_mode);
            po.grid = pip_flags.axes();
            po.generator = pip_gen.get();
            auto report = run_pipeline(po, progress);
            write_summary(std::cout, report);
        }
    } catch (const ModelLoadError& e) {
        std::cerr << "wristctl " << sub->get_name() << ": model: " << e.what() << '\n';
        return kExitError;
    } catch (const Error& e) {
        std::cerr << "wristctl " << sub->get_name() << ": error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "wristctl " << sub->get_name() << ": error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
