#include "wrist/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "wrist/rng.hpp"

namespace wrist {

std::string to_string(PcaMode m) { return m == PcaMode::loadings ? "loadings" : "projection"; }

PcaMode parse_pca_mode(std::string_view s) {
    if (s == "projection") return PcaMode::projection;
    if (s == "loadings") return PcaMode::loadings;
    throw DomainError("unknown pca mode '" + std::string(s) + "' (expected projection or loadings)");
}

namespace {

constexpr std::uint64_t kReplayStream = 0x7265706c6179;

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string shortest(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::vector<int> pick(const std::vector<int>& y, const std::vector<std::size_t>& idx) {
    std::vector<int> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(y[i]);
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed for " + path.string());
}

template <class F>
std::string render(F&& f) {
    std::ostringstream out;
    f(out);
    return out.str();
}

// Grid search on train, refit of the best config on train, scored on test.
ModelResult evaluate_model(const Matrix& Xtr, const std::vector<int>& ytr, const Matrix& Xval,
                           const std::vector<int>& yval, const Matrix& Xte, const std::vector<int>& yte,
                           std::vector<std::string> names, const PipelineOptions& opt, const std::string& tag,
                           const LogSink& log) {
    ModelResult r;
    r.feature_names = names;
    auto grid = make_grid(opt.grid, opt.seed);
    r.grid = grid_search(Xtr, ytr, Xval, yval, grid, opt.folds, opt.seed, [&](std::size_t done, std::size_t total) {
        if (log) log(tag + " grid: " + std::to_string(done) + "/" + std::to_string(total));
    });
    auto model = fit(Xtr, ytr, r.grid.best_config(), std::move(names));
    auto p = predict_proba(model, Xte);
    r.test_auroc = auroc(p, yte);
    r.roc = roc_curve(p, yte);
    r.confusion = confusion(p, yte);
    r.metrics = classification_metrics(r.confusion);
    return r;
}

}  // namespace

PipelineReport run_pipeline(const PipelineOptions& opt, const LogSink& log) {
    auto say = [&](const std::string& s) {
        if (log) log(s);
    };
    PipelineReport rep;

    Dataset corpus = generate_corpus(opt.n_per_class, opt.generator, opt.seed);
    LabeledMatrix all = extract_matrix(corpus);
    rep.pca_mode = opt.pca_mode;
    rep.n_samples = corpus.size();
    say("generated " + std::to_string(corpus.size()) + " segments");

    rep.pca = fit_pca(all.X);
    rep.loadings = loading_report(rep.pca, 3, feature_names());

    SplitSpec spec;
    spec.seed = opt.seed;
    SplitIndices idx = split_indices(corpus.size(), spec);
    rep.n_train = idx.train.size();
    rep.n_val = idx.val.size();
    rep.n_test = idx.test.size();
    const Matrix Xtr = all.X.select_rows(idx.train), Xval = all.X.select_rows(idx.val),
                 Xte = all.X.select_rows(idx.test);
    const auto ytr = pick(all.y, idx.train), yval = pick(all.y, idx.val), yte = pick(all.y, idx.test);

    {
        auto base = fit(Xtr, ytr, baseline_config());
        rep.baseline_val_auroc = auroc(predict_proba(base, Xval), yval);
        say("baseline validation AUROC " + fixed(rep.baseline_val_auroc, 4));
    }

    rep.full = evaluate_model(Xtr, ytr, Xval, yval, Xte, yte, feature_names(), opt, "full", log);
    say("full-feature test AUROC " + fixed(rep.full.test_auroc, 4));

    if (opt.pca_mode == PcaMode::projection) {
        // axes come from the training rows only so val and test stay unseen
        PcaModel p3 = fit_pca(Xtr, 3);
        rep.pca3 = evaluate_model(transform(p3, Xtr), ytr, transform(p3, Xval), yval, transform(p3, Xte), yte,
                                  {"pc1", "pc2", "pc3"}, opt, "pca3", log);
    } else {
        std::vector<std::size_t> cols;
        std::vector<std::string> names;
        for (const auto& l : rep.loadings) {
            cols.push_back(l.feature);
            names.push_back(l.name);
        }
        rep.pca3 = evaluate_model(Xtr.select_cols(cols), ytr, Xval.select_cols(cols), yval, Xte.select_cols(cols),
                                  yte, names, opt, "pca3", log);
    }
    say("pca3 test AUROC " + fixed(rep.pca3.test_auroc, 4));

    rep.final_model = retrain_final(all.X, all.y, rep.full.grid.best_config());

    // fresh segments from a seed stream the corpus never uses
    Dataset fresh = generate_corpus(opt.replay_per_class, opt.generator, derive_seed(opt.seed, kReplayStream));
    {
        std::istringstream trace(write_trace_csv(fresh.segments, true));
        rep.replay = replay(trace, rep.final_model).predictions;
        for (const auto& s : fresh.segments) rep.replay_labels.push_back(*s.label);
        std::vector<double> p;
        for (const auto& r : rep.replay) p.push_back(r.probability);
        if (p.size() != rep.replay_labels.size()) throw Error("replay produced " + std::to_string(p.size()) +
                                                              " predictions for " +
                                                              std::to_string(rep.replay_labels.size()) + " segments");
        rep.replay_confusion = confusion(p, rep.replay_labels);
    }

    const std::string corpus_csv = write_trace_csv(corpus.segments, true);
    {
        std::istringstream trace(corpus_csv);
        auto preds = replay(trace, rep.final_model).predictions;
        auto batch = predict_proba(rep.final_model, all.X);
        for (std::size_t i = 0; i < preds.size() && i < batch.size(); ++i)
            if (preds[i].probability == batch[i]) ++rep.stream_batch_matches;
    }

    if (!opt.out_dir.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir(opt.out_dir);
        fs::create_directories(dir);
        write_file(dir / "corpus.csv", corpus_csv);
        write_file(dir / "features.csv", render([&](std::ostream& o) { write_feature_csv(o, all); }));
        write_file(dir / "grid_full.csv", render([&](std::ostream& o) { write_grid_csv(o, rep.full.grid); }));
        write_file(dir / "grid_pca3.csv", render([&](std::ostream& o) { write_grid_csv(o, rep.pca3.grid); }));
        write_file(dir / "best_config.json", config_to_json(rep.full.grid.best_config()) + "\n");
        write_file(dir / "model.json", save_model(rep.final_model));
        write_file(dir / "roc_full.csv", render([&](std::ostream& o) { write_roc_csv(o, rep.full.roc); }));
        write_file(dir / "roc_pca3.csv", render([&](std::ostream& o) { write_roc_csv(o, rep.pca3.roc); }));
        write_file(dir / "replay.csv", render([&](std::ostream& o) {
                       for (const auto& p : rep.replay) o << format_prediction(p) << '\n';
                   }));
        write_file(dir / "summary.txt", render([&](std::ostream& o) { write_summary(o, rep); }));
    }
    return rep;
}

void write_grid_csv(std::ostream& out, const GridResult& result) {
    std::size_t k = 0;
    for (const auto& r : result.rows) k = std::max(k, r.fold_auroc.size());
    out << "index,n_estimators,tree_algorithm,max_depth,learning_rate";
    for (std::size_t f = 0; f < k; ++f) out << ",fold" << f + 1;
    out << ",mean_cv_auroc,val_auroc,best\n";
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const auto& r = result.rows[i];
        out << i << ',' << r.config.n_estimators << ',' << to_string(r.config.tree_algorithm) << ','
            << r.config.max_depth << ',' << format_double(r.config.learning_rate);
        for (std::size_t f = 0; f < k; ++f)
            out << ',' << (f < r.fold_auroc.size() ? format_double(r.fold_auroc[f]) : std::string("nan"));
        out << ',' << format_double(r.mean_cv_auroc) << ',' << format_double(r.val_auroc) << ','
            << (i == result.best ? 1 : 0) << '\n';
    }
}

void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc) {
    out << "fpr,tpr,threshold\n";
    for (const auto& p : roc)
        out << format_double(p.fpr) << ',' << format_double(p.tpr) << ','
            << (std::isinf(p.threshold) ? std::string("inf") : format_double(p.threshold)) << '\n';
}

void write_metrics(std::ostream& out, const std::string& title, double a, const ConfusionMatrix& cm,
                   const MetricsReport& m) {
    auto pct = [](double v) { return fixed(100.0 * v, 2); };
    out << title << '\n';
    out << "  AUROC " << fixed(a, 4) << '\n';
    out << "  confusion (rows actual, cols predicted)\n";
    out << "           pred 0  pred 1\n";
    char line[96];
    std::snprintf(line, sizeof line, "  digit 0  %6ld  %6ld\n  digit 1  %6ld  %6ld\n", cm.tp0, cm.fn01, cm.fp10,
                  cm.tn1);
    out << line;
    out << "  accuracy " << pct(m.accuracy) << "%\n";
    out << "  digit 0: precision " << pct(m.precision0) << "% recall " << pct(m.recall0) << "% F1 " << pct(m.f1_0)
        << "%\n";
    out << "  digit 1: precision " << pct(m.precision1) << "% recall " << pct(m.recall1) << "% F1 " << pct(m.f1_1)
        << "%\n";
    for (const auto& f : m.flags) out << "  note: " << f << '\n';
}

void write_loadings(std::ostream& out, const PcaModel& model, const std::vector<Loading>& loadings) {
    out << "component,explained_variance_ratio,feature,loading\n";
    for (const auto& l : loadings)
        out << "PC" << l.component + 1 << ',' << fixed(model.explained_variance_ratio[l.component], 6) << ','
            << l.name << ',' << fixed(l.value, 6) << '\n';
}

void write_summary(std::ostream& out, const PipelineReport& r) {
    out << "samples " << r.n_samples << " (train " << r.n_train << ", val " << r.n_val << ", test " << r.n_test
        << ")\n\n";
    out << "PCA top loadings\n";
    write_loadings(out, r.pca, r.loadings);
    out << '\n';
    out << "baseline validation AUROC " << fixed(r.baseline_val_auroc, 4) << "\n\n";
    auto best = [&](const char* name, const ModelResult& m) {
        const auto& c = m.grid.best_config();
        out << name << ": " << m.grid.rows.size() << " configs, best n_estimators=" << c.n_estimators
            << " tree_algorithm=" << to_string(c.tree_algorithm) << " max_depth=" << c.max_depth
            << " learning_rate=" << shortest(c.learning_rate)
            << " val AUROC=" << fixed(m.grid.rows[m.grid.best].val_auroc, 4) << '\n';
    };
    best("full-feature grid", r.full);
    best("pca3 grid", r.pca3);
    out << '\n';
    write_metrics(out, "PCA-3 model (" + to_string(r.pca_mode) + "; features: " + [&] {
        std::string s;
        for (const auto& n : r.pca3.feature_names) s += (s.empty() ? "" : ", ") + n;
        return s;
    }() + ")", r.pca3.test_auroc, r.pca3.confusion, r.pca3.metrics);
    out << '\n';
    write_metrics(out, "Full 31-feature model", r.full.test_auroc, r.full.confusion, r.full.metrics);
    out << '\n';
    out << "full minus PCA-3 test AUROC " << fixed(r.full.test_auroc - r.pca3.test_auroc, 4) << '\n';
    out << '\n';
    const auto& cm = r.replay_confusion;
    out << "replay of fresh segments: " << cm.tp0 + cm.tn1 << "/" << cm.total() << " correct\n";
    out << "  digit 0: " << cm.tp0 << " correct, " << cm.fn01 << " wrong\n";
    out << "  digit 1: " << cm.tn1 << " correct, " << cm.fp10 << " wrong\n";
    out << "stream vs batch: " << r.stream_batch_matches << "/" << r.n_samples << " identical probabilities\n";
}

}  // namespace wrist
