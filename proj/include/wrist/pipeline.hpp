#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wrist/eval.hpp"
#include "wrist/features.hpp"
#include "wrist/gbdt.hpp"
#include "wrist/pca.hpp"
#include "wrist/select.hpp"
#include "wrist/stream.hpp"
#include "wrist/synth.hpp"

namespace wrist {

// How the three-column model is built: project onto the first three principal
// axes, or keep the three original features named by the loading report.
enum class PcaMode { projection, loadings };

std::string to_string(PcaMode m);
PcaMode parse_pca_mode(std::string_view s);

struct PipelineOptions {
    std::uint64_t seed = 42;
    std::size_t n_per_class = 200;
    GeneratorConfig generator;
    GridAxes grid;
    std::size_t folds = 5;
    PcaMode pca_mode = PcaMode::projection;
    std::size_t replay_per_class = 5;
    std::string out_dir;  // empty: no files written
};

struct ModelResult {
    std::vector<std::string> feature_names;
    GridResult grid;
    double test_auroc = 0;
    std::vector<RocPoint> roc;
    ConfusionMatrix confusion;
    MetricsReport metrics;
};

struct PipelineReport {
    PcaMode pca_mode = PcaMode::projection;
    std::size_t n_samples = 0;
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    PcaModel pca;  // fitted on the whole corpus, all components
    std::vector<Loading> loadings;
    double baseline_val_auroc = 0;
    ModelResult full, pca3;
    GbdtModel final_model;  // best full config retrained on every sample
    std::vector<Prediction> replay;
    std::vector<int> replay_labels;
    ConfusionMatrix replay_confusion;
    std::size_t stream_batch_matches = 0;  // corpus segments whose replay probability equals batch
};

using LogSink = std::function<void(const std::string&)>;

PipelineReport run_pipeline(const PipelineOptions& options, const LogSink& log = {});

void write_summary(std::ostream& out, const PipelineReport& report);

// fold AUROCs as fold1..foldk columns
void write_grid_csv(std::ostream& out, const GridResult& result);
void write_roc_csv(std::ostream& out, const std::vector<RocPoint>& roc);
void write_metrics(std::ostream& out, const std::string& title, double auroc, const ConfusionMatrix& cm,
                   const MetricsReport& m);
void write_loadings(std::ostream& out, const PcaModel& model, const std::vector<Loading>& loadings);

}  // namespace wrist
