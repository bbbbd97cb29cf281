#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spurlab/datagen.hpp"
#include "spurlab/metrics.hpp"
#include "spurlab/train.hpp"

namespace spurlab {

enum class Augmentation { None, USB, ASB, FFR };

const char* to_string(Augmentation a);
Augmentation augmentation_from_string(const std::string& s);

// Per-cell training setup shared across a grid. The learning rate is
// selected per cell from lr_grid by validation worst-group accuracy.
struct TrainDefaults {
    int epochs = 20;  // per stage
    int batch_size = 32;
    double weight_decay = 1e-3;
    double groupdro_eta = 0.1;
    int hidden = 16;
    std::vector<double> lr_grid = {1e-1, 1e-2, 1e-3};
};

struct CellKey {
    double bias_ratio = 0.95;
    Augmentation augmentation = Augmentation::None;
    TrainMethod method = TrainMethod::ERM;
    std::uint64_t seed = 1;
    // Ablation axes; defaults are the canonical pipeline.
    StageOrder stage_order = StageOrder::Stage1ThenStage2;
    SyntheticMarginal pretraining_marginal = SyntheticMarginal::BalancedB;

    std::string str() const;
    std::uint64_t derived_seed() const;
};

struct CellResult {
    CellKey key;
    bool ok = false;
    std::string error;
    double selected_lr = 0.0;
    double wa_real = 0.0, ba_real = 0.0;
    double wa_synthetic = 0.0, ba_synthetic = 0.0;
    double probe_acc = 0.0;
    double validation_wa = 0.0;
};

// Runs one experiment cell end to end: generate the split at the cell's
// ratio and derived seed, realize the augmentation, train with the
// method (composed per regime: USB/ASB mitigate (y,b,g) groups, FFR and
// None mitigate (y,b)), and evaluate on the balanced real test split, a
// balanced synthetic test set, and the source probe.
CellResult run_cell(const CellKey& key, const GeneratorConfig& base, const TrainDefaults& defaults);

struct ExperimentGrid {
    std::vector<double> bias_ratios;
    std::vector<Augmentation> augmentations;
    std::vector<TrainMethod> methods;
    std::vector<std::uint64_t> seeds;
    GeneratorConfig generator;  // bias_ratio and seed overridden per cell
    TrainDefaults train;
    std::string output_dir;
    int workers = 0;  // 0 = OpenMP default
    bool resume = false;

    void validate() const;
    std::string to_json() const;
    static ExperimentGrid from_json(const std::string& text);
};

struct GridOutcome {
    int cells_total = 0;
    int cells_run = 0;
    int cells_skipped = 0;  // already complete in the manifest
    int cells_failed = 0;
    std::string results_csv_path;
    std::string manifest_path;
};

// Executes the grid with cells distributed over OpenMP workers. Rows are
// flushed to results.csv incrementally in canonical cell order, and the
// manifest records completed cells so an interrupted or repeated run with
// the identical config resumes instead of retraining. A failing cell
// contributes an error row and the grid continues.
GridOutcome run_grid(const ExperimentGrid& grid);

struct CellAggregate {
    int n = 0;
    double wa_mean = 0.0, wa_std = 0.0;
    double ba_mean = 0.0, ba_std = 0.0;
    double probe_mean = 0.0;
};

struct ReportSummary {
    // (augmentation, method, scope) -> aggregate over all ratios and seeds
    std::map<std::string, CellAggregate> by_cell;
    // (ratio, method) -> FFR-vs-baseline WA ordering marks on the real scope
    struct Ordering {
        double ratio = 0.0;
        std::string method;
        double ffr_wa = 0.0, usb_wa = 0.0, asb_wa = 0.0;
        bool ffr_ge_usb = false, ffr_ge_asb = false;
        bool has_usb = false, has_asb = false, has_ffr = false;
    };
    std::vector<Ordering> orderings;
    int error_rows = 0;

    void render(std::ostream& out) const;
};

// Aggregates a results CSV into mean +/- sample-std tables and the
// pairwise ordering table. Throws on schema mismatch (listing the missing
// columns) and on an empty CSV.
ReportSummary report(std::istream& results_csv);

}  // namespace spurlab
