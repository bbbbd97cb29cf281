#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spurlab/core.hpp"
#include "spurlab/datagen.hpp"
#include "spurlab/rng.hpp"

namespace spurlab {

enum class TrainMethod { ERM, GroupDRO, Resampling, DFR };

const char* to_string(TrainMethod m);
TrainMethod train_method_from_string(const std::string& s);

// One-hidden-layer rectifier network. Weights are row-major flat arrays;
// the post-activation hidden vector is the "feature space" DFR retrains
// over and the embedding the source probe reads.
struct ModelParams {
    int dim = 0;
    int hidden = 0;
    int n_classes = 0;
    std::vector<double> hidden_w;  // hidden x dim
    std::vector<double> hidden_b;  // hidden
    std::vector<double> head_w;    // n_classes x hidden
    std::vector<double> head_b;    // n_classes

    static ModelParams init(int dim, int hidden, int n_classes, std::uint64_t seed);
};

struct TrainConfig {
    TrainMethod method = TrainMethod::ERM;
    int epochs = 20;
    int batch_size = 32;
    double learning_rate = 1e-2;
    double weight_decay = 1e-3;
    double groupdro_eta = 0.1;     // GroupDRO only
    bool freeze_features = false;  // zero hidden-layer gradients
    bool group_by_source = false;  // groups are (y,b,g) instead of (y,b)
    int hidden = 16;
    std::uint64_t seed = 1;

    void validate() const;
};

struct ForwardResult {
    std::vector<double> embedding;      // post-activation hidden vector
    std::vector<double> logits;
    std::vector<double> probabilities;  // softmax(logits)
};

ForwardResult forward(const ModelParams& params, const std::vector<double>& x);

struct SgdOptions {
    double learning_rate = 1e-2;
    double weight_decay = 0.0;
    bool freeze_features = false;
};

// One SGD step on the weighted objective
//   sum_i w_i * CE_i + (wd/2) * (|W_hidden|^2 + |W_head|^2),
// biases undecayed, frozen features exclude the hidden layer entirely.
// Returns the data term sum_i w_i * CE_i. Throws std::runtime_error on a
// non-finite loss.
double grad_step(ModelParams& params, const Dataset& data, const std::vector<std::size_t>& batch,
                 const std::vector<double>& per_example_weights, const SgdOptions& options);

// Exponentiated-gradient ascent on the group simplex.
struct GroupWeights {
    std::vector<double> q;  // indexed by group id, sums to 1, all > 0
};

GroupWeights groupdro_update(const GroupWeights& q, const std::vector<double>& group_losses,
                             double eta);

// Index space for (y, b) or (y, b, g) group keys over a dataset.
struct GroupIndexer {
    int n_bias = 0;
    bool by_source = false;

    int group_of(const LabeledExample& ex) const {
        const int yb = ex.class_y * n_bias + ex.bias_b;
        return by_source ? yb * 2 + static_cast<int>(ex.source_g) : yb;
    }
    int n_groups(int n_classes) const { return n_classes * n_bias * (by_source ? 2 : 1); }
    std::string describe(int group, int n_classes) const;
};

// One epoch of batch index lists. ERM/GroupDRO shuffle without
// replacement; Resampling draws each slot from a uniformly random
// non-empty group, with replacement inside the group. Throws when a (y,b)
// subgroup is empty under Resampling, naming the subgroup.
std::vector<std::vector<std::size_t>> make_batches(const Dataset& data, TrainMethod method,
                                                   int batch_size, Rng& rng,
                                                   const GroupIndexer& groups);

struct StageRecord {
    std::string stage;  // "stage1" / "stage2" / "train" / "dfr_head"
    TrainMethod method = TrainMethod::ERM;
    int epochs = 0;
    std::int64_t corpus_size = 0;
    std::int64_t real_seen = 0;       // multiset of sources in the corpus
    std::int64_t synthetic_seen = 0;
};

struct TrainedModel {
    ModelParams params;
    TrainConfig config;
    std::vector<StageRecord> stage_history;

    std::string to_json() const;
    static TrainedModel from_json(const std::string& text);
};

// Full-batch logistic-regression fit used by DFR head retraining and the
// source probe: plain gradient descent to convergence (loss delta below
// tol or max_steps).
struct HeadFitOptions {
    double learning_rate = 0.1;
    double weight_decay = 1e-4;
    int max_steps = 10'000;
    double tol = 1e-8;
};

struct LinearHead {
    int in_dim = 0;
    int n_classes = 0;
    std::vector<double> w;  // n_classes x in_dim
    std::vector<double> b;

    int predict(const std::vector<double>& x) const;
};

LinearHead fit_linear_head(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, int n_classes,
                           const HeadFitOptions& options, const LinearHead* init = nullptr);

// Train a model with the configured method. GroupDRO and Resampling read
// the bias labels of `data`; DFR additionally needs a balanced validation
// set and retrains the head on it after the ERM phase.
TrainedModel train(const Dataset& data, const Dataset* validation, const TrainConfig& config);

enum class StageOrder { Stage1Only, Stage2Only, Stage2ThenStage1, Stage1ThenStage2 };

const char* to_string(StageOrder s);
StageOrder stage_order_from_string(const std::string& s);

// Two-stage pipeline: stage 1 pretrains with ERM on a balanced synthetic
// corpus, stage 2 fine-tunes on real data with the configured method.
// Stage1ThenStage2 is FFR.
struct PipelineSpec {
    StageOrder stage_order = StageOrder::Stage1ThenStage2;
    TrainConfig stage1;  // method forced to ERM
    TrainConfig stage2;
    SyntheticMarginal pretraining_marginal = SyntheticMarginal::BalancedB;
    std::int64_t stage1_budget = 0;  // 0 => shared USB budget of the real train table
};

// Executes the stages in order against bundle.train (real) and a synthetic
// corpus drawn from `generator`. Stage corpora are source-pure by
// construction and every batch is audited: a mixed-source batch is a hard
// error. Stage2Only reproduces train(real, ...) bit-exactly at equal seeds.
TrainedModel run_pipeline(const PipelineSpec& spec, const SplitBundle& bundle,
                          const GeneratorConfig& generator);

}  // namespace spurlab
