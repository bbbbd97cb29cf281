#include "spurlab/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "spurlab/augment.hpp"

namespace spurlab {

const char* to_string(TrainMethod m) {
    switch (m) {
        case TrainMethod::ERM: return "erm";
        case TrainMethod::GroupDRO: return "groupdro";
        case TrainMethod::Resampling: return "resampling";
        case TrainMethod::DFR: return "dfr";
    }
    return "?";
}

TrainMethod train_method_from_string(const std::string& s) {
    if (s == "erm") return TrainMethod::ERM;
    if (s == "groupdro") return TrainMethod::GroupDRO;
    if (s == "resampling") return TrainMethod::Resampling;
    if (s == "dfr") return TrainMethod::DFR;
    throw std::invalid_argument("unknown train method: " + s);
}

const char* to_string(StageOrder s) {
    switch (s) {
        case StageOrder::Stage1Only: return "stage1_only";
        case StageOrder::Stage2Only: return "stage2_only";
        case StageOrder::Stage2ThenStage1: return "stage2_then_stage1";
        case StageOrder::Stage1ThenStage2: return "stage1_then_stage2";
    }
    return "?";
}

StageOrder stage_order_from_string(const std::string& s) {
    if (s == "stage1_only") return StageOrder::Stage1Only;
    if (s == "stage2_only") return StageOrder::Stage2Only;
    if (s == "stage2_then_stage1") return StageOrder::Stage2ThenStage1;
    if (s == "stage1_then_stage2") return StageOrder::Stage1ThenStage2;
    throw std::invalid_argument("unknown stage order: " + s);
}

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (learning_rate <= 0) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (weight_decay < 0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (method == TrainMethod::GroupDRO && groupdro_eta <= 0)
        throw std::invalid_argument("TrainConfig: groupdro_eta must be > 0 for GroupDRO");
    if (hidden < 1) throw std::invalid_argument("TrainConfig: hidden must be >= 1");
}

ModelParams ModelParams::init(int dim, int hidden, int n_classes, std::uint64_t seed) {
    if (dim < 1 || hidden < 1 || n_classes < 2)
        throw std::invalid_argument("ModelParams: bad dimensions");
    ModelParams p;
    p.dim = dim;
    p.hidden = hidden;
    p.n_classes = n_classes;
    Rng rng(derive_seed(seed, 0x1417ULL));
    const double hidden_std = 1.0 / std::sqrt(static_cast<double>(dim));
    const double head_std = 1.0 / std::sqrt(static_cast<double>(hidden));
    p.hidden_w.resize(static_cast<std::size_t>(hidden) * dim);
    for (double& w : p.hidden_w) w = hidden_std * rng.gaussian();
    p.hidden_b.assign(hidden, 0.0);
    p.head_w.resize(static_cast<std::size_t>(n_classes) * hidden);
    for (double& w : p.head_w) w = head_std * rng.gaussian();
    p.head_b.assign(n_classes, 0.0);
    return p;
}

ForwardResult forward(const ModelParams& params, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != params.dim)
        throw std::invalid_argument("forward: feature dimension mismatch");
    ForwardResult r;
    r.embedding.resize(params.hidden);
    for (int h = 0; h < params.hidden; ++h) {
        double a = params.hidden_b[h];
        const double* row = params.hidden_w.data() + static_cast<std::size_t>(h) * params.dim;
        for (int i = 0; i < params.dim; ++i) a += row[i] * x[i];
        r.embedding[h] = a > 0.0 ? a : 0.0;
    }
    r.logits.resize(params.n_classes);
    for (int c = 0; c < params.n_classes; ++c) {
        double a = params.head_b[c];
        const double* row = params.head_w.data() + static_cast<std::size_t>(c) * params.hidden;
        for (int h = 0; h < params.hidden; ++h) a += row[h] * r.embedding[h];
        r.logits[c] = a;
    }
    r.probabilities.resize(params.n_classes);
    const double zmax = *std::max_element(r.logits.begin(), r.logits.end());
    double zsum = 0.0;
    for (int c = 0; c < params.n_classes; ++c) {
        r.probabilities[c] = std::exp(r.logits[c] - zmax);
        zsum += r.probabilities[c];
    }
    for (double& p : r.probabilities) p /= zsum;
    return r;
}

double grad_step(ModelParams& params, const Dataset& data, const std::vector<std::size_t>& batch,
                 const std::vector<double>& per_example_weights, const SgdOptions& options) {
    if (batch.size() != per_example_weights.size())
        throw std::invalid_argument("grad_step: batch/weights size mismatch");

    std::vector<double> d_hidden_w(params.hidden_w.size(), 0.0);
    std::vector<double> d_hidden_b(params.hidden_b.size(), 0.0);
    std::vector<double> d_head_w(params.head_w.size(), 0.0);
    std::vector<double> d_head_b(params.head_b.size(), 0.0);
    std::vector<double> d_embedding(params.hidden);

    double loss = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const double w = per_example_weights[k];
        if (w < 0 || !std::isfinite(w))
            throw std::invalid_argument("grad_step: weights must be finite and >= 0");
        if (w == 0.0) continue;
        const LabeledExample& ex = data.examples()[batch[k]];
        const ForwardResult f = forward(params, ex.features);

        // Cross-entropy via log-sum-exp for the loss value.
        const double zmax = *std::max_element(f.logits.begin(), f.logits.end());
        double zsum = 0.0;
        for (double z : f.logits) zsum += std::exp(z - zmax);
        loss += w * (std::log(zsum) + zmax - f.logits[ex.class_y]);

        for (int c = 0; c < params.n_classes; ++c) {
            const double dz = w * (f.probabilities[c] - (c == ex.class_y ? 1.0 : 0.0));
            d_head_b[c] += dz;
            double* drow = d_head_w.data() + static_cast<std::size_t>(c) * params.hidden;
            for (int h = 0; h < params.hidden; ++h) drow[h] += dz * f.embedding[h];
        }
        if (!options.freeze_features) {
            for (int h = 0; h < params.hidden; ++h) {
                if (f.embedding[h] <= 0.0) {
                    d_embedding[h] = 0.0;
                    continue;
                }
                double de = 0.0;
                for (int c = 0; c < params.n_classes; ++c)
                    de += (f.probabilities[c] - (c == ex.class_y ? 1.0 : 0.0)) *
                          params.head_w[static_cast<std::size_t>(c) * params.hidden + h];
                d_embedding[h] = w * de;
            }
            for (int h = 0; h < params.hidden; ++h) {
                if (d_embedding[h] == 0.0) continue;
                d_hidden_b[h] += d_embedding[h];
                double* drow = d_hidden_w.data() + static_cast<std::size_t>(h) * params.dim;
                for (int i = 0; i < params.dim; ++i) drow[i] += d_embedding[h] * ex.features[i];
            }
        }
    }
    if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "grad_step: non-finite loss " << loss << " over batch of " << batch.size();
        throw std::runtime_error(msg.str());
    }

    const double lr = options.learning_rate;
    for (std::size_t i = 0; i < params.head_w.size(); ++i)
        params.head_w[i] -= lr * (d_head_w[i] + options.weight_decay * params.head_w[i]);
    for (std::size_t i = 0; i < params.head_b.size(); ++i) params.head_b[i] -= lr * d_head_b[i];
    if (!options.freeze_features) {
        for (std::size_t i = 0; i < params.hidden_w.size(); ++i)
            params.hidden_w[i] -= lr * (d_hidden_w[i] + options.weight_decay * params.hidden_w[i]);
        for (std::size_t i = 0; i < params.hidden_b.size(); ++i)
            params.hidden_b[i] -= lr * d_hidden_b[i];
    }

    for (double v : params.hidden_w)
        if (!std::isfinite(v)) throw std::runtime_error("grad_step: non-finite parameter after update");
    for (double v : params.head_w)
        if (!std::isfinite(v)) throw std::runtime_error("grad_step: non-finite parameter after update");
    return loss;
}

GroupWeights groupdro_update(const GroupWeights& q, const std::vector<double>& group_losses,
                             double eta) {
    if (q.q.size() != group_losses.size())
        throw std::invalid_argument("groupdro_update: size mismatch");
    for (double l : group_losses)
        if (!std::isfinite(l)) throw std::invalid_argument("groupdro_update: non-finite loss");
    GroupWeights next;
    next.q.resize(q.q.size());
    // Subtract the max exponent so the normalization never overflows.
    double max_exp = -1e300;
    for (std::size_t g = 0; g < q.q.size(); ++g)
        max_exp = std::max(max_exp, eta * group_losses[g]);
    double z = 0.0;
    for (std::size_t g = 0; g < q.q.size(); ++g) {
        next.q[g] = q.q[g] * std::exp(eta * group_losses[g] - max_exp);
        z += next.q[g];
    }
    for (double& v : next.q) v /= z;
    return next;
}

std::string GroupIndexer::describe(int group, int /*n_classes*/) const {
    std::ostringstream out;
    if (by_source) {
        const int yb = group / 2;
        out << "(y=" << yb / n_bias << ",b=" << yb % n_bias
            << ",g=" << to_string(static_cast<Source>(group % 2)) << ")";
    } else {
        out << "(y=" << group / n_bias << ",b=" << group % n_bias << ")";
    }
    return out.str();
}

std::vector<std::vector<std::size_t>> make_batches(const Dataset& data, TrainMethod method,
                                                   int batch_size, Rng& rng,
                                                   const GroupIndexer& groups) {
    if (batch_size < 1) throw std::invalid_argument("make_batches: batch_size must be >= 1");
    if (data.size() == 0) throw std::invalid_argument("make_batches: empty dataset");
    const std::size_t n = data.size();
    const std::size_t n_batches = (n + batch_size - 1) / batch_size;

    if (method != TrainMethod::Resampling) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        std::vector<std::vector<std::size_t>> batches;
        batches.reserve(n_batches);
        for (std::size_t start = 0; start < n; start += batch_size) {
            const std::size_t end = std::min(n, start + batch_size);
            batches.emplace_back(order.begin() + start, order.begin() + end);
        }
        return batches;
    }

    // Resampling: bucket examples by group; every (y,b) subgroup must be
    // populated. Under (y,b,g) keying, source combinations that simply do
    // not occur in the corpus are dropped rather than treated as empty.
    const int n_groups = groups.n_groups(data.n_classes());
    std::vector<std::vector<std::size_t>> members(n_groups);
    for (std::size_t i = 0; i < n; ++i)
        members[groups.group_of(data.examples()[i])].push_back(i);

    for (int y = 0; y < data.n_classes(); ++y)
        for (int b = 0; b < data.n_bias(); ++b)
            if (data.table().marginal_yb(y, b) == 0)
                throw std::invalid_argument("make_batches: Resampling requires a non-empty subgroup (y=" +
                                            std::to_string(y) + ",b=" + std::to_string(b) + ")");

    std::vector<int> active;
    for (int g = 0; g < n_groups; ++g)
        if (!members[g].empty()) active.push_back(g);
    if (batch_size < static_cast<int>(active.size()))
        throw std::invalid_argument("make_batches: Resampling needs batch_size >= number of groups");

    std::vector<std::vector<std::size_t>> batches(n_batches);
    for (auto& batch : batches) {
        batch.resize(batch_size);
        for (int s = 0; s < batch_size; ++s) {
            const auto& pool = members[active[rng.below(active.size())]];
            batch[s] = pool[rng.below(pool.size())];
        }
    }
    return batches;
}

namespace {

double dataset_head_retrain(ModelParams& params, const Dataset& validation,
                            const HeadFitOptions& options);

void require_balanced_validation(const Dataset& validation) {
    const SubgroupTable& t = validation.table();
    std::int64_t expected = -1;
    for (int y = 0; y < t.n_classes(); ++y)
        for (int b = 0; b < t.n_bias(); ++b) {
            const std::int64_t c = t.marginal_yb(y, b);
            if (expected < 0) expected = c;
            if (c == 0 || c != expected)
                throw std::invalid_argument("DFR requires a balanced validation set with every subgroup populated");
        }
}

struct EpochStats {
    double mean_loss = 0.0;
};

// Shared SGD loop. `forbid_mixed_batches` is the FFR defining constraint;
// it is enforced per batch, not just per corpus.
EpochStats run_sgd(ModelParams& params, const Dataset& data, const TrainConfig& config,
                   Rng& batch_rng, bool forbid_mixed_batches) {
    const GroupIndexer groups{data.n_bias(), config.group_by_source};
    const SgdOptions sgd{config.learning_rate, config.weight_decay, config.freeze_features};
    const int n_groups = groups.n_groups(data.n_classes());

    GroupWeights q;
    if (config.method == TrainMethod::GroupDRO) {
        std::vector<std::int64_t> counts(n_groups, 0);
        for (const auto& ex : data.examples()) ++counts[groups.group_of(ex)];
        double active = 0;
        for (std::int64_t c : counts) active += c > 0 ? 1 : 0;
        q.q.assign(n_groups, 0.0);
        for (int g = 0; g < n_groups; ++g)
            if (counts[g] > 0) q.q[g] = 1.0 / active;
    }

    EpochStats stats;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto batches = make_batches(data, config.method, config.batch_size, batch_rng, groups);
        double epoch_loss = 0.0;
        for (const auto& batch : batches) {
            if (forbid_mixed_batches) {
                bool has_real = false, has_synth = false;
                for (std::size_t i : batch) {
                    (data.examples()[i].source_g == Source::Real ? has_real : has_synth) = true;
                }
                if (has_real && has_synth)
                    throw std::runtime_error("pipeline: mixed real/synthetic batch under a staged run");
            }

            std::vector<double> weights(batch.size());
            if (config.method == TrainMethod::GroupDRO) {
                // Per-group mean losses on this batch; absent groups keep
                // their weight (loss contribution 0).
                std::vector<double> group_loss(n_groups, 0.0);
                std::vector<std::int64_t> group_count(n_groups, 0);
                for (std::size_t i : batch) {
                    const LabeledExample& ex = data.examples()[i];
                    const ForwardResult f = forward(params, ex.features);
                    const double zmax = *std::max_element(f.logits.begin(), f.logits.end());
                    double zsum = 0.0;
                    for (double z : f.logits) zsum += std::exp(z - zmax);
                    const int g = groups.group_of(ex);
                    group_loss[g] += std::log(zsum) + zmax - f.logits[ex.class_y];
                    ++group_count[g];
                }
                for (int g = 0; g < n_groups; ++g)
                    if (group_count[g] > 0) group_loss[g] /= static_cast<double>(group_count[g]);
                q = groupdro_update(q, group_loss, config.groupdro_eta);
                for (std::size_t k = 0; k < batch.size(); ++k) {
                    const int g = groups.group_of(data.examples()[batch[k]]);
                    weights[k] = q.q[g] / static_cast<double>(group_count[g]);
                }
            } else {
                std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(batch.size()));
            }
            epoch_loss += grad_step(params, data, batch, weights, sgd);
        }
        stats.mean_loss = epoch_loss / static_cast<double>(std::max<std::size_t>(1, batches.size()));
    }
    return stats;
}

StageRecord make_record(const std::string& stage, const TrainConfig& config, const Dataset& data) {
    StageRecord rec;
    rec.stage = stage;
    rec.method = config.method;
    rec.epochs = config.epochs;
    rec.corpus_size = static_cast<std::int64_t>(data.size());
    rec.real_seen = data.table().source_total(Source::Real);
    rec.synthetic_seen = data.table().source_total(Source::Synthetic);
    return rec;
}

// Train continuing from existing params (pipeline stages share weights).
void train_into(ModelParams& params, std::vector<StageRecord>& history, const std::string& stage,
                const Dataset& data, const Dataset* validation, const TrainConfig& config,
                bool forbid_mixed_batches) {
    config.validate();
    if (data.size() == 0) throw std::invalid_argument("train: empty dataset");
    if (config.method == TrainMethod::DFR) {
        if (validation == nullptr)
            throw std::invalid_argument("train: DFR requires a balanced validation set");
        require_balanced_validation(*validation);
    }

    TrainConfig sgd_config = config;
    if (config.method == TrainMethod::DFR) sgd_config.method = TrainMethod::ERM;

    Rng batch_rng(derive_seed(config.seed, 0xba7cULL));
    run_sgd(params, data, sgd_config, batch_rng, forbid_mixed_batches);
    history.push_back(make_record(stage, config, data));

    if (config.method == TrainMethod::DFR) {
        HeadFitOptions options;
        options.weight_decay = config.weight_decay;
        dataset_head_retrain(params, *validation, options);
        StageRecord rec = make_record("dfr_head", config, *validation);
        rec.epochs = 0;
        history.push_back(rec);
    }
}

// Freeze features and refit only the head on `validation`, starting from
// the incumbent head.
double dataset_head_retrain(ModelParams& params, const Dataset& validation,
                            const HeadFitOptions& options) {
    std::vector<std::vector<double>> feats;
    std::vector<int> labels;
    feats.reserve(validation.size());
    labels.reserve(validation.size());
    for (const auto& ex : validation.examples()) {
        feats.push_back(forward(params, ex.features).embedding);
        labels.push_back(ex.class_y);
    }
    LinearHead incumbent;
    incumbent.in_dim = params.hidden;
    incumbent.n_classes = params.n_classes;
    incumbent.w = params.head_w;
    incumbent.b = params.head_b;
    const LinearHead refit =
        fit_linear_head(feats, labels, params.n_classes, options, &incumbent);
    params.head_w = refit.w;
    params.head_b = refit.b;
    return 0.0;
}

}  // namespace

int LinearHead::predict(const std::vector<double>& x) const {
    int best = 0;
    double best_score = -1e300;
    for (int c = 0; c < n_classes; ++c) {
        double s = b[c];
        const double* row = w.data() + static_cast<std::size_t>(c) * in_dim;
        for (int i = 0; i < in_dim; ++i) s += row[i] * x[i];
        if (s > best_score) {
            best_score = s;
            best = c;
        }
    }
    return best;
}

LinearHead fit_linear_head(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, int n_classes,
                           const HeadFitOptions& options, const LinearHead* init) {
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("fit_linear_head: bad inputs");
    const int in_dim = static_cast<int>(features.front().size());
    const std::size_t n = features.size();

    LinearHead head;
    head.in_dim = in_dim;
    head.n_classes = n_classes;
    if (init != nullptr) {
        if (init->in_dim != in_dim || init->n_classes != n_classes)
            throw std::invalid_argument("fit_linear_head: init shape mismatch");
        head = *init;
    } else {
        head.w.assign(static_cast<std::size_t>(n_classes) * in_dim, 0.0);
        head.b.assign(n_classes, 0.0);
    }

    std::vector<double> logits(n_classes), probs(n_classes);
    std::vector<double> dw(head.w.size()), db(head.b.size());
    double prev_loss = 1e300;
    for (int step = 0; step < options.max_steps; ++step) {
        std::fill(dw.begin(), dw.end(), 0.0);
        std::fill(db.begin(), db.end(), 0.0);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& x = features[i];
            for (int c = 0; c < n_classes; ++c) {
                double s = head.b[c];
                const double* row = head.w.data() + static_cast<std::size_t>(c) * in_dim;
                for (int d = 0; d < in_dim; ++d) s += row[d] * x[d];
                logits[c] = s;
            }
            const double zmax = *std::max_element(logits.begin(), logits.end());
            double zsum = 0.0;
            for (int c = 0; c < n_classes; ++c) {
                probs[c] = std::exp(logits[c] - zmax);
                zsum += probs[c];
            }
            loss += std::log(zsum) + zmax - logits[labels[i]];
            for (int c = 0; c < n_classes; ++c) {
                const double dz = (probs[c] / zsum - (c == labels[i] ? 1.0 : 0.0)) / static_cast<double>(n);
                db[c] += dz;
                double* drow = dw.data() + static_cast<std::size_t>(c) * in_dim;
                for (int d = 0; d < in_dim; ++d) drow[d] += dz * x[d];
            }
        }
        loss /= static_cast<double>(n);
        for (const double w : head.w) loss += 0.5 * options.weight_decay * w * w;
        if (!std::isfinite(loss)) throw std::runtime_error("fit_linear_head: non-finite loss");
        if (std::abs(prev_loss - loss) < options.tol) break;
        prev_loss = loss;
        for (std::size_t i = 0; i < head.w.size(); ++i)
            head.w[i] -= options.learning_rate * (dw[i] + options.weight_decay * head.w[i]);
        for (std::size_t i = 0; i < head.b.size(); ++i)
            head.b[i] -= options.learning_rate * db[i];
    }
    return head;
}

TrainedModel train(const Dataset& data, const Dataset* validation, const TrainConfig& config) {
    TrainedModel model;
    model.config = config;
    model.params = ModelParams::init(data.dim(), config.hidden, data.n_classes(), config.seed);
    train_into(model.params, model.stage_history, "train", data, validation, config, false);
    return model;
}

TrainedModel run_pipeline(const PipelineSpec& spec, const SplitBundle& bundle,
                          const GeneratorConfig& generator) {
    if (bundle.train.table().source_total(Source::Synthetic) != 0)
        throw std::invalid_argument("run_pipeline: stage-2 corpus must be purely real");

    TrainConfig stage1 = spec.stage1;
    stage1.method = TrainMethod::ERM;
    stage1.group_by_source = false;

    const std::int64_t budget =
        spec.stage1_budget > 0 ? spec.stage1_budget : shared_budget(bundle.train.table());
    const AugmentationPlan plan =
        distribute_budget(generator, budget, spec.pretraining_marginal, Regime::FFR_Stage1);
    Rng synth_rng(derive_seed(generator.seed, 0x5f7a6eULL));
    const Dataset stage1_corpus = sample_synthetic(generator, plan, synth_rng);
    if (stage1_corpus.table().source_total(Source::Real) != 0)
        throw std::invalid_argument("run_pipeline: stage-1 corpus must be purely synthetic");

    struct Step {
        int which;  // 1 or 2
    };
    std::vector<Step> steps;
    switch (spec.stage_order) {
        case StageOrder::Stage1Only: steps = {{1}}; break;
        case StageOrder::Stage2Only: steps = {{2}}; break;
        case StageOrder::Stage2ThenStage1: steps = {{2}, {1}}; break;
        case StageOrder::Stage1ThenStage2: steps = {{1}, {2}}; break;
    }

    if (stage1.hidden != spec.stage2.hidden)
        throw std::invalid_argument("run_pipeline: stage configs disagree on hidden width");

    TrainedModel model;
    const TrainConfig& first = steps.front().which == 1 ? stage1 : spec.stage2;
    model.params = ModelParams::init(bundle.train.dim(), first.hidden, bundle.train.n_classes(),
                                     first.seed);
    for (const Step& step : steps) {
        if (step.which == 1) {
            train_into(model.params, model.stage_history, "stage1", stage1_corpus, nullptr, stage1,
                       true);
        } else {
            train_into(model.params, model.stage_history, "stage2", bundle.train, &bundle.validation,
                       spec.stage2, true);
        }
    }
    model.config = steps.back().which == 1 ? stage1 : spec.stage2;
    return model;
}

std::string TrainedModel::to_json() const {
    nlohmann::json j;
    j["dim"] = params.dim;
    j["hidden"] = params.hidden;
    j["n_classes"] = params.n_classes;
    j["hidden_w"] = params.hidden_w;
    j["hidden_b"] = params.hidden_b;
    j["head_w"] = params.head_w;
    j["head_b"] = params.head_b;
    j["config"] = {
        {"method", to_string(config.method)},
        {"epochs", config.epochs},
        {"batch_size", config.batch_size},
        {"learning_rate", config.learning_rate},
        {"weight_decay", config.weight_decay},
        {"groupdro_eta", config.groupdro_eta},
        {"freeze_features", config.freeze_features},
        {"group_by_source", config.group_by_source},
        {"hidden", config.hidden},
        {"seed", config.seed},
    };
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& s : stage_history)
        stages.push_back({{"stage", s.stage},
                          {"method", to_string(s.method)},
                          {"epochs", s.epochs},
                          {"corpus_size", s.corpus_size},
                          {"real_seen", s.real_seen},
                          {"synthetic_seen", s.synthetic_seen}});
    j["stage_history"] = stages;
    return j.dump();
}

TrainedModel TrainedModel::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    TrainedModel m;
    m.params.dim = j.at("dim").get<int>();
    m.params.hidden = j.at("hidden").get<int>();
    m.params.n_classes = j.at("n_classes").get<int>();
    m.params.hidden_w = j.at("hidden_w").get<std::vector<double>>();
    m.params.hidden_b = j.at("hidden_b").get<std::vector<double>>();
    m.params.head_w = j.at("head_w").get<std::vector<double>>();
    m.params.head_b = j.at("head_b").get<std::vector<double>>();
    const auto& c = j.at("config");
    m.config.method = train_method_from_string(c.at("method").get<std::string>());
    m.config.epochs = c.at("epochs").get<int>();
    m.config.batch_size = c.at("batch_size").get<int>();
    m.config.learning_rate = c.at("learning_rate").get<double>();
    m.config.weight_decay = c.at("weight_decay").get<double>();
    m.config.groupdro_eta = c.at("groupdro_eta").get<double>();
    m.config.freeze_features = c.at("freeze_features").get<bool>();
    m.config.group_by_source = c.at("group_by_source").get<bool>();
    m.config.hidden = c.at("hidden").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("stage_history")) {
        StageRecord rec;
        rec.stage = s.at("stage").get<std::string>();
        rec.method = train_method_from_string(s.at("method").get<std::string>());
        rec.epochs = s.at("epochs").get<int>();
        rec.corpus_size = s.at("corpus_size").get<std::int64_t>();
        rec.real_seen = s.at("real_seen").get<std::int64_t>();
        rec.synthetic_seen = s.at("synthetic_seen").get<std::int64_t>();
        m.stage_history.push_back(rec);
    }
    return m;
}

}  // namespace spurlab
