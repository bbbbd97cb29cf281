#include "spurlab/metrics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace spurlab {

const char* to_string(SourceScope s) {
    switch (s) {
        case SourceScope::Real: return "real";
        case SourceScope::Synthetic: return "synthetic";
        case SourceScope::Both: return "both";
    }
    return "?";
}

SourceScope source_scope_from_string(const std::string& s) {
    if (s == "real") return SourceScope::Real;
    if (s == "synthetic") return SourceScope::Synthetic;
    if (s == "both") return SourceScope::Both;
    throw std::invalid_argument("unknown source scope: " + s);
}

EvalReport evaluate(const TrainedModel& model, const Dataset& dataset, SourceScope scope) {
    const int Y = dataset.n_classes();
    const int B = dataset.n_bias();
    const auto& examples = dataset.examples();
    const std::int64_t n = static_cast<std::int64_t>(examples.size());

    std::vector<std::int64_t> totals(static_cast<std::size_t>(Y) * B, 0);
    std::vector<std::int64_t> correct(static_cast<std::size_t>(Y) * B, 0);

#pragma omp parallel
    {
        std::vector<std::int64_t> local_totals(totals.size(), 0);
        std::vector<std::int64_t> local_correct(correct.size(), 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t i = 0; i < n; ++i) {
            const LabeledExample& ex = examples[i];
            if (scope == SourceScope::Real && ex.source_g != Source::Real) continue;
            if (scope == SourceScope::Synthetic && ex.source_g != Source::Synthetic) continue;
            const ForwardResult f = forward(model.params, ex.features);
            const int pred = static_cast<int>(std::max_element(f.logits.begin(), f.logits.end()) -
                                              f.logits.begin());
            const std::size_t cell = static_cast<std::size_t>(ex.class_y) * B + ex.bias_b;
            ++local_totals[cell];
            if (pred == ex.class_y) ++local_correct[cell];
        }
#pragma omp critical
        {
            for (std::size_t c = 0; c < totals.size(); ++c) {
                totals[c] += local_totals[c];
                correct[c] += local_correct[c];
            }
        }
    }

    EvalReport report;
    report.source_scope = scope;
    double sum = 0.0;
    double worst = 2.0;
    for (int y = 0; y < Y; ++y)
        for (int b = 0; b < B; ++b) {
            const std::size_t cell = static_cast<std::size_t>(y) * B + b;
            if (totals[cell] == 0) {
                report.empty_subgroups.emplace_back(y, b);
                continue;
            }
            const double acc = static_cast<double>(correct[cell]) / static_cast<double>(totals[cell]);
            report.per_subgroup_accuracy.push_back({y, b, totals[cell], acc});
            sum += acc;
            worst = std::min(worst, acc);
        }
    if (report.per_subgroup_accuracy.empty())
        throw std::invalid_argument("evaluate: scope filter leaves no examples");
    report.worst_accuracy = worst;
    report.balanced_accuracy = sum / static_cast<double>(report.per_subgroup_accuracy.size());
    return report;
}

namespace {

// Split-stream fingerprint that follows the dataset, not the argument
// position, so swapping the probe's two inputs flips only the labels.
std::uint64_t dataset_fingerprint(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ data.size();
    auto mix = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        h = splitmix64(h ^ bits);
    };
    if (!data.examples().empty()) {
        for (double v : data.examples().front().features) mix(v);
        for (double v : data.examples().back().features) mix(v);
    }
    return h;
}

std::vector<std::size_t> half_split(std::size_t n, std::size_t take, Rng& rng) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);
    order.resize(take);
    return order;
}

}  // namespace

double source_probe(const TrainedModel& model, const Dataset& real_data,
                    const Dataset& synthetic_data, Rng& rng) {
    constexpr std::size_t kMinPerSource = 20;
    if (real_data.size() < kMinPerSource || synthetic_data.size() < kMinPerSource)
        throw std::invalid_argument("source_probe: need at least 20 examples per source");
    if (real_data.dim() != synthetic_data.dim())
        throw std::invalid_argument("source_probe: feature dimension mismatch");

    const std::size_t per_source = std::min(real_data.size(), synthetic_data.size());
    const std::uint64_t base = rng.next_u64();

    std::vector<std::vector<double>> train_x, test_x;
    std::vector<int> train_y, test_y;

    // Streams and processing order follow the datasets (by fingerprint),
    // not the argument order, so swapping the arguments flips exactly the
    // labels and the accuracy is bit-identical.
    const Dataset* sources[2] = {&real_data, &synthetic_data};
    int order[2] = {0, 1};
    if (dataset_fingerprint(synthetic_data) < dataset_fingerprint(real_data)) {
        order[0] = 1;
        order[1] = 0;
    }
    for (const int label : order) {
        const Dataset& data = *sources[label];
        Rng stream(derive_seed(base, dataset_fingerprint(data)));
        const auto picked = half_split(data.size(), per_source, stream);
        const std::size_t half = per_source / 2;
        for (std::size_t k = 0; k < per_source; ++k) {
            const auto& ex = data.examples()[picked[k]];
            auto emb = forward(model.params, ex.features).embedding;
            if (k < half) {
                train_x.push_back(std::move(emb));
                train_y.push_back(label);
            } else {
                test_x.push_back(std::move(emb));
                test_y.push_back(label);
            }
        }
    }

    // Standardize on probe-train statistics; keeps the convex fit well
    // conditioned without leaking test data.
    const int dim = static_cast<int>(train_x.front().size());
    std::vector<double> mean(dim, 0.0), var(dim, 0.0);
    for (const auto& x : train_x)
        for (int d = 0; d < dim; ++d) mean[d] += x[d];
    for (double& m : mean) m /= static_cast<double>(train_x.size());
    for (const auto& x : train_x)
        for (int d = 0; d < dim; ++d) var[d] += (x[d] - mean[d]) * (x[d] - mean[d]);
    for (double& v : var) v = std::sqrt(v / static_cast<double>(train_x.size()));
    auto standardize = [&](std::vector<std::vector<double>>& xs) {
        for (auto& x : xs)
            for (int d = 0; d < dim; ++d) x[d] = var[d] > 1e-12 ? (x[d] - mean[d]) / var[d] : 0.0;
    };
    standardize(train_x);
    standardize(test_x);

    HeadFitOptions options;
    options.learning_rate = 0.5;
    options.weight_decay = 1e-4;
    const LinearHead head = fit_linear_head(train_x, train_y, 2, options);

    std::int64_t correct = 0;
    for (std::size_t i = 0; i < test_x.size(); ++i)
        if (head.predict(test_x[i]) == test_y[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(test_x.size());
}

std::string eval_csv_row(const std::string& method, const std::string& augmentation,
                         double bias_ratio, std::uint64_t seed, const std::string& scope,
                         double wa, double ba, double probe_acc) {
    std::ostringstream out;
    out.precision(10);
    out << method << ',' << augmentation << ',' << bias_ratio << ',' << seed << ',' << scope << ','
        << wa << ',' << ba << ',' << probe_acc;
    return out.str();
}

const char* eval_csv_header() { return "method,augmentation,bias_ratio,seed,scope,WA,BA,probe_acc"; }

}  // namespace spurlab
