#pragma once

#include <string>
#include <utility>
#include <vector>

#include "spurlab/core.hpp"
#include "spurlab/rng.hpp"
#include "spurlab/train.hpp"

namespace spurlab {

enum class SourceScope { Real, Synthetic, Both };

const char* to_string(SourceScope s);
SourceScope source_scope_from_string(const std::string& s);

struct SubgroupAccuracy {
    int class_y = 0;
    int bias_b = 0;
    std::int64_t n = 0;
    double accuracy = 0.0;
};

struct EvalReport {
    std::vector<SubgroupAccuracy> per_subgroup_accuracy;  // supported subgroups only
    double worst_accuracy = 0.0;                          // min over supported subgroups
    double balanced_accuracy = 0.0;                       // unweighted mean over them
    SourceScope source_scope = SourceScope::Both;
    std::vector<std::pair<int, int>> empty_subgroups;     // excluded (y,b) pairs
};

// Per-(y,b) accuracy of argmax predictions over examples matching the
// scope. Throws std::invalid_argument when the scope filter empties the
// dataset.
EvalReport evaluate(const TrainedModel& model, const Dataset& dataset, SourceScope scope);

// Linear real-vs-synthetic classifier on the model's embeddings: an equal
// number of examples per source is embedded, split 50/50 into probe-train
// and probe-test, and the held-out accuracy is returned. Near 0.5 means
// the sources are not linearly decodable from the representation; near
// 1.0 means they form separated clusters. Requires >= 20 examples per
// source.
double source_probe(const TrainedModel& model, const Dataset& real_data,
                    const Dataset& synthetic_data, Rng& rng);

// One results-CSV row: `method,augmentation,bias_ratio,seed,scope,WA,BA,probe_acc`.
std::string eval_csv_row(const std::string& method, const std::string& augmentation,
                         double bias_ratio, std::uint64_t seed, const std::string& scope,
                         double wa, double ba, double probe_acc);

const char* eval_csv_header();

}  // namespace spurlab
