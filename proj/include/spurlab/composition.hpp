#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spurlab/core.hpp"
#include "spurlab/rational.hpp"

namespace spurlab {

enum class BiasScope { B_only, B_and_G };

// A (y, b, g) cell at which P(Y=y | B=b, G=g) strictly differs from P(Y=y).
struct BiasWitness {
    int class_y = 0;
    int bias_b = 0;
    Source source_g = Source::Real;
};

struct BiasReport {
    // Majority bias-group share per class, max_b P(B=b | Y=y); nullopt for
    // classes with zero total count (undefined, not 0).
    std::vector<std::optional<Rational>> per_class_bias_ratio;
    bool biased_wrt_B = false;
    bool biased_wrt_BG = false;
    // First cell establishing each predicate, when it holds.
    std::optional<std::pair<int, int>> b_witness;  // (y, b)
    std::optional<BiasWitness> bg_witness;
};

// Exact bias predicates over a count table. Cells whose condition has zero
// support are excluded from the predicates (conditioning on a
// zero-probability event is undefined, not unequal). Under B_only scope the
// (B, G) refinement is not evaluated and its fields stay false/empty.
BiasReport analyze_bias(const SubgroupTable& table, BiasScope scope = BiasScope::B_and_G);

// True iff P(B=b | Y=y) = P(B=b | Y=y') exactly for all b and all supported
// class pairs. With refine_by_source, the bias variable is the (b, g) pair.
bool check_lemma1(const SubgroupTable& table, bool refine_by_source = false);

struct TheoremConfig {
    std::int64_t per_cell_cap = 5;
    std::int64_t safety_limit = 10'000'000;  // max enumerated tables
    bool record_witnesses = false;           // keep per-augmentation witness cells
    int threads = 0;                         // 0 = OpenMP default
};

struct TheoremVerdict {
    SubgroupTable seed_table;
    std::int64_t augmentations_checked = 0;
    // Synthetic per-(y,b) addition vectors (flattened y*|B|+b) for which
    // P(Y|B,G) = P(Y) held at every supported cell. Theorem 1 says this
    // stays empty for every biased real-only seed.
    std::vector<std::vector<std::int64_t>> counterexamples;
    // When recorded: one witness cell per augmentation, indexed by
    // enumeration order; entries are nullopt exactly for counterexamples.
    std::vector<std::pair<std::vector<std::int64_t>, BiasWitness>> per_augmentation_witness;
    std::optional<BiasWitness> first_witness;  // witness of augmentation 0 (the seed itself)
};

// Enumerates every synthetic-count vector in {0..cap}^(|Y|*|B|), augments
// the seed and records the augmentations (expected: none) for which the
// (B, G) bias vanishes. The enumeration space is partitioned across OpenMP
// threads; results merge by concatenating counterexamples in index order.
//
// Throws std::invalid_argument when the seed is not real-only, is not
// biased w.r.t. B (theorem hypothesis violated), or when the enumeration
// size exceeds the safety limit.
TheoremVerdict verify_theorem1(const SubgroupTable& seed, const TheoremConfig& config);

inline TheoremVerdict verify_theorem1(const SubgroupTable& seed, std::int64_t per_cell_cap) {
    TheoremConfig config;
    config.per_cell_cap = per_cell_cap;
    return verify_theorem1(seed, config);
}

}  // namespace spurlab
