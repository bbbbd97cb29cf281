#include "spurlab/composition.hpp"

#include <omp.h>

#include <algorithm>
#include <stdexcept>

namespace spurlab {

namespace {

// count(y)/total == count(y,cell)/cell_total, cross-multiplied in 128 bit.
inline bool cell_matches_marginal(std::int64_t cell_y, std::int64_t cell_total,
                                  std::int64_t class_y_total, std::int64_t total) {
    return static_cast<__int128>(cell_y) * total == static_cast<__int128>(class_y_total) * cell_total;
}

}  // namespace

BiasReport analyze_bias(const SubgroupTable& table, BiasScope scope) {
    const std::int64_t total = table.total();
    if (total <= 0) throw std::invalid_argument("analyze_bias: table total must be positive");

    BiasReport report;
    const int Y = table.n_classes();
    const int B = table.n_bias();

    report.per_class_bias_ratio.resize(Y);
    for (int y = 0; y < Y; ++y) {
        const std::int64_t cls = table.class_total(y);
        if (cls == 0) {
            report.per_class_bias_ratio[y] = std::nullopt;
            continue;
        }
        std::int64_t best = 0;
        for (int b = 0; b < B; ++b) best = std::max(best, table.marginal_yb(y, b));
        report.per_class_bias_ratio[y] = Rational(best, cls);
    }

    // P(Y=y | B=b) vs P(Y=y) over supported bias groups.
    for (int b = 0; b < B && !report.biased_wrt_B; ++b) {
        const std::int64_t bias_total = table.bias_total(b);
        if (bias_total == 0) continue;
        for (int y = 0; y < Y; ++y) {
            if (!cell_matches_marginal(table.marginal_yb(y, b), bias_total, table.class_total(y), total)) {
                report.biased_wrt_B = true;
                report.b_witness = std::make_pair(y, b);
                break;
            }
        }
    }

    // P(Y=y | B=b, G=g) vs P(Y=y) over supported (b, g) cells. Skipped
    // under B_only scope (fields stay false/empty).
    if (scope == BiasScope::B_and_G) {
        for (int b = 0; b < B && !report.biased_wrt_BG; ++b) {
            for (int g = 0; g < SubgroupTable::n_sources() && !report.biased_wrt_BG; ++g) {
                const Source src = static_cast<Source>(g);
                const std::int64_t cell_total = table.cell_total(b, src);
                if (cell_total == 0) continue;
                for (int y = 0; y < Y; ++y) {
                    if (!cell_matches_marginal(table.count(y, b, src), cell_total,
                                               table.class_total(y), total)) {
                        report.biased_wrt_BG = true;
                        report.bg_witness = BiasWitness{y, b, src};
                        break;
                    }
                }
            }
        }
    }
    return report;
}

bool check_lemma1(const SubgroupTable& table, bool refine_by_source) {
    const int Y = table.n_classes();
    const int B = table.n_bias();

    // Refined bias cells are (b) or (b, g); class pairs with zero support
    // are skipped because P(B | Y=y) is undefined there.
    std::vector<std::int64_t> class_totals(Y);
    for (int y = 0; y < Y; ++y) class_totals[y] = table.class_total(y);

    const int cells = refine_by_source ? B * SubgroupTable::n_sources() : B;
    for (int cell = 0; cell < cells; ++cell) {
        for (int y = 0; y < Y; ++y) {
            if (class_totals[y] == 0) continue;
            for (int y2 = y + 1; y2 < Y; ++y2) {
                if (class_totals[y2] == 0) continue;
                std::int64_t in_cell_y, in_cell_y2;
                if (refine_by_source) {
                    const int b = cell / SubgroupTable::n_sources();
                    const Source g = static_cast<Source>(cell % SubgroupTable::n_sources());
                    in_cell_y = table.count(y, b, g);
                    in_cell_y2 = table.count(y2, b, g);
                } else {
                    in_cell_y = table.marginal_yb(y, cell);
                    in_cell_y2 = table.marginal_yb(y2, cell);
                }
                // P(cell | Y=y) == P(cell | Y=y2)
                if (static_cast<__int128>(in_cell_y) * class_totals[y2] !=
                    static_cast<__int128>(in_cell_y2) * class_totals[y])
                    return false;
            }
        }
    }
    return true;
}

namespace {

struct EnumeratedCheck {
    bool bias_vanished = false;
    BiasWitness witness;
};

// Bias check over the seed augmented by `synth` without materializing a
// SubgroupTable; hot path of the enumeration.
EnumeratedCheck check_augmentation(const SubgroupTable& seed,
                                   const std::vector<std::int64_t>& seed_class_totals,
                                   std::int64_t seed_total,
                                   const std::vector<std::int64_t>& synth) {
    const int Y = seed.n_classes();
    const int B = seed.n_bias();

    std::int64_t synth_total = 0;
    for (std::int64_t s : synth) synth_total += s;
    const std::int64_t total = seed_total + synth_total;

    std::vector<std::int64_t> class_totals(seed_class_totals);
    for (int y = 0; y < Y; ++y)
        for (int b = 0; b < B; ++b) class_totals[y] += synth[y * B + b];

    for (int b = 0; b < B; ++b) {
        // Real cells carry the seed counts unchanged.
        const std::int64_t real_cell = seed.cell_total(b, Source::Real);
        if (real_cell > 0) {
            for (int y = 0; y < Y; ++y) {
                if (!cell_matches_marginal(seed.count(y, b, Source::Real), real_cell,
                                           class_totals[y], total))
                    return {false, BiasWitness{y, b, Source::Real}};
            }
        }
        std::int64_t synth_cell = 0;
        for (int y = 0; y < Y; ++y) synth_cell += synth[y * B + b];
        if (synth_cell > 0) {
            for (int y = 0; y < Y; ++y) {
                if (!cell_matches_marginal(synth[y * B + b], synth_cell, class_totals[y], total))
                    return {false, BiasWitness{y, b, Source::Synthetic}};
            }
        }
    }
    return {true, BiasWitness{}};
}

std::vector<std::int64_t> decode_augmentation(std::int64_t index, int cells, std::int64_t base) {
    std::vector<std::int64_t> synth(cells);
    for (int c = 0; c < cells; ++c) {
        synth[c] = index % base;
        index /= base;
    }
    return synth;
}

}  // namespace

TheoremVerdict verify_theorem1(const SubgroupTable& seed, const TheoremConfig& config) {
    if (config.per_cell_cap < 0) throw std::invalid_argument("verify_theorem1: cap must be >= 0");
    if (!seed.real_only())
        throw std::invalid_argument("verify_theorem1: seed must be real-only");
    if (!analyze_bias(seed).biased_wrt_B)
        throw std::invalid_argument("verify_theorem1: seed is not biased w.r.t. B (theorem hypothesis)");

    const int cells = seed.n_classes() * seed.n_bias();
    const std::int64_t base = config.per_cell_cap + 1;
    std::int64_t total_augmentations = 1;
    for (int c = 0; c < cells; ++c) {
        if (total_augmentations > config.safety_limit / base + 1)
            throw std::invalid_argument("verify_theorem1: enumeration size exceeds safety limit");
        total_augmentations *= base;
    }
    if (total_augmentations > config.safety_limit)
        throw std::invalid_argument("verify_theorem1: enumeration size exceeds safety limit");
    if (config.record_witnesses && total_augmentations > 1'000'000)
        throw std::invalid_argument("verify_theorem1: witness recording capped at 1e6 augmentations");

    std::vector<std::int64_t> seed_class_totals(seed.n_classes());
    for (int y = 0; y < seed.n_classes(); ++y) seed_class_totals[y] = seed.class_total(y);
    const std::int64_t seed_total = seed.total();

    TheoremVerdict verdict;
    verdict.seed_table = seed;
    verdict.augmentations_checked = total_augmentations;
    if (config.record_witnesses)
        verdict.per_augmentation_witness.reserve(static_cast<std::size_t>(total_augmentations));

    const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
    std::vector<std::vector<std::int64_t>> counter_indices(threads);
    std::vector<std::vector<std::pair<std::int64_t, BiasWitness>>> witnesses(threads);

#pragma omp parallel num_threads(threads)
    {
        const int tid = omp_get_thread_num();
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < total_augmentations; ++i) {
            const auto synth = decode_augmentation(i, cells, base);
            const auto check = check_augmentation(seed, seed_class_totals, seed_total, synth);
            if (check.bias_vanished)
                counter_indices[tid].push_back(i);
            else if (config.record_witnesses)
                witnesses[tid].emplace_back(i, check.witness);
            if (i == 0 && !check.bias_vanished) verdict.first_witness = check.witness;
        }
    }

    std::vector<std::int64_t> merged;
    for (const auto& part : counter_indices)
        merged.insert(merged.end(), part.begin(), part.end());
    std::sort(merged.begin(), merged.end());
    for (std::int64_t idx : merged)
        verdict.counterexamples.push_back(decode_augmentation(idx, cells, base));

    if (config.record_witnesses) {
        std::vector<std::pair<std::int64_t, BiasWitness>> all;
        for (const auto& part : witnesses) all.insert(all.end(), part.begin(), part.end());
        std::sort(all.begin(), all.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [idx, w] : all)
            verdict.per_augmentation_witness.emplace_back(decode_augmentation(idx, cells, base), w);
    }
    return verdict;
}

}  // namespace spurlab
