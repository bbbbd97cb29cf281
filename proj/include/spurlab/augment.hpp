#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spurlab/core.hpp"

namespace spurlab {

enum class Regime { None, USB, ASB, FFR_Stage1 };

const char* to_string(Regime r);
Regime regime_from_string(const std::string& s);

// Per-subgroup synthetic sample counts realizing one augmentation regime.
// FFR_Stage1 plans describe a corpus trained on alone; combining one with
// real data is a contract violation.
struct AugmentationPlan {
    Regime regime = Regime::None;
    int n_classes = 0;
    int n_bias = 0;
    std::vector<std::int64_t> per_subgroup_synthetic;  // flattened y * n_bias + b
    std::int64_t budget = 0;                           // sum of the above
    std::int64_t remainder = 0;                        // discarded by the floor rule

    std::int64_t count(int y, int b) const { return per_subgroup_synthetic[y * n_bias + b]; }
    std::string to_json() const;
};

// Fill every subgroup up to the largest real subgroup count.
AugmentationPlan plan_usb(const SubgroupTable& real_table);

// Uniform floor(budget / cells) per subgroup; leftover reported as
// remainder and discarded, keeping the added set exactly balanced.
AugmentationPlan plan_asb(const SubgroupTable& real_table, std::int64_t budget);

// Same arithmetic as ASB but the corpus is used alone in stage 1.
AugmentationPlan plan_ffr_stage1(const SubgroupTable& real_table, std::int64_t budget);

// The synthetic budget shared by USB, ASB, and FFR: the number of samples
// USB needs to balance the real table.
std::int64_t shared_budget(const SubgroupTable& real_table);

// Real table plus the plan's counts as synthetic cells. Throws
// std::logic_error for FFR_Stage1 plans (the regime forbids mixing).
SubgroupTable combined_table(const AugmentationPlan& plan, const SubgroupTable& real_table);

}  // namespace spurlab
