#include "spurlab/augment.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace spurlab {

const char* to_string(Regime r) {
    switch (r) {
        case Regime::None: return "none";
        case Regime::USB: return "usb";
        case Regime::ASB: return "asb";
        case Regime::FFR_Stage1: return "ffr_stage1";
    }
    return "?";
}

Regime regime_from_string(const std::string& s) {
    if (s == "none") return Regime::None;
    if (s == "usb") return Regime::USB;
    if (s == "asb") return Regime::ASB;
    if (s == "ffr_stage1") return Regime::FFR_Stage1;
    throw std::invalid_argument("unknown regime: " + s);
}

std::string AugmentationPlan::to_json() const {
    std::ostringstream out;
    out << "{\"regime\":\"" << spurlab::to_string(regime) << "\",\"n_classes\":" << n_classes
        << ",\"n_bias\":" << n_bias << ",\"budget\":" << budget << ",\"remainder\":" << remainder
        << ",\"per_subgroup_synthetic\":[";
    for (std::size_t i = 0; i < per_subgroup_synthetic.size(); ++i) {
        if (i > 0) out << ',';
        out << per_subgroup_synthetic[i];
    }
    out << "]}";
    return out.str();
}

namespace {

void require_real_only(const SubgroupTable& table, const char* op) {
    if (!table.real_only())
        throw std::invalid_argument(std::string(op) + ": expected a real-only table");
}

AugmentationPlan uniform_plan(Regime regime, const SubgroupTable& real_table, std::int64_t budget) {
    if (budget < 0) throw std::invalid_argument("augmentation budget must be >= 0");
    const int cells = real_table.n_classes() * real_table.n_bias();
    AugmentationPlan plan;
    plan.regime = regime;
    plan.n_classes = real_table.n_classes();
    plan.n_bias = real_table.n_bias();
    const std::int64_t per_cell = budget / cells;
    plan.per_subgroup_synthetic.assign(cells, per_cell);
    plan.budget = per_cell * cells;
    plan.remainder = budget - plan.budget;
    return plan;
}

}  // namespace

AugmentationPlan plan_usb(const SubgroupTable& real_table) {
    require_real_only(real_table, "plan_usb");
    AugmentationPlan plan;
    plan.regime = Regime::USB;
    plan.n_classes = real_table.n_classes();
    plan.n_bias = real_table.n_bias();
    std::int64_t max_cell = 0;
    for (int y = 0; y < plan.n_classes; ++y)
        for (int b = 0; b < plan.n_bias; ++b)
            max_cell = std::max(max_cell, real_table.count(y, b, Source::Real));
    plan.per_subgroup_synthetic.resize(static_cast<std::size_t>(plan.n_classes) * plan.n_bias);
    for (int y = 0; y < plan.n_classes; ++y)
        for (int b = 0; b < plan.n_bias; ++b) {
            const std::int64_t add = max_cell - real_table.count(y, b, Source::Real);
            plan.per_subgroup_synthetic[y * plan.n_bias + b] = add;
            plan.budget += add;
        }
    return plan;
}

AugmentationPlan plan_asb(const SubgroupTable& real_table, std::int64_t budget) {
    require_real_only(real_table, "plan_asb");
    return uniform_plan(Regime::ASB, real_table, budget);
}

AugmentationPlan plan_ffr_stage1(const SubgroupTable& real_table, std::int64_t budget) {
    require_real_only(real_table, "plan_ffr_stage1");
    return uniform_plan(Regime::FFR_Stage1, real_table, budget);
}

std::int64_t shared_budget(const SubgroupTable& real_table) {
    return plan_usb(real_table).budget;
}

SubgroupTable combined_table(const AugmentationPlan& plan, const SubgroupTable& real_table) {
    if (plan.regime == Regime::FFR_Stage1)
        throw std::logic_error("combined_table: FFR stage-1 corpora never mix with real data");
    if (plan.n_classes != real_table.n_classes() || plan.n_bias != real_table.n_bias())
        throw std::invalid_argument("combined_table: cardinality mismatch");
    SubgroupTable combined = real_table;
    for (int y = 0; y < plan.n_classes; ++y)
        for (int b = 0; b < plan.n_bias; ++b)
            combined.add_count(y, b, Source::Synthetic, plan.count(y, b));
    return combined;
}

}  // namespace spurlab
