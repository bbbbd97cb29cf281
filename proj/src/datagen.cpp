#include "spurlab/datagen.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace spurlab {

const char* to_string(SyntheticMarginal m) {
    switch (m) {
        case SyntheticMarginal::BalancedB: return "balanced_b";
        case SyntheticMarginal::MatchRealBias: return "match_real_bias";
        case SyntheticMarginal::Unconditional: return "unconditional";
    }
    return "?";
}

SyntheticMarginal synthetic_marginal_from_string(const std::string& s) {
    if (s == "balanced_b") return SyntheticMarginal::BalancedB;
    if (s == "match_real_bias") return SyntheticMarginal::MatchRealBias;
    if (s == "unconditional") return SyntheticMarginal::Unconditional;
    throw std::invalid_argument("unknown synthetic marginal: " + s);
}

void GeneratorConfig::validate() const {
    if (dim < 1) throw std::invalid_argument("GeneratorConfig: dim must be >= 1");
    if (noise_sigma <= 0) throw std::invalid_argument("GeneratorConfig: noise_sigma must be > 0");
    if (bias_ratio <= 1.0 / n_bias || bias_ratio > 1.0)
        throw std::invalid_argument("GeneratorConfig: bias_ratio must lie in (1/|B|, 1]");
    if (n_per_class < 1) throw std::invalid_argument("GeneratorConfig: n_per_class must be >= 1");
    if (n_val_per_subgroup < 10)
        throw std::invalid_argument("GeneratorConfig: validation needs >= 10 samples per subgroup");
    if (n_test_per_subgroup < 1)
        throw std::invalid_argument("GeneratorConfig: n_test_per_subgroup must be >= 1");
    if (artifact_noise_severity < 0 || artifact_noise_severity > 5)
        throw std::invalid_argument("GeneratorConfig: artifact_noise_severity must be in 0..5");
    int needed = 0;
    if (class_scale != 0.0) ++needed;
    if (bias_scale != 0.0) ++needed;
    if (artifact_scale != 0.0) ++needed;
    if (dim < needed)
        throw std::invalid_argument("GeneratorConfig: dim too small for orthogonal directions");
}

std::string GeneratorConfig::to_json() const {
    nlohmann::json j;
    j["dim"] = dim;
    j["class_scale"] = class_scale;
    j["bias_scale"] = bias_scale;
    j["artifact_scale"] = artifact_scale;
    j["noise_sigma"] = noise_sigma;
    j["bias_ratio"] = bias_ratio;
    j["n_per_class"] = n_per_class;
    j["n_val_per_subgroup"] = n_val_per_subgroup;
    j["n_test_per_subgroup"] = n_test_per_subgroup;
    j["seed"] = seed;
    j["artifact_noise_severity"] = artifact_noise_severity;
    j["synthetic_marginal"] = spurlab::to_string(synthetic_marginal);
    return j.dump();
}

GeneratorConfig GeneratorConfig::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    GeneratorConfig c;
    c.dim = j.value("dim", c.dim);
    c.class_scale = j.value("class_scale", c.class_scale);
    c.bias_scale = j.value("bias_scale", c.bias_scale);
    c.artifact_scale = j.value("artifact_scale", c.artifact_scale);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.bias_ratio = j.value("bias_ratio", c.bias_ratio);
    c.n_per_class = j.value("n_per_class", c.n_per_class);
    c.n_val_per_subgroup = j.value("n_val_per_subgroup", c.n_val_per_subgroup);
    c.n_test_per_subgroup = j.value("n_test_per_subgroup", c.n_test_per_subgroup);
    c.seed = j.value("seed", c.seed);
    c.artifact_noise_severity = j.value("artifact_noise_severity", c.artifact_noise_severity);
    if (j.contains("synthetic_marginal"))
        c.synthetic_marginal = synthetic_marginal_from_string(j["synthetic_marginal"].get<std::string>());
    c.validate();
    return c;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void normalize(std::vector<double>& v) {
    const double n = std::sqrt(dot(v, v));
    if (n < 1e-12) throw std::runtime_error("direction basis: degenerate draw");
    for (double& x : v) x /= n;
}

}  // namespace

DirectionBasis DirectionBasis::build(const GeneratorConfig& config) {
    config.validate();
    Rng rng(derive_seed(config.seed, 0xd17ec7105ULL));

    // Draw, Gram-Schmidt, and keep as many orthonormal directions as the
    // dimension allows. Directions with nonzero scale are filled first;
    // zero-scale directions never contribute and may collapse to zero
    // vectors when dim < 3.
    const double scales[3] = {config.class_scale, config.bias_scale, config.artifact_scale};
    std::vector<int> order;
    for (int s = 0; s < 3; ++s)
        if (scales[s] != 0.0) order.push_back(s);
    for (int s = 0; s < 3; ++s)
        if (scales[s] == 0.0) order.push_back(s);

    std::vector<std::vector<double>> dirs;
    const int want = std::min(3, config.dim);
    int attempts = 0;
    while (static_cast<int>(dirs.size()) < want) {
        if (++attempts > 64) throw std::runtime_error("direction basis: could not orthonormalize");
        std::vector<double> v(config.dim);
        for (double& x : v) x = rng.gaussian();
        for (const auto& u : dirs) {
            const double p = dot(v, u);
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * u[i];
        }
        if (std::sqrt(dot(v, v)) < 1e-6) continue;  // near-collinear draw, retry
        normalize(v);
        dirs.push_back(std::move(v));
    }
    while (static_cast<int>(dirs.size()) < 3) dirs.emplace_back(config.dim, 0.0);

    std::vector<double>* slots[3];
    DirectionBasis basis;
    slots[0] = &basis.class_dir;
    slots[1] = &basis.bias_dir;
    slots[2] = &basis.artifact_dir;
    for (int i = 0; i < 3; ++i) *slots[order[i]] = dirs[i];

    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (scales[i] != 0.0 && scales[j] != 0.0 &&
                std::abs(dot(*slots[i], *slots[j])) > 1e-9)
                throw std::runtime_error("direction basis: orthogonality assertion failed");
    return basis;
}

LabeledExample sample_example(const GeneratorConfig& config, const DirectionBasis& basis,
                              int y, int b, Source g, Rng& rng) {
    if (y < 0 || y >= GeneratorConfig::n_classes || b < 0 || b >= GeneratorConfig::n_bias)
        throw std::out_of_range("sample_example: label out of range");

    const double s_y = y == 0 ? -1.0 : 1.0;
    const double s_b = b == 0 ? -1.0 : 1.0;
    const bool synthetic = g == Source::Synthetic;
    const int k = synthetic ? config.artifact_noise_severity : 0;
    const double class_gain = config.class_scale * (1.0 - k / 10.0);
    const double extra_noise = (k / 5.0) * config.noise_sigma;

    LabeledExample ex;
    ex.class_y = y;
    ex.bias_b = b;
    ex.source_g = g;
    ex.features.resize(config.dim);
    for (int i = 0; i < config.dim; ++i) {
        double v = s_y * class_gain * basis.class_dir[i] + s_b * config.bias_scale * basis.bias_dir[i];
        if (synthetic) v += config.artifact_scale * basis.artifact_dir[i];
        v += config.noise_sigma * rng.gaussian();
        if (extra_noise > 0.0) v += extra_noise * rng.gaussian();
        ex.features[i] = v;
    }
    return ex;
}

std::int64_t min_feasible_n_per_class(double rho) {
    // minority = n - round(rho * n) >= 1  <=>  n > 0.5 / (1 - rho)
    if (rho >= 1.0) throw std::invalid_argument("no finite n_per_class keeps a minority at rho = 1");
    return static_cast<std::int64_t>(std::floor(0.5 / (1.0 - rho))) + 1;
}

namespace {

Dataset balanced_real_split(const GeneratorConfig& config, const DirectionBasis& basis,
                            std::int64_t per_subgroup, std::uint64_t stream) {
    Rng rng(derive_seed(config.seed, stream));
    std::vector<LabeledExample> examples;
    examples.reserve(static_cast<std::size_t>(per_subgroup) * 4);
    for (int y = 0; y < GeneratorConfig::n_classes; ++y)
        for (int b = 0; b < GeneratorConfig::n_bias; ++b)
            for (std::int64_t i = 0; i < per_subgroup; ++i)
                examples.push_back(sample_example(config, basis, y, b, Source::Real, rng));
    return Dataset(std::move(examples), GeneratorConfig::n_classes, GeneratorConfig::n_bias);
}

}  // namespace

SplitBundle make_biased_split(const GeneratorConfig& config) {
    config.validate();
    const DirectionBasis basis = DirectionBasis::build(config);

    const std::int64_t majority =
        static_cast<std::int64_t>(std::floor(config.bias_ratio * config.n_per_class + 0.5));
    const std::int64_t minority = config.n_per_class - majority;
    if (minority < 1)
        throw std::invalid_argument(
            "make_biased_split: minority subgroup would be empty at this ratio; smallest feasible "
            "n_per_class is " +
            std::to_string(min_feasible_n_per_class(config.bias_ratio)));

    Rng train_rng(derive_seed(config.seed, 1));
    std::vector<LabeledExample> train;
    train.reserve(static_cast<std::size_t>(config.n_per_class) * GeneratorConfig::n_classes);
    for (int y = 0; y < GeneratorConfig::n_classes; ++y) {
        const int majority_b = y % GeneratorConfig::n_bias;
        for (int b = 0; b < GeneratorConfig::n_bias; ++b) {
            const std::int64_t n = b == majority_b ? majority : minority;
            for (std::int64_t i = 0; i < n; ++i)
                train.push_back(sample_example(config, basis, y, b, Source::Real, train_rng));
        }
    }

    return SplitBundle{
        Dataset(std::move(train), GeneratorConfig::n_classes, GeneratorConfig::n_bias),
        balanced_real_split(config, basis, config.n_val_per_subgroup, 2),
        balanced_real_split(config, basis, config.n_test_per_subgroup, 3),
    };
}

Dataset sample_synthetic(const GeneratorConfig& config, const AugmentationPlan& plan, Rng& rng) {
    config.validate();
    if (plan.n_classes != GeneratorConfig::n_classes || plan.n_bias != GeneratorConfig::n_bias)
        throw std::invalid_argument("sample_synthetic: plan cardinality mismatch");
    const DirectionBasis basis = DirectionBasis::build(config);
    std::vector<LabeledExample> examples;
    examples.reserve(static_cast<std::size_t>(plan.budget));
    for (int y = 0; y < plan.n_classes; ++y)
        for (int b = 0; b < plan.n_bias; ++b)
            for (std::int64_t i = 0; i < plan.count(y, b); ++i)
                examples.push_back(sample_example(config, basis, y, b, Source::Synthetic, rng));
    return Dataset(std::move(examples), plan.n_classes, plan.n_bias);
}

AugmentationPlan distribute_budget(const GeneratorConfig& config, std::int64_t total,
                                   SyntheticMarginal marginal, Regime regime) {
    if (total < 0) throw std::invalid_argument("distribute_budget: total must be >= 0");
    AugmentationPlan plan;
    plan.regime = regime;
    plan.n_classes = GeneratorConfig::n_classes;
    plan.n_bias = GeneratorConfig::n_bias;
    const int cells = plan.n_classes * plan.n_bias;
    plan.per_subgroup_synthetic.assign(cells, 0);

    if (marginal == SyntheticMarginal::BalancedB) {
        const std::int64_t per_cell = total / cells;
        plan.per_subgroup_synthetic.assign(cells, per_cell);
        plan.budget = per_cell * cells;
        plan.remainder = total - plan.budget;
        return plan;
    }

    const std::int64_t per_class = total / plan.n_classes;
    for (int y = 0; y < plan.n_classes; ++y) {
        const std::int64_t majority =
            static_cast<std::int64_t>(std::floor(config.bias_ratio * per_class + 0.5));
        // MatchRealBias pairs the majority with class y like the real split;
        // Unconditional skews every class toward bias group 0.
        const int majority_b = marginal == SyntheticMarginal::MatchRealBias
                                   ? y % GeneratorConfig::n_bias
                                   : 0;
        for (int b = 0; b < plan.n_bias; ++b) {
            const std::int64_t n = b == majority_b ? majority : per_class - majority;
            plan.per_subgroup_synthetic[y * plan.n_bias + b] = n;
            plan.budget += n;
        }
    }
    plan.remainder = total - plan.budget;
    return plan;
}

}  // namespace spurlab
