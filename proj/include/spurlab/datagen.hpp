#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spurlab/augment.hpp"
#include "spurlab/core.hpp"
#include "spurlab/rng.hpp"

namespace spurlab {

// How a synthetic corpus distributes its bias-group marginal when only a
// total budget is given. BalancedB matches the generator being prompted
// per subgroup; MatchRealBias mirrors the real training bias (pretraining
// ablation); Unconditional models a generator with its own skewed group
// prior, imbalanced in the same direction for every class.
enum class SyntheticMarginal { BalancedB, MatchRealBias, Unconditional };

const char* to_string(SyntheticMarginal m);
SyntheticMarginal synthetic_marginal_from_string(const std::string& s);

struct GeneratorConfig {
    int dim = 8;
    double class_scale = 1.0;     // mu
    double bias_scale = 2.0;      // beta, deliberately > mu: the shortcut is preferred
    double artifact_scale = 1.5;  // alpha, applied to synthetic samples only
    double noise_sigma = 1.0;
    double bias_ratio = 0.95;     // rho, majority share within a class
    std::int64_t n_per_class = 1000;
    std::int64_t n_val_per_subgroup = 25;   // must stay >= 10
    std::int64_t n_test_per_subgroup = 250;
    std::uint64_t seed = 1;
    int artifact_noise_severity = 0;  // 0..5
    SyntheticMarginal synthetic_marginal = SyntheticMarginal::BalancedB;

    static constexpr int n_classes = 2;
    static constexpr int n_bias = 2;

    void validate() const;
    std::string to_json() const;
    static GeneratorConfig from_json(const std::string& text);
};

// Mutually orthonormal class/bias/artifact directions, drawn from the
// config seed and Gram-Schmidt orthonormalized. Directions whose scale is
// zero may be absent when dim is too small to host all three.
struct DirectionBasis {
    std::vector<double> class_dir;
    std::vector<double> bias_dir;
    std::vector<double> artifact_dir;

    static DirectionBasis build(const GeneratorConfig& config);
};

struct SplitBundle {
    Dataset train;       // real, biased at rho
    Dataset validation;  // real, balanced, >= 10 per subgroup
    Dataset test;        // real, balanced
};

// One draw from the parametric model:
//   x = s_y * mu * u_class + s_b * beta * u_bias + [g=Synthetic] * alpha * u_art + eps
// with s in {-1,+1} and eps ~ N(0, sigma^2 I). Severity k > 0 degrades
// synthetic samples: class direction attenuated by (1 - k/10) and extra
// isotropic noise of scale (k/5) * sigma added.
LabeledExample sample_example(const GeneratorConfig& config, const DirectionBasis& basis,
                              int y, int b, Source g, Rng& rng);

// Biased train split plus balanced validation/test splits on disjoint RNG
// streams. Class y's majority bias group is y mod |B|. Throws
// std::invalid_argument naming the smallest feasible n_per_class when the
// minority count would round to zero.
SplitBundle make_biased_split(const GeneratorConfig& config);

// Exactly plan.count(y,b) synthetic examples per subgroup.
Dataset sample_synthetic(const GeneratorConfig& config, const AugmentationPlan& plan, Rng& rng);

// Distribute a total budget over subgroups according to the marginal
// policy; the result plugs into sample_synthetic.
AugmentationPlan distribute_budget(const GeneratorConfig& config, std::int64_t total,
                                   SyntheticMarginal marginal, Regime regime);

// Smallest n_per_class with a non-empty minority subgroup at ratio rho.
std::int64_t min_feasible_n_per_class(double rho);

}  // namespace spurlab
