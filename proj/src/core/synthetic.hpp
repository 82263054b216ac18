#ifndef FANOVA_SYNTHETIC_HPP
#define FANOVA_SYNTHETIC_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/subsets.hpp"

namespace fanova {

/// One additive ground-truth component: a dense value table over the joint
/// options of `key` (mixed radix, last module fastest). Tables are projected
/// onto the pure-interaction subspace before use, so every stored component
/// averages to zero over each of its arguments.
struct TruthComponent {
    SubsetKey key;
    std::vector<double> values;
};

struct GroundTruth {
    std::vector<SubsetKey> keys;      // canonical order
    std::vector<double> variances;    // analytic V_U of the centered components
    double total_variance = 0.0;      // sum of the variances (noise-free)
    double noise_sd = 0.0;

    double fraction(std::size_t i) const {
        return total_variance > 0.0 ? variances[i] / total_variance : 0.0;
    }
};

struct SyntheticResult {
    Dataset dataset;
    GroundTruth truth;
};

/// Projects a raw table onto the pure |U|-interaction subspace
/// (inclusion-exclusion over sub-subsets). Idempotent.
std::vector<double> center_component(const ConfigSpace& space, const SubsetKey& key,
                                     std::vector<double> values);

/// Full-factorial dataset with response = sum of centered components plus
/// Gaussian noise, together with the analytic variance of each component.
/// Components over the same subset are summed before centering.
SyntheticResult generate_synthetic(std::shared_ptr<const ConfigSpace> space,
                                   std::vector<TruthComponent> components,
                                   double noise_sd,
                                   std::uint64_t seed);

/// Truth-spec JSON: {"components": [{"modules": [names...], "values": <nested arrays>}]}.
std::vector<TruthComponent> parse_truth(const ConfigSpace& space, const std::string& json_text);
std::vector<TruthComponent> load_truth(const ConfigSpace& space, const std::string& path);

/// Ground-truth sidecar JSON with per-subset variances and fractions.
std::string truth_to_json(const ConfigSpace& space, const GroundTruth& truth);

}  // namespace fanova

#endif
