#ifndef FANOVA_FOREST_HPP
#define FANOVA_FOREST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/config_space.hpp"
#include "core/dataset.hpp"
#include "core/rng.hpp"

namespace fanova {

struct FitParams {
    int n_trees = 64;
    bool bootstrap = true;
    // 0: default ceil(n/2); kAllFeatures: every module.
    int features_per_split = 0;
    int min_samples_leaf = 1;
    int max_depth = 0;  // 0: unlimited
    std::uint64_t seed = 0;

    static constexpr int kAllFeatures = -1;

    /// Deterministic regime: one tree, no bootstrap, all features, leaves of
    /// size one. On full-factorial distinct-response data the tree reproduces
    /// the training responses exactly.
    static FitParams exact_preset(std::uint64_t seed = 0) {
        FitParams p;
        p.n_trees = 1;
        p.bootstrap = false;
        p.features_per_split = kAllFeatures;
        p.min_samples_leaf = 1;
        p.max_depth = 0;
        p.seed = seed;
        return p;
    }

    /// features_per_split with defaults resolved for an n-module space.
    int resolved_features(int module_count) const;
    void validate(int module_count) const;
};

// Flat node storage; nodes[0] is the root. A node is a leaf iff module < 0.
// Leaves carry the per-module option subsets consistent with the root-to-leaf
// path, which is what makes marginals closed-form.
struct TreeNode {
    int module = -1;
    std::uint64_t left_set = 0;  // options routed to the left child
    int left = -1;
    int right = -1;
    double value = 0.0;                       // leaf only
    std::vector<std::uint64_t> partition;     // leaf only: per-module option masks
};

struct Tree {
    std::vector<TreeNode> nodes;
    std::vector<int> leaves;  // indices into nodes

    double predict(const Variant& v) const;
};

struct Forest {
    std::shared_ptr<const ConfigSpace> space;
    FitParams params;  // resolved (features_per_split > 0)
    std::vector<Tree> trees;

    double predict(const Variant& v) const;
};

struct SplitChoice {
    int module = -1;
    std::uint64_t left_set = 0;
    double children_sse = 0.0;
};

/// Exhaustive CART split over categorical options: among the candidate
/// modules, enumerates every binary partition of the options present in the
/// node rows and returns the one minimizing the summed child SSE. Ties break
/// to the lowest module index, then the lexicographically smallest left set.
/// Returns nullopt when no split strictly reduces the SSE.
std::optional<SplitChoice> best_split(const Dataset& data,
                                      std::span<const std::size_t> rows,
                                      std::span<const int> candidate_modules,
                                      int min_samples_leaf);

/// Grows one tree on the given sample (row indices with multiplicity).
Tree fit_tree(const Dataset& data, std::span<const std::size_t> sample,
              const FitParams& params, RngStream& rng);

/// Grows params.n_trees trees; tree t consumes the substream derived from
/// (params.seed, t), so any fitting schedule gives identical forests.
Forest fit_forest(const Dataset& data, FitParams params);

nlohmann::json forest_to_json(const Forest& forest);
Forest forest_from_json(std::shared_ptr<const ConfigSpace> space, const nlohmann::json& doc);
void save_forest(const Forest& forest, const std::string& path);
Forest load_forest(std::shared_ptr<const ConfigSpace> space, const std::string& path);

}  // namespace fanova

#endif
