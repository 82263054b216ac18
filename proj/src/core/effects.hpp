#ifndef FANOVA_EFFECTS_HPP
#define FANOVA_EFFECTS_HPP

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "core/config_space.hpp"
#include "core/forest.hpp"
#include "core/subsets.hpp"

namespace fanova {

enum class FractionMode { ratio, pooled };

/// Produces the marginal table a_U over all joint settings of subset U:
/// the uniform-measure average of the analyzed function with the modules in
/// U fixed and every other module averaged out.
using MarginalTableFn = std::function<std::vector<double>(const SubsetKey&)>;

// The functional-ANOVA components of one function (a fitted tree or an
// empirical table): component tables f_U, their variances V_U, and the
// total variance, for every non-empty U up to max_order.
class FunctionEffects {
  public:
    FunctionEffects(const ConfigSpace& space, int max_order, double mean,
                    double total_variance, const MarginalTableFn& marginal);

    double mean() const { return mean_; }
    double total_variance() const { return total_variance_; }
    const std::vector<SubsetKey>& keys() const { return keys_; }
    int key_index(const SubsetKey& key) const;  // -1 if absent

    /// Component function f_U(theta_U) (zero-mean in each argument).
    double component_value(const SubsetKey& key, std::span<const std::uint8_t> theta) const;
    const std::vector<double>& component_table(const SubsetKey& key) const;
    /// V_U: the uniform-measure mean of f_U squared.
    double subset_variance(const SubsetKey& key) const;
    const std::vector<double>& subset_variances() const { return variances_; }

  private:
    const ConfigSpace& space_;
    double mean_;
    double total_variance_;
    std::vector<SubsetKey> keys_;
    std::vector<std::vector<double>> components_;
    std::vector<double> variances_;
};

// --- closed-form pieces over one fitted tree ---

/// Uniform-measure mean of the tree function.
double tree_mean(const Tree& tree, const ConfigSpace& space);

/// Uniform-measure variance of the tree function: E[y^2] - E[y]^2 computed
/// from leaf values and partition volumes.
double tree_total_variance(const Tree& tree, const ConfigSpace& space);

/// Marginal table a_U for one tree, exact in one pass over the leaves.
std::vector<double> tree_marginal_table(const Tree& tree, const ConfigSpace& space,
                                        const SubsetKey& key);

/// a_U(theta_U) for one setting.
double tree_marginal(const Tree& tree, const ConfigSpace& space, const SubsetKey& key,
                     std::span<const std::uint8_t> theta);

/// Components of one tree up to max_order.
FunctionEffects tree_effects(const Tree& tree, const ConfigSpace& space, int max_order);

// --- forest-level decomposition ---

struct TreeVariances {
    double total_variance = 0.0;
    std::vector<double> subset_variances;  // aligned with EffectDecomposition::keys
};

// Mapping from module subsets to variance fractions, with per-tree raw
// values retained. fractions[i] is the across-tree aggregate of
// V_U^(t) / V^(t) for keys[i].
struct EffectDecomposition {
    std::shared_ptr<const ConfigSpace> space;
    int max_order = 0;
    FractionMode mode = FractionMode::ratio;
    std::vector<SubsetKey> keys;          // canonical order
    std::vector<TreeVariances> per_tree;  // ascending tree index
    std::vector<double> fractions;        // in [0, 1], aligned with keys
    int zero_variance_trees = 0;

    int key_index(const SubsetKey& key) const;  // -1 if absent
    double fraction(const SubsetKey& key) const;
};

/// Decomposes every tree of the forest and aggregates fractions across trees.
/// ratio mode: mean over trees of V_U/V (zero-variance trees contribute 0);
/// pooled mode: mean V_U over trees divided by mean V.
EffectDecomposition decompose(const Forest& forest, int max_order,
                              FractionMode mode = FractionMode::ratio);

// --- summary tables (percent of total variance) ---

struct SummaryRow {
    double individual = 0.0;
    double pairwise = 0.0;
    double triple = 0.0;
    double total = 0.0;
};

/// Cumulative percent of variance explained by order 1, 2, 3 effects.
SummaryRow cumulative_summary(const EffectDecomposition& d);

struct PairRow {
    int module1 = 0;
    int module2 = 0;
    double pairwise = 0.0;
    double individual1 = 0.0;
    double individual2 = 0.0;
    double pair_total = 0.0;  // V_1 + V_2 + V_{1,2}
};

/// One row per module pair, sorted descending by the pairwise column.
std::vector<PairRow> pair_table(const EffectDecomposition& d);

struct TripletRow {
    int module1 = 0;
    int module2 = 0;
    int module3 = 0;
    double triplet = 0.0;
    double triplet_total = 0.0;  // all individual + pairwise terms + the triple term
};

/// Triplets ranked descending by triplet_total; top k (k <= 0 or k > C(n,3): all).
std::vector<TripletRow> triplet_table(const EffectDecomposition& d, int k = 0);

}  // namespace fanova

#endif
