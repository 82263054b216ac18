#include "core/effects.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "core/errors.hpp"

namespace fanova {

namespace {

// Lookup is insensitive to the listing order inside the queried subset.
int find_key(const std::vector<SubsetKey>& keys, SubsetKey key) {
    std::sort(key.modules.begin(), key.modules.end());
    const auto it = std::lower_bound(keys.begin(), keys.end(), key, canonical_less);
    if (it == keys.end() || !(*it == key)) return -1;
    return static_cast<int>(it - keys.begin());
}

double uniform_cell_weight(const ConfigSpace& space, const SubsetKey& key) {
    double w = 1.0;
    for (const int m : key.modules) w /= static_cast<double>(space.option_count(m));
    return w;
}

}  // namespace

FunctionEffects::FunctionEffects(const ConfigSpace& space, int max_order, double mean,
                                 double total_variance, const MarginalTableFn& marginal)
    : space_(space), mean_(mean), total_variance_(total_variance) {
    if (max_order < 1 || max_order > space.module_count())
        throw usage_error("decompose: max_order must be in [1, module count]");
    keys_ = canonical_subsets(space.module_count(), max_order);
    components_.reserve(keys_.size());
    variances_.reserve(keys_.size());

    // recursion over the subset lattice: keys arrive in size-ascending
    // order, so every proper subset's component is already available
    for (std::size_t ki = 0; ki < keys_.size(); ++ki) {
        const SubsetKey& key = keys_[ki];
        std::vector<double> table = marginal(key);
        if (table.size() != subset_table_size(space_, key))
            throw internal_error("marginal table has wrong size");

        const int order = key.order();
        for (std::size_t cell = 0; cell < table.size(); ++cell) {
            const std::vector<std::uint8_t> theta = subset_setting(space_, key, cell);
            double correction = mean_;
            // proper non-empty sub-subsets via bit patterns over key modules
            for (std::uint32_t bits = 1; bits + 1 < (1u << order); ++bits) {
                SubsetKey sub;
                for (int i = 0; i < order; ++i)
                    if (bits & (1u << i)) sub.modules.push_back(key.modules[static_cast<std::size_t>(i)]);
                const int si = find_key(keys_, sub);
                if (si < 0) throw internal_error("subset lattice incomplete");
                correction += components_[static_cast<std::size_t>(si)]
                                         [project_index(space_, key, sub, theta)];
            }
            table[cell] -= correction;
        }

        const double cell_weight = uniform_cell_weight(space_, key);
        double variance = 0.0;
        for (const double f : table) variance += f * f;
        variance *= cell_weight;

        components_.push_back(std::move(table));
        variances_.push_back(variance);
    }
}

int FunctionEffects::key_index(const SubsetKey& key) const { return find_key(keys_, key); }

double FunctionEffects::component_value(const SubsetKey& key, std::span<const std::uint8_t> theta) const {
    return component_table(key)[subset_index(space_, key, theta)];
}

const std::vector<double>& FunctionEffects::component_table(const SubsetKey& key) const {
    const int i = key_index(key);
    if (i < 0) throw usage_error("component_table: subset not computed (raise max_order)");
    return components_[static_cast<std::size_t>(i)];
}

double FunctionEffects::subset_variance(const SubsetKey& key) const {
    const int i = key_index(key);
    if (i < 0) throw usage_error("subset_variance: subset not computed (raise max_order)");
    return variances_[static_cast<std::size_t>(i)];
}

double tree_mean(const Tree& tree, const ConfigSpace& space) {
    double mean = 0.0;
    for (const int li : tree.leaves) {
        const TreeNode& leaf = tree.nodes[static_cast<std::size_t>(li)];
        double volume = 1.0;
        for (int j = 0; j < space.module_count(); ++j)
            volume *= static_cast<double>(std::popcount(leaf.partition[static_cast<std::size_t>(j)])) /
                      static_cast<double>(space.option_count(j));
        mean += leaf.value * volume;
    }
    return mean;
}

double tree_total_variance(const Tree& tree, const ConfigSpace& space) {
    double mean = 0.0;
    double second_moment = 0.0;
    for (const int li : tree.leaves) {
        const TreeNode& leaf = tree.nodes[static_cast<std::size_t>(li)];
        double volume = 1.0;
        for (int j = 0; j < space.module_count(); ++j)
            volume *= static_cast<double>(std::popcount(leaf.partition[static_cast<std::size_t>(j)])) /
                      static_cast<double>(space.option_count(j));
        mean += leaf.value * volume;
        second_moment += leaf.value * leaf.value * volume;
    }
    return std::max(0.0, second_moment - mean * mean);
}

std::vector<double> tree_marginal_table(const Tree& tree, const ConfigSpace& space,
                                        const SubsetKey& key) {
    std::vector<double> table(subset_table_size(space, key), 0.0);
    const int order = key.order();

    for (const int li : tree.leaves) {
        const TreeNode& leaf = tree.nodes[static_cast<std::size_t>(li)];
        // weight of the leaf for any consistent fixed setting: the volume of
        // the partition over the modules outside U
        double outside_volume = 1.0;
        {
            std::size_t ui = 0;
            for (int j = 0; j < space.module_count(); ++j) {
                if (ui < key.modules.size() && key.modules[ui] == j) {
                    ++ui;
                    continue;
                }
                outside_volume *= static_cast<double>(std::popcount(leaf.partition[static_cast<std::size_t>(j)])) /
                                  static_cast<double>(space.option_count(j));
            }
        }
        const double contribution = leaf.value * outside_volume;

        // scatter into every setting of U consistent with the leaf partition
        std::vector<std::vector<std::uint8_t>> options(static_cast<std::size_t>(order));
        for (int i = 0; i < order; ++i) {
            const std::uint64_t mask = leaf.partition[static_cast<std::size_t>(key.modules[static_cast<std::size_t>(i)])];
            for (int o = 0; o < 64; ++o)
                if (mask & (1ULL << o)) options[static_cast<std::size_t>(i)].push_back(static_cast<std::uint8_t>(o));
        }
        std::vector<std::size_t> pick(static_cast<std::size_t>(order), 0);
        for (;;) {
            std::size_t cell = 0;
            for (int i = 0; i < order; ++i)
                cell = cell * static_cast<std::size_t>(space.option_count(key.modules[static_cast<std::size_t>(i)])) +
                       options[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
            table[cell] += contribution;
            int i = order - 1;
            while (i >= 0 && ++pick[static_cast<std::size_t>(i)] == options[static_cast<std::size_t>(i)].size()) {
                pick[static_cast<std::size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
        }
    }
    return table;
}

double tree_marginal(const Tree& tree, const ConfigSpace& space, const SubsetKey& key,
                     std::span<const std::uint8_t> theta) {
    for (std::size_t i = 0; i < key.modules.size(); ++i)
        if (theta[i] >= space.option_count(key.modules[i]))
            throw usage_error("tree_marginal: option index out of range");
    return tree_marginal_table(tree, space, key)[subset_index(space, key, theta)];
}

FunctionEffects tree_effects(const Tree& tree, const ConfigSpace& space, int max_order) {
    return FunctionEffects(space, max_order, tree_mean(tree, space), tree_total_variance(tree, space),
                           [&](const SubsetKey& key) { return tree_marginal_table(tree, space, key); });
}

int EffectDecomposition::key_index(const SubsetKey& key) const { return find_key(keys, key); }

double EffectDecomposition::fraction(const SubsetKey& key) const {
    const int i = key_index(key);
    if (i < 0) throw usage_error("fraction: subset not computed (raise max_order)");
    return fractions[static_cast<std::size_t>(i)];
}

EffectDecomposition decompose(const Forest& forest, int max_order, FractionMode mode) {
    const ConfigSpace& space = *forest.space;
    EffectDecomposition d;
    d.space = forest.space;
    d.max_order = max_order;
    d.mode = mode;
    d.keys = canonical_subsets(space.module_count(), max_order);
    d.per_tree.reserve(forest.trees.size());

    for (const Tree& tree : forest.trees) {
        const FunctionEffects effects = tree_effects(tree, space, max_order);
        TreeVariances tv;
        tv.total_variance = effects.total_variance();
        tv.subset_variances = effects.subset_variances();
        if (tv.total_variance <= 0.0) ++d.zero_variance_trees;
        d.per_tree.push_back(std::move(tv));
    }

    const double n_trees = static_cast<double>(forest.trees.size());
    d.fractions.assign(d.keys.size(), 0.0);
    if (mode == FractionMode::ratio) {
        // zero-variance trees contribute fraction 0
        for (const TreeVariances& tv : d.per_tree) {
            if (tv.total_variance <= 0.0) continue;
            for (std::size_t i = 0; i < d.keys.size(); ++i)
                d.fractions[i] += tv.subset_variances[i] / tv.total_variance;
        }
        for (double& f : d.fractions) f /= n_trees;
    } else {
        double pooled_total = 0.0;
        std::vector<double> pooled(d.keys.size(), 0.0);
        for (const TreeVariances& tv : d.per_tree) {
            pooled_total += tv.total_variance;
            for (std::size_t i = 0; i < d.keys.size(); ++i) pooled[i] += tv.subset_variances[i];
        }
        if (pooled_total > 0.0)
            for (std::size_t i = 0; i < d.keys.size(); ++i) d.fractions[i] = pooled[i] / pooled_total;
    }
    return d;
}

SummaryRow cumulative_summary(const EffectDecomposition& d) {
    if (d.max_order < 3 && d.space->module_count() >= 3)
        throw usage_error("cumulative_summary: needs max_order >= 3");
    SummaryRow row;
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
        const double percent = 100.0 * d.fractions[i];
        switch (d.keys[i].order()) {
            case 1: row.individual += percent; break;
            case 2: row.pairwise += percent; break;
            case 3: row.triple += percent; break;
            default: break;
        }
    }
    row.total = row.individual + row.pairwise + row.triple;
    return row;
}

std::vector<PairRow> pair_table(const EffectDecomposition& d) {
    if (d.max_order < 2) throw usage_error("pair_table: needs max_order >= 2");
    std::vector<PairRow> rows;
    const int n = d.space->module_count();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            PairRow row;
            row.module1 = a;
            row.module2 = b;
            row.individual1 = 100.0 * d.fraction(SubsetKey{{a}});
            row.individual2 = 100.0 * d.fraction(SubsetKey{{b}});
            row.pairwise = 100.0 * d.fraction(SubsetKey{{a, b}});
            row.pair_total = row.individual1 + row.individual2 + row.pairwise;
            rows.push_back(row);
        }
    }
    std::sort(rows.begin(), rows.end(), [](const PairRow& x, const PairRow& y) {
        if (x.pairwise != y.pairwise) return x.pairwise > y.pairwise;
        return std::tie(x.module1, x.module2) < std::tie(y.module1, y.module2);
    });
    return rows;
}

std::vector<TripletRow> triplet_table(const EffectDecomposition& d, int k) {
    if (d.max_order < 3) throw usage_error("triplet_table: needs max_order >= 3");
    std::vector<TripletRow> rows;
    const int n = d.space->module_count();
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            for (int c = b + 1; c < n; ++c) {
                TripletRow row;
                row.module1 = a;
                row.module2 = b;
                row.module3 = c;
                row.triplet = 100.0 * d.fraction(SubsetKey{{a, b, c}});
                row.triplet_total = row.triplet +
                                    100.0 * (d.fraction(SubsetKey{{a}}) + d.fraction(SubsetKey{{b}}) +
                                             d.fraction(SubsetKey{{c}}) + d.fraction(SubsetKey{{a, b}}) +
                                             d.fraction(SubsetKey{{a, c}}) + d.fraction(SubsetKey{{b, c}}));
                rows.push_back(row);
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const TripletRow& x, const TripletRow& y) {
        if (x.triplet_total != y.triplet_total) return x.triplet_total > y.triplet_total;
        return std::tie(x.module1, x.module2, x.module3) < std::tie(y.module1, y.module2, y.module3);
    });
    if (k > 0 && k < static_cast<int>(rows.size())) rows.resize(static_cast<std::size_t>(k));
    return rows;
}

}  // namespace fanova
