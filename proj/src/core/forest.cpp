#include "core/forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>

#include "core/errors.hpp"

namespace fanova {

namespace {

// Running (count, mean, M2) statistics; merging two sides keeps the SSE
// shift-robust, so adding a constant to every response leaves split
// decisions and gains unchanged up to rounding.
struct MomentStats {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;

    void push(double value, double weight = 1.0) {
        count += weight;
        const double delta = value - mean;
        mean += delta * weight / count;
        m2 += weight * delta * (value - mean);
    }

    void merge(const MomentStats& other) {
        if (other.count == 0.0) return;
        if (count == 0.0) {
            *this = other;
            return;
        }
        const double delta = other.mean - mean;
        const double total = count + other.count;
        mean += delta * other.count / total;
        m2 += other.m2 + delta * delta * count * other.count / total;
        count = total;
    }
};

// Sorted-index-list comparison of option masks; drives the left-set tie rule.
bool mask_lex_less(std::uint64_t a, std::uint64_t b) {
    while (a != 0 && b != 0) {
        const int bit_a = std::countr_zero(a);
        const int bit_b = std::countr_zero(b);
        if (bit_a != bit_b) return bit_a < bit_b;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

struct TreeBuilder {
    const Dataset& data;
    const FitParams& params;
    RngStream& rng;
    int features;
    Tree tree;

    // Draws `features` distinct module indices (partial Fisher-Yates).
    std::vector<int> draw_candidates() {
        const int n = data.space().module_count();
        std::vector<int> pool(static_cast<std::size_t>(n));
        std::iota(pool.begin(), pool.end(), 0);
        const int take = std::min(features, n);
        for (int i = 0; i < take; ++i) {
            const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
        }
        pool.resize(static_cast<std::size_t>(take));
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    int grow(std::vector<std::size_t> rows, std::vector<std::uint64_t> masks, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();

        bool make_leaf = rows.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf);
        if (!make_leaf && params.max_depth > 0 && depth >= params.max_depth) make_leaf = true;
        if (!make_leaf) {
            const double first = data.response(rows.front());
            make_leaf = std::all_of(rows.begin(), rows.end(),
                                    [&](std::size_t r) { return data.response(r) == first; });
        }

        std::optional<SplitChoice> split;
        if (!make_leaf) {
            const std::vector<int> candidates = draw_candidates();
            split = best_split(data, rows, candidates, params.min_samples_leaf);
        }

        if (!split) {
            TreeNode& leaf = tree.nodes[static_cast<std::size_t>(node_index)];
            double sum = 0.0;
            for (const std::size_t r : rows) sum += data.response(r);
            leaf.value = sum / static_cast<double>(rows.size());
            leaf.partition = std::move(masks);
            tree.leaves.push_back(node_index);
            return node_index;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (const std::size_t r : rows) {
            const std::uint64_t bit = 1ULL << data.variant(r)[static_cast<std::size_t>(split->module)];
            (bit & split->left_set ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        std::vector<std::uint64_t> left_masks = masks;
        std::vector<std::uint64_t> right_masks = std::move(masks);
        left_masks[static_cast<std::size_t>(split->module)] &= split->left_set;
        right_masks[static_cast<std::size_t>(split->module)] &= ~split->left_set;

        const int left = grow(std::move(left_rows), std::move(left_masks), depth + 1);
        const int right = grow(std::move(right_rows), std::move(right_masks), depth + 1);

        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
        node.module = split->module;
        node.left_set = split->left_set;
        node.left = left;
        node.right = right;
        return node_index;
    }
};

}  // namespace

int FitParams::resolved_features(int module_count) const {
    if (features_per_split == kAllFeatures) return module_count;
    if (features_per_split == 0) return (module_count + 1) / 2;
    return features_per_split;
}

void FitParams::validate(int module_count) const {
    if (n_trees <= 0) throw usage_error("fit: n_trees must be positive");
    if (min_samples_leaf <= 0) throw usage_error("fit: min_samples_leaf must be positive");
    if (max_depth < 0) throw usage_error("fit: max_depth must be non-negative");
    if (features_per_split < kAllFeatures)
        throw usage_error("fit: features_per_split must be -1 (all), 0 (default) or positive");
    const int resolved = resolved_features(module_count);
    if (resolved < 1 || resolved > module_count)
        throw usage_error("fit: features_per_split exceeds the module count");
}

double Tree::predict(const Variant& v) const {
    int index = 0;
    for (;;) {
        const TreeNode& node = nodes[static_cast<std::size_t>(index)];
        if (node.module < 0) return node.value;
        const std::uint64_t bit = 1ULL << v[static_cast<std::size_t>(node.module)];
        index = (bit & node.left_set) ? node.left : node.right;
    }
}

double Forest::predict(const Variant& v) const {
    space->require(v);
    double sum = 0.0;
    for (const Tree& t : trees) sum += t.predict(v);
    return sum / static_cast<double>(trees.size());
}

std::optional<SplitChoice> best_split(const Dataset& data,
                                      std::span<const std::size_t> rows,
                                      std::span<const int> candidate_modules,
                                      int min_samples_leaf) {
    if (rows.size() < 2) return std::nullopt;

    MomentStats parent;
    for (const std::size_t r : rows) parent.push(data.response(r));

    std::optional<SplitChoice> best;
    for (const int m : candidate_modules) {
        // per-option stats for the options present in the node rows
        const int k = data.space().option_count(m);
        std::vector<MomentStats> per_option(static_cast<std::size_t>(k));
        std::uint64_t present = 0;
        for (const std::size_t r : rows) {
            const std::uint8_t option = data.variant(r)[static_cast<std::size_t>(m)];
            per_option[option].push(data.response(r));
            present |= 1ULL << option;
        }
        const int n_present = std::popcount(present);
        if (n_present < 2) continue;

        std::vector<int> present_options;
        present_options.reserve(static_cast<std::size_t>(n_present));
        for (int o = 0; o < k; ++o)
            if (present & (1ULL << o)) present_options.push_back(o);

        // Enumerate the 2^(m-1)-1 binary partitions; the left side always
        // contains the lowest present option, which fixes the canonical form.
        const std::uint64_t inner_count = 1ULL << (n_present - 1);
        for (std::uint64_t pattern = 0; pattern + 1 < inner_count; ++pattern) {
            std::uint64_t left_set = 1ULL << present_options[0];
            MomentStats left, right;
            left.merge(per_option[static_cast<std::size_t>(present_options[0])]);
            for (int i = 1; i < n_present; ++i) {
                const int option = present_options[static_cast<std::size_t>(i)];
                if (pattern & (1ULL << (i - 1))) {
                    left_set |= 1ULL << option;
                    left.merge(per_option[static_cast<std::size_t>(option)]);
                } else {
                    right.merge(per_option[static_cast<std::size_t>(option)]);
                }
            }
            if (left.count < min_samples_leaf || right.count < min_samples_leaf) continue;
            const double sse = left.m2 + right.m2;
            const bool better =
                !best || sse < best->children_sse ||
                (sse == best->children_sse &&
                 (m < best->module || (m == best->module && mask_lex_less(left_set, best->left_set))));
            if (better) best = SplitChoice{m, left_set, sse};
        }
    }

    if (!best || !(best->children_sse < parent.m2)) return std::nullopt;
    return best;
}

Tree fit_tree(const Dataset& data, std::span<const std::size_t> sample,
              const FitParams& params, RngStream& rng) {
    if (sample.empty()) throw internal_error("fit_tree: empty sample");
    TreeBuilder builder{data, params, rng, params.resolved_features(data.space().module_count()), Tree{}};
    std::vector<std::uint64_t> root_masks;
    root_masks.reserve(static_cast<std::size_t>(data.space().module_count()));
    for (int j = 0; j < data.space().module_count(); ++j) {
        const int k = data.space().option_count(j);
        root_masks.push_back(k == 64 ? ~0ULL : (1ULL << k) - 1);
    }
    builder.grow(std::vector<std::size_t>(sample.begin(), sample.end()), std::move(root_masks), 0);
    return std::move(builder.tree);
}

Forest fit_forest(const Dataset& data, FitParams params) {
    params.validate(data.space().module_count());
    params.features_per_split = params.resolved_features(data.space().module_count());

    Forest forest{data.space_ptr(), params, {}};
    forest.trees.reserve(static_cast<std::size_t>(params.n_trees));
    const std::size_t n_rows = data.row_count();
    for (int t = 0; t < params.n_trees; ++t) {
        RngStream stream = RngStream::derive(params.seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> sample;
        sample.reserve(n_rows);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n_rows; ++i)
                sample.push_back(static_cast<std::size_t>(stream.next_below(n_rows)));
            std::sort(sample.begin(), sample.end());
        } else {
            sample.resize(n_rows);
            std::iota(sample.begin(), sample.end(), std::size_t{0});
        }
        forest.trees.push_back(fit_tree(data, sample, params, stream));
    }
    return forest;
}

nlohmann::json forest_to_json(const Forest& forest) {
    nlohmann::json doc;
    doc["format"] = "fanova-forest/1";
    nlohmann::json space = nlohmann::json::array();
    for (const auto& m : forest.space->modules()) space.push_back({{"name", m.name}, {"options", m.options}});
    doc["space"] = std::move(space);
    doc["params"] = {{"n_trees", forest.params.n_trees},
                     {"bootstrap", forest.params.bootstrap},
                     {"features_per_split", forest.params.features_per_split},
                     {"min_samples_leaf", forest.params.min_samples_leaf},
                     {"max_depth", forest.params.max_depth},
                     {"seed", forest.params.seed}};
    nlohmann::json trees = nlohmann::json::array();
    for (const Tree& tree : forest.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const TreeNode& node : tree.nodes) {
            if (node.module < 0) {
                nlohmann::json partition = nlohmann::json::array();
                for (std::size_t j = 0; j < node.partition.size(); ++j) {
                    nlohmann::json options = nlohmann::json::array();
                    for (int o = 0; o < 64; ++o)
                        if (node.partition[j] & (1ULL << o)) options.push_back(o);
                    partition.push_back(std::move(options));
                }
                nodes.push_back({{"value", node.value}, {"partition", std::move(partition)}});
            } else {
                nlohmann::json left_options = nlohmann::json::array();
                for (int o = 0; o < 64; ++o)
                    if (node.left_set & (1ULL << o)) left_options.push_back(o);
                nodes.push_back({{"module", node.module},
                                 {"left_options", std::move(left_options)},
                                 {"left", node.left},
                                 {"right", node.right}});
            }
        }
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc;
}

Forest forest_from_json(std::shared_ptr<const ConfigSpace> space, const nlohmann::json& doc) {
    try {
        if (doc.at("format") != "fanova-forest/1") throw data_error("forest JSON: unknown format tag");
        const auto& stored = doc.at("space");
        if (stored.size() != static_cast<std::size_t>(space->module_count()))
            throw data_error("forest JSON: module count does not match the config space");
        for (int j = 0; j < space->module_count(); ++j) {
            const auto& entry = stored.at(static_cast<std::size_t>(j));
            if (entry.at("name") != space->module(j).name ||
                entry.at("options") != space->module(j).options)
                throw data_error("forest JSON: stored space does not match the config space");
        }

        Forest forest{std::move(space), {}, {}};
        const auto& params = doc.at("params");
        forest.params.n_trees = params.at("n_trees").get<int>();
        forest.params.bootstrap = params.at("bootstrap").get<bool>();
        forest.params.features_per_split = params.at("features_per_split").get<int>();
        forest.params.min_samples_leaf = params.at("min_samples_leaf").get<int>();
        forest.params.max_depth = params.at("max_depth").get<int>();
        forest.params.seed = params.at("seed").get<std::uint64_t>();

        for (const auto& tree_doc : doc.at("trees")) {
            Tree tree;
            int index = 0;
            const int node_count = static_cast<int>(tree_doc.at("nodes").size());
            for (const auto& node_doc : tree_doc.at("nodes")) {
                TreeNode node;
                if (node_doc.contains("value")) {
                    node.value = node_doc.at("value").get<double>();
                    for (const auto& options : node_doc.at("partition")) {
                        std::uint64_t mask = 0;
                        for (const auto& o : options) {
                            const int option = o.get<int>();
                            if (option < 0 || option >= 64)
                                throw data_error("forest JSON: option index out of range");
                            mask |= 1ULL << option;
                        }
                        if (mask == 0) throw data_error("forest JSON: empty leaf partition entry");
                        node.partition.push_back(mask);
                    }
                    if (node.partition.size() != static_cast<std::size_t>(forest.space->module_count()))
                        throw data_error("forest JSON: leaf partition has wrong module count");
                    tree.leaves.push_back(index);
                } else {
                    node.module = node_doc.at("module").get<int>();
                    if (node.module < 0 || node.module >= forest.space->module_count())
                        throw data_error("forest JSON: split module out of range");
                    for (const auto& o : node_doc.at("left_options")) {
                        const int option = o.get<int>();
                        if (option < 0 || option >= 64)
                            throw data_error("forest JSON: option index out of range");
                        node.left_set |= 1ULL << option;
                    }
                    node.left = node_doc.at("left").get<int>();
                    node.right = node_doc.at("right").get<int>();
                    // children come after their parent, which rules out cycles
                    if (node.left <= index || node.left >= node_count || node.right <= index ||
                        node.right >= node_count)
                        throw data_error("forest JSON: split children out of order");
                }
                tree.nodes.push_back(std::move(node));
                ++index;
            }
            if (tree.nodes.empty()) throw data_error("forest JSON: empty tree");
            forest.trees.push_back(std::move(tree));
        }
        if (forest.trees.empty()) throw data_error("forest JSON: no trees");
        if (static_cast<int>(forest.trees.size()) != forest.params.n_trees)
            throw data_error("forest JSON: tree count does not match params");
        return forest;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("forest JSON: ") + e.what());
    }
}

void save_forest(const Forest& forest, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write forest file '" + path + "'");
    out << forest_to_json(forest).dump(1) << '\n';
}

Forest load_forest(std::shared_ptr<const ConfigSpace> space, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open forest file '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("forest JSON: malformed document: ") + e.what());
    }
    return forest_from_json(std::move(space), doc);
}

}  // namespace fanova
