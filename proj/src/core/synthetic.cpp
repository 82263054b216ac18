#include "core/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fanova {

namespace {

// Average of the table over the modules of `key` that are not in `keep`.
std::vector<double> average_out(const ConfigSpace& space, const SubsetKey& key,
                                const std::vector<double>& values, const SubsetKey& keep) {
    std::vector<double> out(subset_table_size(space, keep), 0.0);
    for (std::size_t cell = 0; cell < values.size(); ++cell) {
        const std::vector<std::uint8_t> theta = subset_setting(space, key, cell);
        out[project_index(space, key, keep, theta)] += values[cell];
    }
    const double completions = static_cast<double>(values.size()) / static_cast<double>(out.size());
    for (double& v : out) v /= completions;
    return out;
}

}  // namespace

std::vector<double> center_component(const ConfigSpace& space, const SubsetKey& key,
                                     std::vector<double> values) {
    if (values.size() != subset_table_size(space, key))
        throw data_error("truth component over '" + subset_label(space, key) +
                         "' has wrong table size");
    const int order = key.order();
    std::vector<double> centered(values.size());

    // inclusion-exclusion over sub-subsets W: sum of (-1)^(|U|-|W|) * avg over U\W
    for (std::size_t cell = 0; cell < values.size(); ++cell) centered[cell] = values[cell];
    for (std::uint32_t bits = 0; bits + 1 < (1u << order); ++bits) {
        SubsetKey sub;
        for (int i = 0; i < order; ++i)
            if (bits & (1u << i)) sub.modules.push_back(key.modules[static_cast<std::size_t>(i)]);
        const std::vector<double> averaged = average_out(space, key, values, sub);
        const int sign = ((order - sub.order()) % 2 == 0) ? 1 : -1;
        for (std::size_t cell = 0; cell < values.size(); ++cell) {
            const std::vector<std::uint8_t> theta = subset_setting(space, key, cell);
            centered[cell] += sign * averaged[project_index(space, key, sub, theta)];
        }
    }
    return centered;
}

SyntheticResult generate_synthetic(std::shared_ptr<const ConfigSpace> space,
                                   std::vector<TruthComponent> components,
                                   double noise_sd,
                                   std::uint64_t seed) {
    if (noise_sd < 0.0) throw usage_error("synthetic: noise_sd must be non-negative");

    // merge duplicate subsets, then center
    std::map<std::vector<int>, std::vector<double>> merged;
    for (TruthComponent& c : components) {
        if (c.key.modules.empty()) throw data_error("truth component with empty module set");
        if (!std::is_sorted(c.key.modules.begin(), c.key.modules.end()) ||
            std::adjacent_find(c.key.modules.begin(), c.key.modules.end()) != c.key.modules.end())
            throw data_error("truth component modules must be strictly ascending");
        for (const int m : c.key.modules)
            if (m < 0 || m >= space->module_count())
                throw data_error("truth component references a module out of range");
        if (c.values.size() != subset_table_size(*space, c.key))
            throw data_error("truth component over '" + subset_label(*space, c.key) +
                             "' has wrong table size");
        const auto it = merged.find(c.key.modules);
        if (it == merged.end()) {
            merged.emplace(c.key.modules, std::move(c.values));
        } else {
            for (std::size_t i = 0; i < it->second.size(); ++i) it->second[i] += c.values[i];
        }
    }

    GroundTruth truth;
    truth.noise_sd = noise_sd;
    std::vector<std::pair<SubsetKey, std::vector<double>>> centered;
    for (auto& [modules, values] : merged) {
        SubsetKey key{modules};
        std::vector<double> table = center_component(*space, key, std::move(values));
        double variance = 0.0;
        for (const double v : table) variance += v * v;
        variance /= static_cast<double>(table.size());
        truth.keys.push_back(key);
        truth.variances.push_back(variance);
        truth.total_variance += variance;
        centered.emplace_back(std::move(key), std::move(table));
    }
    std::sort(centered.begin(), centered.end(),
              [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
    {
        std::vector<std::size_t> order(truth.keys.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return canonical_less(truth.keys[a], truth.keys[b]);
        });
        GroundTruth sorted;
        sorted.noise_sd = truth.noise_sd;
        sorted.total_variance = truth.total_variance;
        for (const std::size_t i : order) {
            sorted.keys.push_back(truth.keys[i]);
            sorted.variances.push_back(truth.variances[i]);
        }
        truth = std::move(sorted);
    }

    RngStream noise = RngStream::derive(seed, 0);
    std::vector<Variant> variants = space->enumerate();
    std::vector<double> responses;
    responses.reserve(variants.size());
    for (const Variant& v : variants) {
        double y = 0.0;
        for (const auto& [key, table] : centered) {
            std::size_t cell = 0;
            for (const int m : key.modules)
                cell = cell * static_cast<std::size_t>(space->option_count(m)) +
                       v[static_cast<std::size_t>(m)];
            y += table[cell];
        }
        if (noise_sd > 0.0) y += noise_sd * noise.next_gaussian();
        responses.push_back(y);
    }

    Dataset dataset(space, std::move(variants), std::move(responses), Scenario::synthetic);
    return SyntheticResult{std::move(dataset), std::move(truth)};
}

namespace {

void flatten_values(const ConfigSpace& space, const SubsetKey& key, const nlohmann::json& node,
                    std::size_t depth, std::vector<double>& out) {
    const std::size_t order = key.modules.size();
    if (depth == order) {
        if (!node.is_number())
            throw data_error("truth spec: values nested deeper than the module count");
        out.push_back(node.get<double>());
        return;
    }
    const std::size_t expected = static_cast<std::size_t>(space.option_count(key.modules[depth]));
    if (!node.is_array() || node.size() != expected)
        throw data_error("truth spec: values for '" + subset_label(space, key) + "' must nest " +
                         std::to_string(expected) + " entries for module '" +
                         space.module(key.modules[depth]).name + "'");
    for (const auto& child : node) flatten_values(space, key, child, depth + 1, out);
}

}  // namespace

std::vector<TruthComponent> parse_truth(const ConfigSpace& space, const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("truth spec: malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("components") || !doc["components"].is_array())
        throw data_error("truth spec: expected {\"components\": [...]}");

    std::vector<TruthComponent> out;
    for (const auto& entry : doc["components"]) {
        if (!entry.is_object() || !entry.contains("modules") || !entry.contains("values"))
            throw data_error("truth spec: each component needs 'modules' and 'values'");
        TruthComponent component;
        for (const auto& name : entry["modules"]) {
            if (!name.is_string()) throw data_error("truth spec: module names must be strings");
            const int mi = space.find_module(name.get<std::string>());
            if (mi < 0) throw data_error("truth spec: unknown module '" + name.get<std::string>() + "'");
            component.key.modules.push_back(mi);
        }
        if (component.key.modules.empty()) throw data_error("truth spec: component with no modules");
        if (!std::is_sorted(component.key.modules.begin(), component.key.modules.end()) ||
            std::adjacent_find(component.key.modules.begin(), component.key.modules.end()) !=
                component.key.modules.end())
            throw data_error("truth spec: modules must be listed in space order without repeats");
        flatten_values(space, component.key, entry["values"], 0, component.values);
        out.push_back(std::move(component));
    }
    return out;
}

std::vector<TruthComponent> load_truth(const ConfigSpace& space, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open truth spec '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_truth(space, text.str());
}

std::string truth_to_json(const ConfigSpace& space, const GroundTruth& truth) {
    nlohmann::json components = nlohmann::json::array();
    for (std::size_t i = 0; i < truth.keys.size(); ++i) {
        nlohmann::json modules = nlohmann::json::array();
        for (const int m : truth.keys[i].modules) modules.push_back(space.module(m).name);
        components.push_back({{"modules", std::move(modules)},
                              {"variance", truth.variances[i]},
                              {"fraction", truth.fraction(i)}});
    }
    nlohmann::json doc{{"noise_sd", truth.noise_sd},
                       {"total_variance", truth.total_variance},
                       {"components", std::move(components)}};
    return doc.dump(1) + "\n";
}

}  // namespace fanova
