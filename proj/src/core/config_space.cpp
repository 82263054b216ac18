#include "core/config_space.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "core/errors.hpp"

namespace fanova {

namespace {

constexpr int kMaxOptionsPerModule = 64;  // option subsets are uint64_t bitmasks

}  // namespace

ConfigSpace::ConfigSpace(std::string name, std::vector<ModuleSpec> modules)
    : name_(std::move(name)), modules_(std::move(modules)) {
    if (modules_.empty()) throw data_error("config space has no modules");
    std::set<std::string> seen_modules;
    for (const auto& m : modules_) {
        if (m.name.empty()) throw data_error("config space: empty module name");
        if (!seen_modules.insert(m.name).second)
            throw data_error("config space: duplicate module name '" + m.name + "'");
        if (m.options.empty())
            throw data_error("config space: module '" + m.name + "' has an empty option list");
        if (static_cast<int>(m.options.size()) > kMaxOptionsPerModule)
            throw data_error("config space: module '" + m.name + "' exceeds the engine limit of 64 options");
        std::set<std::string> seen_options;
        for (const auto& o : m.options)
            if (!seen_options.insert(o).second)
                throw data_error("config space: duplicate option '" + o + "' in module '" + m.name + "'");
        cardinality_ *= static_cast<std::int64_t>(m.options.size());
    }
}

ConfigSpace ConfigSpace::parse(const std::string& json_text, std::string name) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("config space: malformed JSON: ") + e.what());
    }
    if (!doc.is_array()) throw data_error("config space: document must be a JSON array");
    std::vector<ModuleSpec> modules;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("options"))
            throw data_error("config space: each entry needs 'name' and 'options'");
        ModuleSpec spec;
        if (!entry["name"].is_string()) throw data_error("config space: 'name' must be a string");
        spec.name = entry["name"].get<std::string>();
        if (!entry["options"].is_array())
            throw data_error("config space: 'options' of module '" + spec.name + "' must be an array");
        for (const auto& opt : entry["options"]) {
            if (!opt.is_string())
                throw data_error("config space: options of module '" + spec.name + "' must be strings");
            spec.options.push_back(opt.get<std::string>());
        }
        modules.push_back(std::move(spec));
    }
    return ConfigSpace(std::move(name), std::move(modules));
}

ConfigSpace ConfigSpace::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open config space file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str(), std::filesystem::path(path).stem().string());
}

int ConfigSpace::find_module(std::string_view name) const {
    for (int i = 0; i < module_count(); ++i)
        if (modules_[static_cast<std::size_t>(i)].name == name) return i;
    return -1;
}

int ConfigSpace::find_option(int module, std::string_view label) const {
    const auto& options = modules_[static_cast<std::size_t>(module)].options;
    for (int i = 0; i < static_cast<int>(options.size()); ++i)
        if (options[static_cast<std::size_t>(i)] == label) return i;
    return -1;
}

Variant ConfigSpace::encode(const std::map<std::string, std::string>& labels) const {
    if (labels.size() != modules_.size()) {
        for (const auto& m : modules_)
            if (!labels.count(m.name))
                throw data_error("encode: missing module '" + m.name + "'");
    }
    Variant v(modules_.size());
    std::size_t used = 0;
    for (const auto& [module_name, option_label] : labels) {
        const int mi = find_module(module_name);
        if (mi < 0) throw data_error("encode: unknown module '" + module_name + "'");
        const int oi = find_option(mi, option_label);
        if (oi < 0)
            throw data_error("encode: unknown option '" + option_label + "' for module '" + module_name + "'");
        v[static_cast<std::size_t>(mi)] = static_cast<std::uint8_t>(oi);
        ++used;
    }
    if (used != modules_.size()) throw data_error("encode: module mapping incomplete");
    return v;
}

std::vector<Variant> ConfigSpace::enumerate() const {
    std::vector<Variant> out;
    out.reserve(static_cast<std::size_t>(cardinality_));
    Variant v(modules_.size(), 0);
    for (std::int64_t i = 0; i < cardinality_; ++i) {
        out.push_back(v);
        // odometer increment, last module fastest
        for (int j = module_count() - 1; j >= 0; --j) {
            auto& digit = v[static_cast<std::size_t>(j)];
            if (++digit < option_count(j)) break;
            digit = 0;
        }
    }
    return out;
}

std::int64_t ConfigSpace::rank(const Variant& v) const {
    require(v);
    std::int64_t r = 0;
    for (int j = 0; j < module_count(); ++j)
        r = r * option_count(j) + v[static_cast<std::size_t>(j)];
    return r;
}

Variant ConfigSpace::variant_at(std::int64_t rank) const {
    if (rank < 0 || rank >= cardinality_) throw internal_error("variant rank out of range");
    Variant v(modules_.size());
    for (int j = module_count() - 1; j >= 0; --j) {
        const std::int64_t k = option_count(j);
        v[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(rank % k);
        rank /= k;
    }
    return v;
}

bool ConfigSpace::contains(const Variant& v) const {
    if (static_cast<int>(v.size()) != module_count()) return false;
    for (int j = 0; j < module_count(); ++j)
        if (v[static_cast<std::size_t>(j)] >= option_count(j)) return false;
    return true;
}

void ConfigSpace::require(const Variant& v) const {
    if (!contains(v)) throw data_error("variant does not belong to config space '" + name_ + "'");
}

}  // namespace fanova
