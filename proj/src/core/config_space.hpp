#ifndef FANOVA_CONFIG_SPACE_HPP
#define FANOVA_CONFIG_SPACE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fanova {

/// One complete assignment of options to all modules, as option indices.
using Variant = std::vector<std::uint8_t>;

struct ModuleSpec {
    std::string name;
    std::vector<std::string> options;  // ordered, unique, 1..64 entries
};

// The categorical configuration space of a modular framework: an ordered
// list of modules, each with a finite option list. Immutable after
// construction and safe to share across threads. Option sets are kept small
// (<= 64 per module) so subsets can be represented as uint64_t bitmasks.
class ConfigSpace {
  public:
    ConfigSpace(std::string name, std::vector<ModuleSpec> modules);

    /// Parses the config-space JSON document: [{"name": ..., "options": [...]}, ...].
    static ConfigSpace parse(const std::string& json_text, std::string name = "space");

    /// Loads a JSON file; the space name defaults to the file stem.
    static ConfigSpace load(const std::string& path);

    const std::string& name() const { return name_; }
    int module_count() const { return static_cast<int>(modules_.size()); }
    const ModuleSpec& module(int index) const { return modules_[static_cast<std::size_t>(index)]; }
    const std::vector<ModuleSpec>& modules() const { return modules_; }
    int option_count(int module) const { return static_cast<int>(modules_[static_cast<std::size_t>(module)].options.size()); }
    std::int64_t cardinality() const { return cardinality_; }

    /// Index of the named module, or -1.
    int find_module(std::string_view name) const;
    /// Index of the labeled option within a module, or -1.
    int find_option(int module, std::string_view label) const;

    /// Resolves a module-name -> option-label mapping into a Variant.
    /// Every module must appear exactly once.
    Variant encode(const std::map<std::string, std::string>& labels) const;

    /// All variants in lexicographic index order (first module most significant).
    std::vector<Variant> enumerate() const;

    /// Lexicographic rank of a variant in [0, cardinality).
    std::int64_t rank(const Variant& v) const;
    /// Inverse of rank.
    Variant variant_at(std::int64_t rank) const;

    bool contains(const Variant& v) const;
    /// Throws data_error if the variant does not belong to the space.
    void require(const Variant& v) const;

  private:
    std::string name_;
    std::vector<ModuleSpec> modules_;
    std::int64_t cardinality_ = 1;
};

}  // namespace fanova

#endif
