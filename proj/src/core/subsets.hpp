#ifndef FANOVA_SUBSETS_HPP
#define FANOVA_SUBSETS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/config_space.hpp"

namespace fanova {

/// A subset of module indices, kept strictly ascending.
struct SubsetKey {
    std::vector<int> modules;

    bool operator==(const SubsetKey& other) const = default;
    int order() const { return static_cast<int>(modules.size()); }
};

/// Canonical ordering: size-ascending, lexicographic within one size.
bool canonical_less(const SubsetKey& a, const SubsetKey& b);

/// All non-empty subsets with |U| <= max_order, in canonical order.
std::vector<SubsetKey> canonical_subsets(int module_count, int max_order);

/// Semicolon-joined module names, e.g. "elitist;mirrored_sampling".
std::string subset_label(const ConfigSpace& space, const SubsetKey& key);

// Dense tables over the joint option settings of a subset use mixed-radix
// indexing with the last subset module varying fastest, matching the
// lexicographic variant order.
std::size_t subset_table_size(const ConfigSpace& space, const SubsetKey& key);

std::size_t subset_index(const ConfigSpace& space, const SubsetKey& key,
                         std::span<const std::uint8_t> theta);

/// Inverse of subset_index.
std::vector<std::uint8_t> subset_setting(const ConfigSpace& space, const SubsetKey& key,
                                         std::size_t index);

/// Index of theta restricted to a sub-subset `inner` of `outer`.
std::size_t project_index(const ConfigSpace& space, const SubsetKey& outer,
                          const SubsetKey& inner, std::span<const std::uint8_t> theta_outer);

}  // namespace fanova

#endif
