#include "core/subsets.hpp"

#include <algorithm>

#include "core/errors.hpp"

namespace fanova {

bool canonical_less(const SubsetKey& a, const SubsetKey& b) {
    if (a.modules.size() != b.modules.size()) return a.modules.size() < b.modules.size();
    return a.modules < b.modules;
}

std::vector<SubsetKey> canonical_subsets(int module_count, int max_order) {
    std::vector<SubsetKey> keys;
    for (int size = 1; size <= max_order && size <= module_count; ++size) {
        std::vector<int> combo(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) combo[static_cast<std::size_t>(i)] = i;
        for (;;) {
            keys.push_back(SubsetKey{combo});
            // next combination in lexicographic order
            int i = size - 1;
            while (i >= 0 && combo[static_cast<std::size_t>(i)] == module_count - size + i) --i;
            if (i < 0) break;
            ++combo[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < size; ++j)
                combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    return keys;
}

std::string subset_label(const ConfigSpace& space, const SubsetKey& key) {
    std::string out;
    for (std::size_t i = 0; i < key.modules.size(); ++i) {
        if (i > 0) out += ";";
        out += space.module(key.modules[i]).name;
    }
    return out;
}

std::size_t subset_table_size(const ConfigSpace& space, const SubsetKey& key) {
    std::size_t size = 1;
    for (const int m : key.modules) size *= static_cast<std::size_t>(space.option_count(m));
    return size;
}

std::size_t subset_index(const ConfigSpace& space, const SubsetKey& key,
                         std::span<const std::uint8_t> theta) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < key.modules.size(); ++i)
        index = index * static_cast<std::size_t>(space.option_count(key.modules[i])) + theta[i];
    return index;
}

std::vector<std::uint8_t> subset_setting(const ConfigSpace& space, const SubsetKey& key,
                                         std::size_t index) {
    std::vector<std::uint8_t> theta(key.modules.size());
    for (std::size_t i = key.modules.size(); i-- > 0;) {
        const std::size_t k = static_cast<std::size_t>(space.option_count(key.modules[i]));
        theta[i] = static_cast<std::uint8_t>(index % k);
        index /= k;
    }
    return theta;
}

std::size_t project_index(const ConfigSpace& space, const SubsetKey& outer,
                          const SubsetKey& inner, std::span<const std::uint8_t> theta_outer) {
    std::size_t index = 0;
    std::size_t oi = 0;
    for (const int m : inner.modules) {
        while (oi < outer.modules.size() && outer.modules[oi] != m) ++oi;
        if (oi == outer.modules.size()) throw internal_error("project_index: inner key not nested in outer");
        index = index * static_cast<std::size_t>(space.option_count(m)) + theta_outer[oi];
    }
    return index;
}

}  // namespace fanova
