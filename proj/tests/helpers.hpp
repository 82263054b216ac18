#ifndef FANOVA_TEST_HELPERS_HPP
#define FANOVA_TEST_HELPERS_HPP

#include <memory>
#include <string>
#include <vector>

#include "core/config_space.hpp"
#include "core/dataset.hpp"
#include "core/rng.hpp"

namespace fanova::test {

inline std::shared_ptr<const ConfigSpace> make_space(std::vector<int> option_counts,
                                                     const std::string& name = "toy") {
    std::vector<ModuleSpec> modules;
    for (std::size_t j = 0; j < option_counts.size(); ++j) {
        ModuleSpec m;
        m.name = "m" + std::to_string(j);
        for (int o = 0; o < option_counts[j]; ++o)
            m.options.push_back("o" + std::to_string(o));
        modules.push_back(std::move(m));
    }
    return std::make_shared<const ConfigSpace>(name, std::move(modules));
}

inline std::shared_ptr<const ConfigSpace> load_fixture(const std::string& file) {
    return std::make_shared<const ConfigSpace>(ConfigSpace::load(std::string(FANOVA_DATA_DIR) + "/" + file));
}

/// Full-factorial dataset with responses from a callback on the variant.
template <typename Fn>
Dataset factorial_dataset(std::shared_ptr<const ConfigSpace> space, Fn&& response) {
    std::vector<Variant> variants = space->enumerate();
    std::vector<double> responses;
    responses.reserve(variants.size());
    for (const Variant& v : variants) responses.push_back(response(v));
    return Dataset(std::move(space), std::move(variants), std::move(responses), Scenario::synthetic);
}

/// Full-factorial dataset with iid uniform responses (generic position).
inline Dataset random_dataset(std::shared_ptr<const ConfigSpace> space, std::uint64_t seed) {
    RngStream rng = RngStream::derive(seed, 17);
    return factorial_dataset(std::move(space), [&](const Variant&) { return rng.next_unit(); });
}

}  // namespace fanova::test

#endif
