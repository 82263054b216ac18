#ifndef FANOVA_ORACLE_HPP
#define FANOVA_ORACLE_HPP

#include <memory>
#include <vector>

#include "core/dataset.hpp"
#include "core/effects.hpp"

namespace fanova {

/// Exhaustive designs beyond this are rejected by the exact engine.
inline constexpr std::int64_t kMaxExactVariants = 1'000'000;

// One response per enumerated variant, dense in lexicographic order. This is
// the regime where the empirical function itself can be decomposed exactly,
// with no model in between.
struct FactorialTable {
    std::shared_ptr<const ConfigSpace> space;
    std::vector<double> response;  // indexed by variant rank
};

/// Densifies a dataset that covers the full space. Incomplete coverage is an
/// error listing missing variants; duplicates are rejected by Dataset itself.
FactorialTable to_factorial(const Dataset& data);

/// Exact functional ANOVA of the empirical function. Emitted as a
/// single-"tree" decomposition so every downstream report works unchanged.
EffectDecomposition exact_decompose(const FactorialTable& table, int max_order);

/// Components of the empirical function (exact marginals by enumeration).
FunctionEffects table_effects(const FactorialTable& table, int max_order);

}  // namespace fanova

#endif
