#include "core/oracle.hpp"

#include <algorithm>
#include <string>

#include "core/errors.hpp"

namespace fanova {

namespace {

std::string variant_label(const ConfigSpace& space, const Variant& v) {
    std::string out;
    for (int j = 0; j < space.module_count(); ++j) {
        if (j > 0) out += ";";
        out += space.module(j).options[v[static_cast<std::size_t>(j)]];
    }
    return out;
}

struct TableStats {
    double mean = 0.0;
    double variance = 0.0;
};

TableStats table_stats(const FactorialTable& table) {
    // two-pass for a shift-robust variance
    double sum = 0.0;
    for (const double y : table.response) sum += y;
    const double mean = sum / static_cast<double>(table.response.size());
    double ss = 0.0;
    for (const double y : table.response) ss += (y - mean) * (y - mean);
    return {mean, ss / static_cast<double>(table.response.size())};
}

}  // namespace

FactorialTable to_factorial(const Dataset& data) {
    const ConfigSpace& space = data.space();
    if (space.cardinality() > kMaxExactVariants)
        throw usage_error("exact engine: space has " + std::to_string(space.cardinality()) +
                          " variants, beyond the exhaustive limit of " +
                          std::to_string(kMaxExactVariants));
    // Dataset rows are sorted by rank and duplicate-free, so coverage is the
    // only thing left to check.
    if (static_cast<std::int64_t>(data.row_count()) != space.cardinality()) {
        std::string missing;
        int listed = 0;
        std::size_t row = 0;
        for (std::int64_t rank = 0; rank < space.cardinality(); ++rank) {
            if (row < data.row_count() && space.rank(data.variant(row)) == rank) {
                ++row;
                continue;
            }
            if (listed == 8) {
                missing += ", ...";
                break;
            }
            if (listed > 0) missing += ", ";
            missing += variant_label(space, space.variant_at(rank));
            ++listed;
        }
        throw data_error("factorial table: dataset covers " + std::to_string(data.row_count()) +
                         " of " + std::to_string(space.cardinality()) +
                         " variants; missing: " + missing);
    }

    FactorialTable table{data.space_ptr(), {}};
    table.response.assign(static_cast<std::size_t>(space.cardinality()), 0.0);
    for (std::size_t row = 0; row < data.row_count(); ++row)
        table.response[static_cast<std::size_t>(space.rank(data.variant(row)))] = data.response(row);
    return table;
}

FunctionEffects table_effects(const FactorialTable& table, int max_order) {
    const ConfigSpace& space = *table.space;
    if (space.cardinality() > kMaxExactVariants)
        throw usage_error("exact engine: space beyond the exhaustive limit");
    if (table.response.size() != static_cast<std::size_t>(space.cardinality()))
        throw internal_error("factorial table size mismatch");

    // per-variant digits, precomputed once for all subset scans
    const std::size_t cardinality = table.response.size();
    const int n = space.module_count();
    std::vector<std::vector<std::uint8_t>> digits(static_cast<std::size_t>(n));
    for (auto& d : digits) d.resize(cardinality);
    {
        Variant v(static_cast<std::size_t>(n), 0);
        for (std::size_t rank = 0; rank < cardinality; ++rank) {
            for (int j = 0; j < n; ++j) digits[static_cast<std::size_t>(j)][rank] = v[static_cast<std::size_t>(j)];
            for (int j = n - 1; j >= 0; --j) {
                auto& digit = v[static_cast<std::size_t>(j)];
                if (++digit < space.option_count(j)) break;
                digit = 0;
            }
        }
    }

    const TableStats stats = table_stats(table);
    const auto marginal = [&](const SubsetKey& key) {
        std::vector<double> sums(subset_table_size(space, key), 0.0);
        for (std::size_t rank = 0; rank < cardinality; ++rank) {
            std::size_t cell = 0;
            for (const int m : key.modules)
                cell = cell * static_cast<std::size_t>(space.option_count(m)) +
                       digits[static_cast<std::size_t>(m)][rank];
            sums[cell] += table.response[rank];
        }
        const double completions = static_cast<double>(cardinality) / static_cast<double>(sums.size());
        for (double& s : sums) s /= completions;
        return sums;
    };

    return FunctionEffects(space, max_order, stats.mean, stats.variance, marginal);
}

EffectDecomposition exact_decompose(const FactorialTable& table, int max_order) {
    const FunctionEffects effects = table_effects(table, max_order);

    EffectDecomposition d;
    d.space = table.space;
    d.max_order = max_order;
    d.mode = FractionMode::ratio;
    d.keys = effects.keys();
    TreeVariances tv;
    tv.total_variance = effects.total_variance();
    tv.subset_variances = effects.subset_variances();
    d.per_tree.push_back(std::move(tv));

    d.fractions.assign(d.keys.size(), 0.0);
    if (effects.total_variance() > 0.0) {
        for (std::size_t i = 0; i < d.keys.size(); ++i)
            d.fractions[i] = effects.subset_variances()[i] / effects.total_variance();
    } else {
        d.zero_variance_trees = 1;
    }
    return d;
}

}  // namespace fanova
