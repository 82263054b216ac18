#ifndef FANOVA_REPORTS_HPP
#define FANOVA_REPORTS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/effects.hpp"
#include "core/similarity.hpp"

namespace fanova {

/// effects CSV: subset,order,fraction_percent (canonical subset order,
/// percentages with 2 decimals).
void write_effects_csv(std::ostream& out, const EffectDecomposition& d);

/// Reads an effects CSV back into a flat vector (fractions in [0,1]).
EffectVector read_effects_csv(std::istream& in, int problem_id);

/// summary CSV: algorithm,dimension,budget,individual,pairwise,triple,total.
void write_summary_csv(std::ostream& out, const std::string& algorithm, int dimension,
                       std::int64_t budget, const SummaryRow& row);

/// pairs CSV: module1,module2,pairwise,individual1,individual2,pair_total.
void write_pairs_csv(std::ostream& out, const EffectDecomposition& d);

/// triplets CSV: module1,module2,module3,triplet,triplet_total (all triplets, ranked).
void write_triplets_csv(std::ostream& out, const EffectDecomposition& d);

/// FNV-1a 64 digest of a file, as 16 hex digits (for run manifests).
std::string file_digest(const std::string& path);

}  // namespace fanova

#endif
