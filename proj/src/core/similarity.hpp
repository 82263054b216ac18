#ifndef FANOVA_SIMILARITY_HPP
#define FANOVA_SIMILARITY_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include "core/effects.hpp"

namespace fanova {

/// A problem represented by its fractions for every subset of order <= 3,
/// flattened in canonical subset order (length 41 for six modules, 63 for
/// seven).
struct EffectVector {
    int problem_id = 0;
    std::vector<std::string> subset_labels;
    std::vector<double> values;  // fractions in [0, 1]

    /// True when the flattening came from the same subset layout.
    bool compatible(const EffectVector& other) const { return subset_labels == other.subset_labels; }
};

EffectVector effect_vector(const EffectDecomposition& d, int problem_id);

/// dot(a,b) / (|a| |b|); defined as 0 when either norm is 0 (flagged via
/// *degenerate when given). Lengths must match.
double cosine_similarity(const EffectVector& a, const EffectVector& b, bool* degenerate = nullptr);

struct SimilarityMatrix {
    std::vector<int> problem_ids;
    std::vector<double> values;  // row-major, square

    double at(std::size_t row, std::size_t col) const { return values[row * problem_ids.size() + col]; }
};

SimilarityMatrix similarity_matrix(std::span<const EffectVector> vectors);

/// CSV with problem ids as row/column headers.
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace fanova

#endif
