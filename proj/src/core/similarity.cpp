#include "core/similarity.hpp"

#include <cmath>
#include <ostream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fanova {

EffectVector effect_vector(const EffectDecomposition& d, int problem_id) {
    const int wanted_order = std::min(3, d.space->module_count());
    if (d.max_order < wanted_order)
        throw usage_error("effect_vector: decomposition needs max_order >= 3");
    EffectVector v;
    v.problem_id = problem_id;
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
        if (d.keys[i].order() > 3) continue;
        v.subset_labels.push_back(subset_label(*d.space, d.keys[i]));
        v.values.push_back(d.fractions[i]);
    }
    return v;
}

double cosine_similarity(const EffectVector& a, const EffectVector& b, bool* degenerate) {
    if (a.values.size() != b.values.size())
        throw data_error("cosine similarity: vector lengths differ (" +
                         std::to_string(a.values.size()) + " vs " + std::to_string(b.values.size()) + ")");
    if (degenerate) *degenerate = false;
    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        norm_a += a.values[i] * a.values[i];
        norm_b += b.values[i] * b.values[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

SimilarityMatrix similarity_matrix(std::span<const EffectVector> vectors) {
    SimilarityMatrix matrix;
    for (const EffectVector& v : vectors) matrix.problem_ids.push_back(v.problem_id);
    const std::size_t n = vectors.size();
    matrix.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        bool degenerate = false;
        cosine_similarity(vectors[i], vectors[i], &degenerate);
        // exact unit diagonal for non-degenerate vectors
        matrix.values[i * n + i] = degenerate ? 0.0 : 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = cosine_similarity(vectors[i], vectors[j]);
            matrix.values[i * n + j] = s;
            matrix.values[j * n + i] = s;
        }
    }
    return matrix;
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix) {
    std::vector<std::string> header{"problem_id"};
    for (const int id : matrix.problem_ids) header.push_back(std::to_string(id));
    out << csv::join_record(header) << '\n';
    for (std::size_t i = 0; i < matrix.problem_ids.size(); ++i) {
        std::vector<std::string> row{std::to_string(matrix.problem_ids[i])};
        for (std::size_t j = 0; j < matrix.problem_ids.size(); ++j)
            row.push_back(csv::format_double(matrix.at(i, j)));
        out << csv::join_record(row) << '\n';
    }
}

}  // namespace fanova
