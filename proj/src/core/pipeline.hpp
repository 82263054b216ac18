#ifndef FANOVA_PIPELINE_HPP
#define FANOVA_PIPELINE_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "core/config_space.hpp"
#include "core/dataset.hpp"

namespace fanova {

/// Raw precisions below this floor are clamped before the log10 transform
/// (BBOB target-precision convention; avoids -inf on solved instances).
inline constexpr double kPrecisionFloor = 1e-8;

/// One run: target precision = best-found f minus the global optimum.
struct RunRecord {
    Variant variant;
    int problem_id = 0;
    int instance_id = 0;
    int run_id = 0;
    int dimension = 0;
    std::int64_t budget = 0;
    double precision = 0.0;  // >= 0
};

/// Per (variant, problem, instance, dimension, budget) solution precision:
/// log10 of the clamped median run precision.
struct PrecisionCell {
    Variant variant;
    int problem_id = 0;
    int instance_id = 0;
    int dimension = 0;
    std::int64_t budget = 0;
    double log_precision = 0.0;
};

/// Median with the midpoint rule for even counts. Does not modify its input.
double median(std::span<const double> values);

/// Parses the run CSV: variant_id,<module columns>,dimension,budget,problem_id,instance_id,run_id,precision.
std::vector<RunRecord> ingest_runs(std::istream& in, const ConfigSpace& space);

/// Step-function lookup: precision at the largest evals <= budget.
double extract_at_budget(std::span<const std::pair<std::int64_t, double>> trajectory,
                         std::int64_t budget,
                         double optimum);

/// Parses trajectory + optima CSVs and evaluates each run at the given
/// budgets (absolute evals, or multiples of the problem dimension).
std::vector<RunRecord> ingest_trajectories(std::istream& trajectories,
                                           std::istream& optima,
                                           const ConfigSpace& space,
                                           std::span<const std::int64_t> budgets,
                                           bool budgets_are_multipliers);

/// Median over the runs of one grouping key, clamped at kPrecisionFloor, then log10.
PrecisionCell solution_precision(std::span<const RunRecord> group);

/// Groups runs by (variant, problem, instance, dimension, budget) and reduces
/// each group with solution_precision. Output is sorted by the grouping key.
std::vector<PrecisionCell> build_cells(std::span<const RunRecord> runs);

/// Suite-level dataset: per variant, the mean log precision across every
/// (problem, instance) pair present at (dimension, budget). Incomplete
/// coverage is an error listing the missing keys.
Dataset aggregate_suite_level(std::shared_ptr<const ConfigSpace> space,
                              std::span<const PrecisionCell> cells,
                              int dimension,
                              std::int64_t budget);

/// Problem-level dataset: per variant, the median log precision across the
/// problem's instances at (dimension, budget).
Dataset aggregate_problem_level(std::shared_ptr<const ConfigSpace> space,
                                std::span<const PrecisionCell> cells,
                                int problem_id,
                                int dimension,
                                std::int64_t budget);

/// Distinct problem ids present at (dimension, budget), ascending.
std::vector<int> problems_in_slice(std::span<const PrecisionCell> cells,
                                   int dimension,
                                   std::int64_t budget);

/// Cells cache CSV: variant_id,<module columns>,dimension,budget,problem_id,instance_id,log_precision.
void write_cells_csv(std::ostream& out, const ConfigSpace& space, std::span<const PrecisionCell> cells);
std::vector<PrecisionCell> read_cells_csv(std::istream& in, const ConfigSpace& space);

}  // namespace fanova

#endif
