#ifndef FANOVA_ANALYSIS_HPP
#define FANOVA_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "core/effects.hpp"
#include "core/forest.hpp"

namespace fanova {

enum class Engine { forest, exact };

// A full analysis request: pipeline -> model -> decomposition -> reports.
struct AnalyzeRequest {
    std::string space_path;
    std::string data_path;                 // runs, cells, or dataset CSV (header-detected)
    std::string scenario = "suite";        // suite | problem | all-problems
    int problem_id = 0;
    int dimension = 0;
    std::int64_t budget = 0;
    Engine engine = Engine::forest;
    FitParams params;
    int max_order = 0;  // 0: min(3, module count)
    FractionMode fraction_mode = FractionMode::ratio;
    std::string out_dir;
    std::string save_model_path;  // optional
    std::string load_model_path;  // optional
};

/// Runs the request and writes effects.csv, summary.csv, pairs.csv,
/// triplets.csv and run-manifest.json into out_dir (per-problem
/// subdirectories for the all-problems scenario). Partial outputs are
/// removed on error.
void run_analyze(const AnalyzeRequest& request);

struct SimilarityRequest {
    std::string effects_dir;        // directory with problem_<id>/effects.csv
    std::vector<int> problem_ids;
    std::string out_path;           // similarity.csv
};

void run_similarity(const SimilarityRequest& request);

struct SynthRequest {
    std::string space_path;
    std::string truth_path;
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir;  // receives dataset.csv + truth.json
};

void run_synth(const SynthRequest& request);

struct IngestRequest {
    std::string space_path;
    std::string runs_path;          // either runs ...
    std::string trajectories_path;  // ... or trajectories + optima
    std::string optima_path;
    std::vector<std::int64_t> budgets;  // trajectories only
    bool budgets_are_multipliers = false;
    std::string out_dir;  // receives cells.csv
};

void run_ingest(const IngestRequest& request);

}  // namespace fanova

#endif
