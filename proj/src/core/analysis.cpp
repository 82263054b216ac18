#include "core/analysis.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/errors.hpp"
#include "core/oracle.hpp"
#include "core/pipeline.hpp"
#include "core/reports.hpp"
#include "core/similarity.hpp"
#include "core/synthetic.hpp"

namespace fanova {

namespace fs = std::filesystem;

namespace {

enum class DataKind { runs, cells, dataset };

// Removes the files (and directories they newly populated) if anything
// throws mid-way, so failed runs leave no partial reports behind.
class OutputTracker {
  public:
    ~OutputTracker() {
        if (!armed_) return;
        std::error_code ec;
        for (const auto& path : created_) fs::remove(path, ec);
        for (auto it = created_dirs_.rbegin(); it != created_dirs_.rend(); ++it)
            if (fs::is_empty(*it, ec) && !ec) fs::remove(*it, ec);
    }

    void make_dir(const fs::path& dir) {
        if (fs::exists(dir)) return;
        fs::create_directories(dir);
        created_dirs_.push_back(dir);
    }

    std::ofstream open(const fs::path& path) {
        std::ofstream out(path);
        if (!out) throw data_error("cannot write output file '" + path.string() + "'");
        created_.push_back(path);
        return out;
    }

    /// Registers a file written elsewhere for rollback.
    void note(const fs::path& path) { created_.push_back(path); }

    void keep() { armed_ = false; }

  private:
    std::vector<fs::path> created_;
    std::vector<fs::path> created_dirs_;
    bool armed_ = true;
};

DataKind sniff_data_kind(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open data file '" + path + "'");
    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw data_error("data file '" + path + "' is empty");
    for (const auto& column : header) {
        if (column == "precision") return DataKind::runs;
        if (column == "log_precision") return DataKind::cells;
        if (column == "response") return DataKind::dataset;
    }
    throw data_error("data file '" + path +
                     "': header has none of precision/log_precision/response");
}

std::string engine_name(Engine e) { return e == Engine::forest ? "forest" : "exact"; }

nlohmann::json params_json(const FitParams& p) {
    return {{"n_trees", p.n_trees},
            {"bootstrap", p.bootstrap},
            {"features_per_split", p.features_per_split},
            {"min_samples_leaf", p.min_samples_leaf},
            {"max_depth", p.max_depth},
            {"seed", p.seed}};
}

struct ScenarioOutputs {
    fs::path dir;
    const Dataset* data;
    int problem_id;  // 0 for suite/synthetic
};

void write_reports(OutputTracker& tracker,
                   const fs::path& dir,
                   const AnalyzeRequest& request,
                   const EffectDecomposition& decomposition,
                   const std::string& algorithm,
                   int dimension,
                   std::int64_t budget,
                   std::size_t row_count,
                   const nlohmann::json& scenario_extra) {
    tracker.make_dir(dir);
    {
        auto out = tracker.open(dir / "effects.csv");
        write_effects_csv(out, decomposition);
    }
    if (decomposition.max_order >= 2) {
        auto out = tracker.open(dir / "pairs.csv");
        write_pairs_csv(out, decomposition);
    }
    if (decomposition.max_order >= 3) {
        {
            auto out = tracker.open(dir / "summary.csv");
            write_summary_csv(out, algorithm, dimension, budget, cumulative_summary(decomposition));
        }
        {
            auto out = tracker.open(dir / "triplets.csv");
            write_triplets_csv(out, decomposition);
        }
    }

    nlohmann::json manifest{
        {"command", "analyze"},
        {"space", {{"path", request.space_path}, {"digest", file_digest(request.space_path)}}},
        {"engine", engine_name(request.engine)},
        {"max_order", decomposition.max_order},
        {"fraction_mode", decomposition.mode == FractionMode::ratio ? "ratio" : "pooled"},
        {"scenario", request.scenario},
        {"dimension", dimension},
        {"budget", budget},
        {"algorithm", algorithm},
        {"rows", row_count},
        {"subset_count", decomposition.keys.size()},
        {"zero_variance_trees", decomposition.zero_variance_trees},
    };
    if (!request.data_path.empty())
        manifest["data"] = {{"path", request.data_path}, {"digest", file_digest(request.data_path)}};
    if (request.engine == Engine::forest) manifest["params"] = params_json(request.params);
    if (!request.load_model_path.empty()) manifest["loaded_model"] = request.load_model_path;
    for (const auto& [key, value] : scenario_extra.items()) manifest[key] = value;

    // the CSVs round percentages to 2 decimals; full precision lives here
    nlohmann::json fractions = nlohmann::json::array();
    for (std::size_t i = 0; i < decomposition.keys.size(); ++i)
        fractions.push_back({{"subset", subset_label(*decomposition.space, decomposition.keys[i])},
                             {"order", decomposition.keys[i].order()},
                             {"fraction", decomposition.fractions[i]}});
    manifest["fractions"] = std::move(fractions);

    auto out = tracker.open(dir / "run-manifest.json");
    out << manifest.dump(1) << '\n';
}

// One scenario slice: fit (or load) the model, decompose, write reports.
void analyze_one(OutputTracker& tracker,
                 const AnalyzeRequest& request,
                 const fs::path& dir,
                 const Dataset& data,
                 const std::string& algorithm,
                 const nlohmann::json& scenario_extra) {
    std::optional<EffectDecomposition> decomposition;
    if (request.engine == Engine::exact) {
        decomposition = exact_decompose(to_factorial(data), request.max_order);
    } else {
        const Forest forest = fit_forest(data, request.params);
        if (!request.save_model_path.empty()) {
            save_forest(forest, request.save_model_path);
            tracker.note(request.save_model_path);
        }
        decomposition = decompose(forest, request.max_order, request.fraction_mode);
    }
    write_reports(tracker, dir, request, *decomposition, algorithm, data.dimension(), data.budget(),
                  data.row_count(), scenario_extra);
}

std::string problem_dir_name(int problem_id) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "problem_%02d", problem_id);
    return buf;
}

}  // namespace

void run_analyze(const AnalyzeRequest& raw_request) {
    AnalyzeRequest request = raw_request;
    if (request.out_dir.empty()) throw usage_error("analyze: --out is required");
    if (request.space_path.empty()) throw usage_error("analyze: --space is required");
    if (request.max_order < 0) throw usage_error("analyze: --max-order must be positive");
    if (request.scenario != "suite" && request.scenario != "problem" &&
        request.scenario != "all-problems")
        throw usage_error("analyze: unknown scenario '" + request.scenario + "'");
    if (!request.save_model_path.empty() && request.engine != Engine::forest)
        throw usage_error("analyze: --save-model requires the forest engine");
    if (!request.load_model_path.empty() && request.engine != Engine::forest)
        throw usage_error("analyze: --load-model requires the forest engine");
    if (!request.save_model_path.empty() && request.scenario == "all-problems")
        throw usage_error("analyze: --save-model cannot fan out over all problems");

    const auto space = std::make_shared<const ConfigSpace>(ConfigSpace::load(request.space_path));
    if (request.max_order == 0) request.max_order = std::min(3, space->module_count());
    if (request.max_order > space->module_count())
        throw usage_error("analyze: --max-order exceeds the module count");

    OutputTracker tracker;
    const fs::path out_dir(request.out_dir);
    tracker.make_dir(out_dir);

    // Decomposing a saved model needs no data at all.
    if (!request.load_model_path.empty()) {
        const Forest forest = load_forest(space, request.load_model_path);
        const EffectDecomposition decomposition =
            decompose(forest, request.max_order, request.fraction_mode);
        write_reports(tracker, out_dir, request, decomposition, space->name(), request.dimension,
                      request.budget, 0, nlohmann::json::object());
        tracker.keep();
        return;
    }

    if (request.data_path.empty()) throw usage_error("analyze: --data is required");
    const DataKind kind = sniff_data_kind(request.data_path);
    std::ifstream in(request.data_path);
    if (!in) throw data_error("cannot open data file '" + request.data_path + "'");

    if (kind == DataKind::dataset) {
        const Dataset data = read_dataset_csv(in, space);
        analyze_one(tracker, request, out_dir, data, space->name(), nlohmann::json::object());
        tracker.keep();
        return;
    }

    std::vector<PrecisionCell> cells;
    if (kind == DataKind::runs) {
        const std::vector<RunRecord> runs = ingest_runs(in, *space);
        cells = build_cells(runs);
    } else {
        cells = read_cells_csv(in, *space);
    }

    if (request.scenario == "suite") {
        const Dataset data = aggregate_suite_level(space, cells, request.dimension, request.budget);
        analyze_one(tracker, request, out_dir, data, space->name(), nlohmann::json::object());
    } else if (request.scenario == "problem") {
        const Dataset data = aggregate_problem_level(space, cells, request.problem_id,
                                                     request.dimension, request.budget);
        analyze_one(tracker, request, out_dir, data, space->name(),
                    nlohmann::json{{"problem_id", request.problem_id}});
    } else {
        const std::vector<int> problems = problems_in_slice(cells, request.dimension, request.budget);
        if (problems.empty())
            throw data_error("analyze: no rows matched the requested (dimension, budget) slice");
        for (const int problem_id : problems) {
            const Dataset data =
                aggregate_problem_level(space, cells, problem_id, request.dimension, request.budget);
            analyze_one(tracker, request, out_dir / problem_dir_name(problem_id), data, space->name(),
                        nlohmann::json{{"problem_id", problem_id}});
        }
        nlohmann::json manifest{
            {"command", "analyze"},
            {"scenario", "all-problems"},
            {"space", {{"path", request.space_path}, {"digest", file_digest(request.space_path)}}},
            {"data", {{"path", request.data_path}, {"digest", file_digest(request.data_path)}}},
            {"dimension", request.dimension},
            {"budget", request.budget},
            {"engine", engine_name(request.engine)},
            {"problems", problems},
        };
        if (request.engine == Engine::forest) manifest["params"] = params_json(request.params);
        auto out = tracker.open(out_dir / "run-manifest.json");
        out << manifest.dump(1) << '\n';
    }
    tracker.keep();
}

void run_similarity(const SimilarityRequest& request) {
    if (request.problem_ids.empty()) throw usage_error("similarity: no problem ids given");
    std::vector<EffectVector> vectors;
    for (const int problem_id : request.problem_ids) {
        const fs::path file = fs::path(request.effects_dir) / problem_dir_name(problem_id) / "effects.csv";
        std::ifstream in(file);
        if (!in)
            throw data_error("similarity: missing effects file '" + file.string() + "'");
        vectors.push_back(read_effects_csv(in, problem_id));
        if (!vectors.front().compatible(vectors.back()))
            throw data_error("similarity: effect vectors of problems " +
                             std::to_string(request.problem_ids.front()) + " and " +
                             std::to_string(problem_id) + " have mismatched subsets (" +
                             std::to_string(vectors.front().values.size()) + " vs " +
                             std::to_string(vectors.back().values.size()) + " entries)");
    }
    const SimilarityMatrix matrix = similarity_matrix(vectors);

    OutputTracker tracker;
    const fs::path out_path(request.out_path);
    if (out_path.has_parent_path()) tracker.make_dir(out_path.parent_path());
    auto out = tracker.open(out_path);
    write_similarity_csv(out, matrix);
    tracker.keep();
}

void run_synth(const SynthRequest& request) {
    const auto space = std::make_shared<const ConfigSpace>(ConfigSpace::load(request.space_path));
    std::vector<TruthComponent> components = load_truth(*space, request.truth_path);
    SyntheticResult result =
        generate_synthetic(space, std::move(components), request.noise_sd, request.seed);

    OutputTracker tracker;
    const fs::path out_dir(request.out_dir);
    tracker.make_dir(out_dir);
    {
        auto out = tracker.open(out_dir / "dataset.csv");
        write_dataset_csv(out, result.dataset);
    }
    {
        auto out = tracker.open(out_dir / "truth.json");
        out << truth_to_json(*space, result.truth);
    }
    tracker.keep();
}

void run_ingest(const IngestRequest& request) {
    const auto space = std::make_shared<const ConfigSpace>(ConfigSpace::load(request.space_path));
    std::vector<RunRecord> runs;
    if (!request.runs_path.empty()) {
        if (!request.trajectories_path.empty())
            throw usage_error("ingest: give either --runs or --trajectories, not both");
        std::ifstream in(request.runs_path);
        if (!in) throw data_error("cannot open runs file '" + request.runs_path + "'");
        runs = ingest_runs(in, *space);
    } else if (!request.trajectories_path.empty()) {
        if (request.optima_path.empty())
            throw usage_error("ingest: --trajectories needs --optima");
        std::ifstream traj(request.trajectories_path);
        if (!traj) throw data_error("cannot open trajectory file '" + request.trajectories_path + "'");
        std::ifstream optima(request.optima_path);
        if (!optima) throw data_error("cannot open optima file '" + request.optima_path + "'");
        runs = ingest_trajectories(traj, optima, *space, request.budgets,
                                   request.budgets_are_multipliers);
    } else {
        throw usage_error("ingest: one of --runs or --trajectories is required");
    }
    const std::vector<PrecisionCell> cells = build_cells(runs);

    OutputTracker tracker;
    const fs::path out_dir(request.out_dir);
    tracker.make_dir(out_dir);
    auto out = tracker.open(out_dir / "cells.csv");
    write_cells_csv(out, *space, cells);
    tracker.keep();
}

}  // namespace fanova
