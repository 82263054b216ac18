// fanova command line: analyze / similarity / synth / ingest.
// Thin front end over the shared library's C API; all real work happens
// behind fanova/fanova.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fanova/fanova.h"

namespace {

int report(fv_status status) {
    if (status != FV_OK) std::fprintf(stderr, "fanova: error: %s\n", fv_last_error());
    return static_cast<int>(status);
}

struct AnalyzeArgs {
    std::string space;
    std::string data;
    std::string scenario = "suite";
    int problem = 0;
    int dim = 0;
    std::int64_t budget = 0;
    std::string engine = "forest";
    int trees = 64;
    std::string bootstrap = "on";
    int features_per_split = 0;
    int min_leaf = 1;
    int max_depth = 0;
    int max_order = 0;
    std::uint64_t seed = 0;
    std::string fraction_mode = "ratio";
    std::string out;
    std::string save_model;
    std::string load_model;
    bool exact_preset = false;
};

int run_analyze(const AnalyzeArgs& args) {
    fv_analyze_request request;
    fv_analyze_request_init(&request);
    request.space_path = args.space.c_str();
    request.data_path = args.data.empty() ? nullptr : args.data.c_str();
    request.scenario = args.scenario.c_str();
    request.problem_id = args.problem;
    request.dimension = args.dim;
    request.budget = args.budget;
    request.engine = args.engine.c_str();
    request.params.n_trees = args.trees;
    request.params.bootstrap = args.bootstrap == "on" ? 1 : 0;
    request.params.features_per_split = args.features_per_split;
    request.params.min_samples_leaf = args.min_leaf;
    request.params.max_depth = args.max_depth;
    request.params.seed = args.seed;
    if (args.exact_preset) {
        fv_fit_params_exact(&request.params);
        request.params.seed = args.seed;
    }
    request.max_order = args.max_order;
    request.fraction_mode = args.fraction_mode.c_str();
    request.out_dir = args.out.c_str();
    request.save_model_path = args.save_model.empty() ? nullptr : args.save_model.c_str();
    request.load_model_path = args.load_model.empty() ? nullptr : args.load_model.c_str();
    return report(fv_run_analyze(&request));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Functional-ANOVA module-effect analysis for modular optimizer frameworks"};
    app.require_subcommand(1);

    // analyze
    AnalyzeArgs analyze;
    CLI::App* cmd_analyze = app.add_subcommand(
        "analyze", "Decompose performance variance into module effects and write report CSVs");
    cmd_analyze->add_option("--space", analyze.space, "Config-space JSON file")->required();
    cmd_analyze->add_option("--data", analyze.data,
                            "Run, cells, or dataset CSV (detected from the header)");
    cmd_analyze->add_option("--scenario", analyze.scenario, "suite | problem | all-problems")
        ->check(CLI::IsMember({"suite", "problem", "all-problems"}));
    cmd_analyze->add_option("--problem", analyze.problem, "Problem id for --scenario problem");
    cmd_analyze->add_option("--dim", analyze.dim, "Problem dimension of the data slice");
    cmd_analyze->add_option("--budget", analyze.budget, "Evaluation budget of the data slice");
    cmd_analyze->add_option("--engine", analyze.engine, "forest | exact")
        ->check(CLI::IsMember({"forest", "exact"}));
    cmd_analyze->add_option("--trees", analyze.trees, "Number of trees (default 64)");
    cmd_analyze->add_option("--bootstrap", analyze.bootstrap, "on | off (default on)")
        ->check(CLI::IsMember({"on", "off"}));
    cmd_analyze->add_option("--features-per-split", analyze.features_per_split,
                            "Modules drawn per split; 0 = half of the modules, -1 = all");
    cmd_analyze->add_option("--min-leaf", analyze.min_leaf, "Minimum samples per leaf");
    cmd_analyze->add_option("--max-depth", analyze.max_depth, "Maximum tree depth; 0 = unlimited");
    cmd_analyze->add_option("--max-order", analyze.max_order,
                            "Highest interaction order to decompose (default: up to triplets)");
    cmd_analyze->add_option("--seed", analyze.seed, "Seed for all randomness (default 0)");
    cmd_analyze->add_option("--fraction-mode", analyze.fraction_mode, "ratio | pooled")
        ->check(CLI::IsMember({"ratio", "pooled"}));
    cmd_analyze->add_option("--out", analyze.out, "Output directory")->required();
    cmd_analyze->add_option("--save-model", analyze.save_model, "Write the fitted forest JSON here");
    cmd_analyze->add_option("--load-model", analyze.load_model,
                            "Decompose a saved forest instead of fitting");
    cmd_analyze->add_flag("--exact", analyze.exact_preset,
                          "Forest preset: 1 tree, no bootstrap, all features, min leaf 1");

    // similarity
    std::string sim_dir, sim_out;
    std::vector<int> sim_problems;
    CLI::App* cmd_similarity = app.add_subcommand(
        "similarity", "Cosine similarity between per-problem effect vectors");
    cmd_similarity->add_option("--effects-dir", sim_dir, "Directory with problem_<id>/effects.csv")
        ->required();
    cmd_similarity->add_option("--problems", sim_problems, "Problem ids to compare")
        ->required()
        ->delimiter(',');
    cmd_similarity->add_option("--out", sim_out, "Output CSV path (default <effects-dir>/similarity.csv)");

    // synth
    std::string synth_space, synth_truth, synth_out;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 0;
    CLI::App* cmd_synth = app.add_subcommand(
        "synth", "Generate a full-factorial synthetic dataset with known ground truth");
    cmd_synth->add_option("--space", synth_space, "Config-space JSON file")->required();
    cmd_synth->add_option("--truth", synth_truth, "Truth-spec JSON file")->required();
    cmd_synth->add_option("--noise-sd", synth_noise, "Gaussian noise standard deviation");
    cmd_synth->add_option("--seed", synth_seed, "Noise seed");
    cmd_synth->add_option("--out", synth_out, "Output directory")->required();

    // ingest
    std::string ingest_space, ingest_runs, ingest_traj, ingest_optima, ingest_out;
    std::vector<std::int64_t> ingest_budgets, ingest_multipliers;
    CLI::App* cmd_ingest = app.add_subcommand(
        "ingest", "Normalize raw run or trajectory CSVs into a cells.csv cache");
    cmd_ingest->add_option("--space", ingest_space, "Config-space JSON file")->required();
    cmd_ingest->add_option("--runs", ingest_runs, "Run CSV with a precision column");
    cmd_ingest->add_option("--trajectories", ingest_traj, "Trajectory CSV with evals/best_f columns");
    cmd_ingest->add_option("--optima", ingest_optima, "Optima CSV: problem_id,instance_id,optimum");
    cmd_ingest->add_option("--budgets", ingest_budgets, "Absolute budgets to extract (trajectories)")
        ->delimiter(',');
    cmd_ingest
        ->add_option("--budget-multipliers", ingest_multipliers,
                     "Budgets as multiples of the problem dimension (trajectories)")
        ->delimiter(',');
    cmd_ingest->add_option("--out", ingest_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage
    }

    if (cmd_analyze->parsed()) return run_analyze(analyze);

    if (cmd_similarity->parsed()) {
        const std::string out_path = sim_out.empty() ? sim_dir + "/similarity.csv" : sim_out;
        fv_similarity_request request{};
        request.effects_dir = sim_dir.c_str();
        request.problem_ids = sim_problems.data();
        request.problem_count = static_cast<int>(sim_problems.size());
        request.out_path = out_path.c_str();
        return report(fv_run_similarity(&request));
    }

    if (cmd_synth->parsed()) {
        fv_synth_request request{};
        request.space_path = synth_space.c_str();
        request.truth_path = synth_truth.c_str();
        request.noise_sd = synth_noise;
        request.seed = synth_seed;
        request.out_dir = synth_out.c_str();
        return report(fv_run_synth(&request));
    }

    if (cmd_ingest->parsed()) {
        if (!ingest_budgets.empty() && !ingest_multipliers.empty()) {
            std::fprintf(stderr, "fanova: error: give --budgets or --budget-multipliers, not both\n");
            return 1;
        }
        const auto& budgets = ingest_multipliers.empty() ? ingest_budgets : ingest_multipliers;
        fv_ingest_request request{};
        request.space_path = ingest_space.c_str();
        request.runs_path = ingest_runs.empty() ? nullptr : ingest_runs.c_str();
        request.trajectories_path = ingest_traj.empty() ? nullptr : ingest_traj.c_str();
        request.optima_path = ingest_optima.empty() ? nullptr : ingest_optima.c_str();
        request.budgets = budgets.empty() ? nullptr : budgets.data();
        request.budget_count = static_cast<int>(budgets.size());
        request.budgets_are_multipliers = ingest_multipliers.empty() ? 0 : 1;
        request.out_dir = ingest_out.c_str();
        return report(fv_run_ingest(&request));
    }

    return 1;
}
