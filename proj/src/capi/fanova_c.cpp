#include "fanova/fanova.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <string>

#include "core/analysis.hpp"
#include "core/csv.hpp"
#include "core/dataset.hpp"
#include "core/effects.hpp"
#include "core/errors.hpp"
#include "core/oracle.hpp"

namespace {

thread_local std::string g_last_error = "";

fv_status handle_exception() {
    try {
        throw;
    } catch (const fanova::usage_error& e) {
        g_last_error = e.what();
        return FV_ERR_USAGE;
    } catch (const fanova::data_error& e) {
        g_last_error = e.what();
        return FV_ERR_DATA;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FV_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FV_ERR_INTERNAL;
    }
}

template <typename Fn>
fv_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return FV_OK;
    } catch (...) {
        return handle_exception();
    }
}

fv_status require(bool condition, const char* message) {
    if (condition) return FV_OK;
    g_last_error = message;
    return FV_ERR_USAGE;
}

fanova::FitParams convert(const fv_fit_params& p) {
    fanova::FitParams out;
    out.n_trees = p.n_trees;
    out.bootstrap = p.bootstrap != 0;
    out.features_per_split = p.features_per_split;
    out.min_samples_leaf = p.min_samples_leaf;
    out.max_depth = p.max_depth;
    out.seed = p.seed;
    return out;
}

fanova::FractionMode parse_mode(const char* mode) {
    const std::string m = mode ? mode : "ratio";
    if (m == "ratio") return fanova::FractionMode::ratio;
    if (m == "pooled") return fanova::FractionMode::pooled;
    throw fanova::usage_error("unknown fraction mode '" + m + "' (expected ratio or pooled)");
}

}  // namespace

// Opaque handle bodies.
struct fv_space {
    std::shared_ptr<const fanova::ConfigSpace> space;
};

struct fv_dataset {
    std::shared_ptr<const fanova::Dataset> data;
};

// Either a fitted forest or the exact empirical table.
struct fv_model {
    std::shared_ptr<const fanova::Forest> forest;
    std::shared_ptr<const fanova::FactorialTable> table;
};

struct fv_effects {
    fanova::EffectDecomposition decomposition;
};

extern "C" {

const char* fv_last_error(void) { return g_last_error.c_str(); }

fv_status fv_space_from_json(const char* json_text, fv_space** out) {
    if (const auto s = require(json_text && out, "fv_space_from_json: NULL argument")) return s;
    return guarded([&] {
        *out = new fv_space{
            std::make_shared<const fanova::ConfigSpace>(fanova::ConfigSpace::parse(json_text))};
    });
}

fv_status fv_space_from_file(const char* path, fv_space** out) {
    if (const auto s = require(path && out, "fv_space_from_file: NULL argument")) return s;
    return guarded([&] {
        *out = new fv_space{
            std::make_shared<const fanova::ConfigSpace>(fanova::ConfigSpace::load(path))};
    });
}

void fv_space_free(fv_space* space) { delete space; }

int fv_space_module_count(const fv_space* space) {
    return space ? space->space->module_count() : 0;
}

int64_t fv_space_cardinality(const fv_space* space) {
    return space ? space->space->cardinality() : 0;
}

const char* fv_space_module_name(const fv_space* space, int module) {
    if (!space || module < 0 || module >= space->space->module_count()) return nullptr;
    return space->space->module(module).name.c_str();
}

int fv_space_option_count(const fv_space* space, int module) {
    if (!space || module < 0 || module >= space->space->module_count()) return 0;
    return space->space->option_count(module);
}

const char* fv_space_option_label(const fv_space* space, int module, int option) {
    if (!space || module < 0 || module >= space->space->module_count()) return nullptr;
    const auto& options = space->space->module(module).options;
    if (option < 0 || option >= static_cast<int>(options.size())) return nullptr;
    return options[static_cast<std::size_t>(option)].c_str();
}

fv_status fv_dataset_from_csv(const fv_space* space, const char* path, fv_dataset** out) {
    if (const auto s = require(space && path && out, "fv_dataset_from_csv: NULL argument")) return s;
    return guarded([&] {
        std::ifstream in(path);
        if (!in) throw fanova::data_error(std::string("cannot open data file '") + path + "'");
        *out = new fv_dataset{std::make_shared<const fanova::Dataset>(
            fanova::read_dataset_csv(in, space->space))};
    });
}

void fv_dataset_free(fv_dataset* dataset) { delete dataset; }

int64_t fv_dataset_row_count(const fv_dataset* dataset) {
    return dataset ? static_cast<int64_t>(dataset->data->row_count()) : 0;
}

void fv_fit_params_init(fv_fit_params* params) {
    if (!params) return;
    const fanova::FitParams defaults;
    params->n_trees = defaults.n_trees;
    params->bootstrap = defaults.bootstrap ? 1 : 0;
    params->features_per_split = defaults.features_per_split;
    params->min_samples_leaf = defaults.min_samples_leaf;
    params->max_depth = defaults.max_depth;
    params->seed = defaults.seed;
}

void fv_fit_params_exact(fv_fit_params* params) {
    if (!params) return;
    const fanova::FitParams preset = fanova::FitParams::exact_preset();
    params->n_trees = preset.n_trees;
    params->bootstrap = preset.bootstrap ? 1 : 0;
    params->features_per_split = preset.features_per_split;
    params->min_samples_leaf = preset.min_samples_leaf;
    params->max_depth = preset.max_depth;
    params->seed = preset.seed;
}

fv_status fv_model_fit(const fv_dataset* dataset, const fv_fit_params* params, fv_model** out) {
    if (const auto s = require(dataset && params && out, "fv_model_fit: NULL argument")) return s;
    return guarded([&] {
        *out = new fv_model{std::make_shared<const fanova::Forest>(
                                fanova::fit_forest(*dataset->data, convert(*params))),
                            nullptr};
    });
}

fv_status fv_model_exact(const fv_dataset* dataset, fv_model** out) {
    if (const auto s = require(dataset && out, "fv_model_exact: NULL argument")) return s;
    return guarded([&] {
        *out = new fv_model{nullptr, std::make_shared<const fanova::FactorialTable>(
                                         fanova::to_factorial(*dataset->data))};
    });
}

fv_status fv_model_save(const fv_model* model, const char* path) {
    if (const auto s = require(model && path, "fv_model_save: NULL argument")) return s;
    return guarded([&] {
        if (!model->forest) throw fanova::usage_error("fv_model_save: only forest models are savable");
        fanova::save_forest(*model->forest, path);
    });
}

fv_status fv_model_load(const fv_space* space, const char* path, fv_model** out) {
    if (const auto s = require(space && path && out, "fv_model_load: NULL argument")) return s;
    return guarded([&] {
        *out = new fv_model{std::make_shared<const fanova::Forest>(
                                fanova::load_forest(space->space, path)),
                            nullptr};
    });
}

fv_status fv_model_predict(const fv_model* model, const int* option_indices, double* out) {
    if (const auto s = require(model && option_indices && out, "fv_model_predict: NULL argument"))
        return s;
    return guarded([&] {
        const fanova::ConfigSpace& space =
            model->forest ? *model->forest->space : *model->table->space;
        fanova::Variant v(static_cast<std::size_t>(space.module_count()));
        for (int j = 0; j < space.module_count(); ++j) {
            const int option = option_indices[j];
            if (option < 0 || option >= space.option_count(j))
                throw fanova::usage_error("fv_model_predict: option index out of range");
            v[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(option);
        }
        *out = model->forest ? model->forest->predict(v)
                             : model->table->response[static_cast<std::size_t>(space.rank(v))];
    });
}

void fv_model_free(fv_model* model) { delete model; }

fv_status fv_effects_compute(const fv_model* model, int max_order, const char* fraction_mode,
                             fv_effects** out) {
    if (const auto s = require(model && out, "fv_effects_compute: NULL argument")) return s;
    return guarded([&] {
        if (model->forest) {
            *out = new fv_effects{
                fanova::decompose(*model->forest, max_order, parse_mode(fraction_mode))};
        } else {
            *out = new fv_effects{fanova::exact_decompose(*model->table, max_order)};
        }
    });
}

void fv_effects_free(fv_effects* effects) { delete effects; }

int fv_effects_subset_count(const fv_effects* effects) {
    return effects ? static_cast<int>(effects->decomposition.keys.size()) : 0;
}

fv_status fv_effects_subset(const fv_effects* effects, int index, int* modules, int* size) {
    if (const auto s = require(effects && modules && size, "fv_effects_subset: NULL argument"))
        return s;
    return guarded([&] {
        if (index < 0 || index >= static_cast<int>(effects->decomposition.keys.size()))
            throw fanova::usage_error("fv_effects_subset: index out of range");
        const auto& key = effects->decomposition.keys[static_cast<std::size_t>(index)];
        if (*size < key.order()) throw fanova::usage_error("fv_effects_subset: buffer too small");
        for (int i = 0; i < key.order(); ++i) modules[i] = key.modules[static_cast<std::size_t>(i)];
        *size = key.order();
    });
}

fv_status fv_effects_fraction(const fv_effects* effects, int index, double* out) {
    if (const auto s = require(effects && out, "fv_effects_fraction: NULL argument")) return s;
    return guarded([&] {
        if (index < 0 || index >= static_cast<int>(effects->decomposition.fractions.size()))
            throw fanova::usage_error("fv_effects_fraction: index out of range");
        *out = effects->decomposition.fractions[static_cast<std::size_t>(index)];
    });
}

int fv_effects_tree_count(const fv_effects* effects) {
    return effects ? static_cast<int>(effects->decomposition.per_tree.size()) : 0;
}

fv_status fv_effects_tree_total_variance(const fv_effects* effects, int tree, double* out) {
    if (const auto s = require(effects && out, "fv_effects_tree_total_variance: NULL argument"))
        return s;
    return guarded([&] {
        if (tree < 0 || tree >= static_cast<int>(effects->decomposition.per_tree.size()))
            throw fanova::usage_error("fv_effects_tree_total_variance: index out of range");
        *out = effects->decomposition.per_tree[static_cast<std::size_t>(tree)].total_variance;
    });
}

fv_status fv_effects_tree_subset_variance(const fv_effects* effects, int tree, int index,
                                          double* out) {
    if (const auto s = require(effects && out, "fv_effects_tree_subset_variance: NULL argument"))
        return s;
    return guarded([&] {
        if (tree < 0 || tree >= static_cast<int>(effects->decomposition.per_tree.size()))
            throw fanova::usage_error("fv_effects_tree_subset_variance: tree index out of range");
        const auto& variances =
            effects->decomposition.per_tree[static_cast<std::size_t>(tree)].subset_variances;
        if (index < 0 || index >= static_cast<int>(variances.size()))
            throw fanova::usage_error("fv_effects_tree_subset_variance: subset index out of range");
        *out = variances[static_cast<std::size_t>(index)];
    });
}

fv_status fv_effects_cumulative(const fv_effects* effects, double* out) {
    if (const auto s = require(effects && out, "fv_effects_cumulative: NULL argument")) return s;
    return guarded([&] {
        const fanova::SummaryRow row = fanova::cumulative_summary(effects->decomposition);
        out[0] = row.individual;
        out[1] = row.pairwise;
        out[2] = row.triple;
        out[3] = row.total;
    });
}

void fv_analyze_request_init(fv_analyze_request* request) {
    if (!request) return;
    std::memset(request, 0, sizeof(*request));
    fv_fit_params_init(&request->params);
    request->scenario = "suite";
    request->engine = "forest";
    request->fraction_mode = "ratio";
    request->max_order = 0;
}

fv_status fv_run_analyze(const fv_analyze_request* request) {
    if (const auto s = require(request != nullptr, "fv_run_analyze: NULL request")) return s;
    return guarded([&] {
        fanova::AnalyzeRequest r;
        r.space_path = request->space_path ? request->space_path : "";
        r.data_path = request->data_path ? request->data_path : "";
        r.scenario = request->scenario ? request->scenario : "suite";
        r.problem_id = request->problem_id;
        r.dimension = request->dimension;
        r.budget = request->budget;
        const std::string engine = request->engine ? request->engine : "forest";
        if (engine == "forest") r.engine = fanova::Engine::forest;
        else if (engine == "exact") r.engine = fanova::Engine::exact;
        else throw fanova::usage_error("unknown engine '" + engine + "' (expected forest or exact)");
        r.params = convert(request->params);
        r.max_order = request->max_order;
        r.fraction_mode = parse_mode(request->fraction_mode);
        r.out_dir = request->out_dir ? request->out_dir : "";
        r.save_model_path = request->save_model_path ? request->save_model_path : "";
        r.load_model_path = request->load_model_path ? request->load_model_path : "";
        fanova::run_analyze(r);
    });
}

fv_status fv_run_similarity(const fv_similarity_request* request) {
    if (const auto s = require(request != nullptr, "fv_run_similarity: NULL request")) return s;
    if (const auto s = require(request->problem_ids != nullptr || request->problem_count == 0,
                               "fv_run_similarity: NULL problem ids"))
        return s;
    return guarded([&] {
        fanova::SimilarityRequest r;
        r.effects_dir = request->effects_dir ? request->effects_dir : "";
        r.problem_ids.assign(request->problem_ids, request->problem_ids + request->problem_count);
        r.out_path = request->out_path ? request->out_path : "";
        fanova::run_similarity(r);
    });
}

fv_status fv_run_synth(const fv_synth_request* request) {
    if (const auto s = require(request != nullptr, "fv_run_synth: NULL request")) return s;
    return guarded([&] {
        fanova::SynthRequest r;
        r.space_path = request->space_path ? request->space_path : "";
        r.truth_path = request->truth_path ? request->truth_path : "";
        r.noise_sd = request->noise_sd;
        r.seed = request->seed;
        r.out_dir = request->out_dir ? request->out_dir : "";
        fanova::run_synth(r);
    });
}

fv_status fv_run_ingest(const fv_ingest_request* request) {
    if (const auto s = require(request != nullptr, "fv_run_ingest: NULL request")) return s;
    return guarded([&] {
        fanova::IngestRequest r;
        r.space_path = request->space_path ? request->space_path : "";
        r.runs_path = request->runs_path ? request->runs_path : "";
        r.trajectories_path = request->trajectories_path ? request->trajectories_path : "";
        r.optima_path = request->optima_path ? request->optima_path : "";
        if (request->budget_count > 0) {
            if (!request->budgets) throw fanova::usage_error("fv_run_ingest: NULL budgets");
            r.budgets.assign(request->budgets, request->budgets + request->budget_count);
        }
        r.budgets_are_multipliers = request->budgets_are_multipliers != 0;
        r.out_dir = request->out_dir ? request->out_dir : "";
        fanova::run_ingest(r);
    });
}

}  // extern "C"
