#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fanova {

namespace {

// Header-driven column mapping shared by the run/trajectory/cells readers.
// Column order is free; the column set must match the schema exactly.
struct ColumnMap {
    std::vector<int> module_column;    // per module index
    std::map<std::string, int> named;  // remaining schema columns
    std::size_t width = 0;

    static ColumnMap build(const std::vector<std::string>& header,
                           const ConfigSpace& space,
                           const std::vector<std::string>& required,
                           const std::string& what) {
        ColumnMap map;
        map.width = header.size();
        map.module_column.assign(static_cast<std::size_t>(space.module_count()), -1);
        for (int c = 0; c < static_cast<int>(header.size()); ++c) {
            const std::string& name = header[static_cast<std::size_t>(c)];
            if (name == "variant_id") continue;
            const int mi = space.find_module(name);
            if (mi >= 0) {
                if (map.module_column[static_cast<std::size_t>(mi)] >= 0)
                    throw data_error(what + ": duplicate column '" + name + "'");
                map.module_column[static_cast<std::size_t>(mi)] = c;
                continue;
            }
            if (std::find(required.begin(), required.end(), name) == required.end())
                throw data_error(what + ": unexpected column '" + name + "'");
            if (!map.named.emplace(name, c).second)
                throw data_error(what + ": duplicate column '" + name + "'");
        }
        for (int j = 0; j < space.module_count(); ++j)
            if (map.module_column[static_cast<std::size_t>(j)] < 0)
                throw data_error(what + ": missing module column '" + space.module(j).name + "'");
        for (const auto& name : required)
            if (!map.named.count(name))
                throw data_error(what + ": missing column '" + name + "'");
        return map;
    }

    Variant variant(const std::vector<std::string>& fields, const ConfigSpace& space,
                    std::size_t line, const std::string& what) const {
        Variant v(static_cast<std::size_t>(space.module_count()));
        for (int j = 0; j < space.module_count(); ++j) {
            const std::string& label = fields[static_cast<std::size_t>(module_column[static_cast<std::size_t>(j)])];
            const int oi = space.find_option(j, label);
            if (oi < 0)
                throw data_error(what + ": unknown option '" + label + "' for module '" +
                                 space.module(j).name + "' on line " + std::to_string(line));
            v[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(oi);
        }
        return v;
    }

    const std::string& field(const std::vector<std::string>& fields, const std::string& name) const {
        return fields[static_cast<std::size_t>(named.at(name))];
    }
};

using GroupKey = std::tuple<std::vector<std::uint8_t>, int, std::int64_t, int, int>;

GroupKey cell_key(const Variant& v, int dimension, std::int64_t budget, int problem, int instance) {
    return {v, dimension, budget, problem, instance};
}

std::string describe_key(const ConfigSpace& space, const Variant& v) {
    std::string out;
    for (int j = 0; j < space.module_count(); ++j) {
        if (j > 0) out += ";";
        out += space.module(j).options[v[static_cast<std::size_t>(j)]];
    }
    return out;
}

}  // namespace

double median(std::span<const double> values) {
    if (values.empty()) throw data_error("median of empty set");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

std::vector<RunRecord> ingest_runs(std::istream& in, const ConfigSpace& space) {
    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw data_error("run CSV: missing header");
    const std::vector<std::string> required{"dimension", "budget", "problem_id", "instance_id", "run_id", "precision"};
    const ColumnMap map = ColumnMap::build(header, space, required, "run CSV");

    std::vector<RunRecord> out;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (csv::read_record(in, fields)) {
        ++line;
        if (fields.size() != map.width)
            throw data_error("run CSV: wrong field count on line " + std::to_string(line));
        const std::string context = "run CSV line " + std::to_string(line);
        RunRecord r;
        r.variant = map.variant(fields, space, line, "run CSV");
        r.dimension = static_cast<int>(csv::parse_int(map.field(fields, "dimension"), context));
        r.budget = csv::parse_int(map.field(fields, "budget"), context);
        r.problem_id = static_cast<int>(csv::parse_int(map.field(fields, "problem_id"), context));
        r.instance_id = static_cast<int>(csv::parse_int(map.field(fields, "instance_id"), context));
        r.run_id = static_cast<int>(csv::parse_int(map.field(fields, "run_id"), context));
        r.precision = csv::parse_double(map.field(fields, "precision"), context);
        if (r.precision < 0.0) throw data_error(context + ": negative precision");
        if (r.budget <= 0) throw data_error(context + ": budget must be positive");
        if (r.dimension <= 0) throw data_error(context + ": dimension must be positive");
        if (r.problem_id < 1 || r.problem_id > 24)
            throw data_error(context + ": problem_id must be in 1..24");
        out.push_back(std::move(r));
    }
    return out;
}

double extract_at_budget(std::span<const std::pair<std::int64_t, double>> trajectory,
                         std::int64_t budget,
                         double optimum) {
    if (trajectory.empty()) throw data_error("extract_at_budget: empty trajectory");
    if (trajectory.front().first > budget)
        throw data_error("extract_at_budget: budget " + std::to_string(budget) +
                         " precedes first trajectory record");
    double best = trajectory.front().second;
    std::int64_t previous_evals = trajectory.front().first;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const auto& [evals, value] = trajectory[i];
        if (evals <= previous_evals) throw data_error("extract_at_budget: evals not strictly increasing");
        if (value > best) throw data_error("extract_at_budget: best_f not non-increasing");
        if (evals > budget) break;
        best = value;
        previous_evals = evals;
    }
    const double precision = best - optimum;
    if (precision < 0.0) throw data_error("extract_at_budget: best_f below the stated optimum");
    return precision;
}

std::vector<RunRecord> ingest_trajectories(std::istream& trajectories,
                                           std::istream& optima,
                                           const ConfigSpace& space,
                                           std::span<const std::int64_t> budgets,
                                           bool budgets_are_multipliers) {
    if (budgets.empty()) throw usage_error("ingest: no budgets given");

    std::map<std::pair<int, int>, double> optimum_of;
    {
        std::vector<std::string> header;
        if (!csv::read_record(optima, header)) throw data_error("optima CSV: missing header");
        if (header != std::vector<std::string>{"problem_id", "instance_id", "optimum"})
            throw data_error("optima CSV: header must be problem_id,instance_id,optimum");
        std::vector<std::string> fields;
        std::size_t line = 1;
        while (csv::read_record(optima, fields)) {
            ++line;
            if (fields.size() != 3) throw data_error("optima CSV: wrong field count on line " + std::to_string(line));
            const std::string context = "optima CSV line " + std::to_string(line);
            const int problem = static_cast<int>(csv::parse_int(fields[0], context));
            const int instance = static_cast<int>(csv::parse_int(fields[1], context));
            const double optimum = csv::parse_double(fields[2], context);
            if (!optimum_of.emplace(std::make_pair(problem, instance), optimum).second)
                throw data_error(context + ": duplicate (problem_id, instance_id)");
        }
    }

    std::vector<std::string> header;
    if (!csv::read_record(trajectories, header)) throw data_error("trajectory CSV: missing header");
    const std::vector<std::string> required{"dimension", "problem_id", "instance_id", "run_id", "evals", "best_f"};
    const ColumnMap map = ColumnMap::build(header, space, required, "trajectory CSV");

    // (variant, dimension, problem, instance, run) -> trajectory
    std::map<std::tuple<Variant, int, int, int, int>, std::vector<std::pair<std::int64_t, double>>> groups;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (csv::read_record(trajectories, fields)) {
        ++line;
        if (fields.size() != map.width)
            throw data_error("trajectory CSV: wrong field count on line " + std::to_string(line));
        const std::string context = "trajectory CSV line " + std::to_string(line);
        Variant v = map.variant(fields, space, line, "trajectory CSV");
        const int dimension = static_cast<int>(csv::parse_int(map.field(fields, "dimension"), context));
        const int problem = static_cast<int>(csv::parse_int(map.field(fields, "problem_id"), context));
        const int instance = static_cast<int>(csv::parse_int(map.field(fields, "instance_id"), context));
        const int run = static_cast<int>(csv::parse_int(map.field(fields, "run_id"), context));
        const std::int64_t evals = csv::parse_int(map.field(fields, "evals"), context);
        const double best_f = csv::parse_double(map.field(fields, "best_f"), context);
        if (dimension <= 0) throw data_error(context + ": dimension must be positive");
        if (problem < 1 || problem > 24) throw data_error(context + ": problem_id must be in 1..24");
        groups[{std::move(v), dimension, problem, instance, run}].emplace_back(evals, best_f);
    }

    std::vector<RunRecord> out;
    for (auto& [key, trajectory] : groups) {
        const auto& [variant, dimension, problem, instance, run] = key;
        std::sort(trajectory.begin(), trajectory.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto opt = optimum_of.find({problem, instance});
        if (opt == optimum_of.end())
            throw data_error("trajectory CSV: no optimum for problem " + std::to_string(problem) +
                             " instance " + std::to_string(instance));
        for (const std::int64_t b : budgets) {
            RunRecord r;
            r.variant = variant;
            r.problem_id = problem;
            r.instance_id = instance;
            r.run_id = run;
            r.dimension = dimension;
            r.budget = budgets_are_multipliers ? b * dimension : b;
            if (r.budget <= 0) throw usage_error("ingest: budget must be positive");
            r.precision = extract_at_budget(trajectory, r.budget, opt->second);
            out.push_back(std::move(r));
        }
    }
    return out;
}

PrecisionCell solution_precision(std::span<const RunRecord> group) {
    if (group.empty()) throw data_error("solution_precision: empty run group");
    const RunRecord& first = group.front();
    std::vector<double> precisions;
    precisions.reserve(group.size());
    for (const RunRecord& r : group) {
        if (r.variant != first.variant || r.problem_id != first.problem_id ||
            r.instance_id != first.instance_id || r.dimension != first.dimension ||
            r.budget != first.budget)
            throw data_error("solution_precision: runs do not share one grouping key");
        precisions.push_back(r.precision);
    }
    const double med = std::max(median(precisions), kPrecisionFloor);
    PrecisionCell cell;
    cell.variant = first.variant;
    cell.problem_id = first.problem_id;
    cell.instance_id = first.instance_id;
    cell.dimension = first.dimension;
    cell.budget = first.budget;
    cell.log_precision = std::log10(med);
    return cell;
}

std::vector<PrecisionCell> build_cells(std::span<const RunRecord> runs) {
    std::map<GroupKey, std::vector<RunRecord>> groups;
    for (const RunRecord& r : runs)
        groups[cell_key(r.variant, r.dimension, r.budget, r.problem_id, r.instance_id)].push_back(r);
    std::vector<PrecisionCell> cells;
    cells.reserve(groups.size());
    for (const auto& [key, group] : groups) cells.push_back(solution_precision(group));
    return cells;
}

namespace {

// Shared coverage walk: per variant, the values of every (problem, instance)
// key in the slice universe, in sorted key order.
std::map<Variant, std::vector<double>> collect_slice(const ConfigSpace& space,
                                                     std::span<const PrecisionCell> cells,
                                                     int dimension,
                                                     std::int64_t budget,
                                                     int problem_filter,  // -1: all problems
                                                     const std::string& what) {
    std::map<std::pair<int, int>, std::size_t> universe;  // (problem, instance) -> slot
    std::map<Variant, std::map<std::pair<int, int>, double>> per_variant;
    for (const PrecisionCell& c : cells) {
        if (c.dimension != dimension || c.budget != budget) continue;
        if (problem_filter >= 0 && c.problem_id != problem_filter) continue;
        const std::pair<int, int> key{c.problem_id, c.instance_id};
        universe.emplace(key, universe.size());
        if (!per_variant[c.variant].emplace(key, c.log_precision).second)
            throw data_error(what + ": duplicate cell for variant " + describe_key(space, c.variant) +
                             " problem " + std::to_string(c.problem_id) + " instance " +
                             std::to_string(c.instance_id));
    }
    if (per_variant.empty()) throw data_error(what + ": no rows matched the requested slice");

    std::map<Variant, std::vector<double>> out;
    for (const auto& [variant, values] : per_variant) {
        if (values.size() != universe.size()) {
            std::string missing;
            int listed = 0;
            for (const auto& [key, slot] : universe) {
                if (values.count(key)) continue;
                if (listed == 8) {
                    missing += ", ...";
                    break;
                }
                if (listed > 0) missing += ", ";
                missing += "(" + std::to_string(key.first) + "," + std::to_string(key.second) + ")";
                ++listed;
            }
            throw data_error(what + ": variant " + describe_key(space, variant) +
                             " is missing (problem,instance) cells: " + missing);
        }
        std::vector<double> ordered;
        ordered.reserve(values.size());
        for (const auto& [key, value] : values) ordered.push_back(value);
        out.emplace(variant, std::move(ordered));
    }
    return out;
}

}  // namespace

Dataset aggregate_suite_level(std::shared_ptr<const ConfigSpace> space,
                              std::span<const PrecisionCell> cells,
                              int dimension,
                              std::int64_t budget) {
    const auto slice = collect_slice(*space, cells, dimension, budget, -1, "suite aggregation");
    std::vector<Variant> variants;
    std::vector<double> responses;
    for (const auto& [variant, values] : slice) {
        double sum = 0.0;
        for (const double v : values) sum += v;
        variants.push_back(variant);
        responses.push_back(sum / static_cast<double>(values.size()));
    }
    return Dataset(std::move(space), std::move(variants), std::move(responses),
                   Scenario::suite, 0, dimension, budget);
}

Dataset aggregate_problem_level(std::shared_ptr<const ConfigSpace> space,
                                std::span<const PrecisionCell> cells,
                                int problem_id,
                                int dimension,
                                std::int64_t budget) {
    const auto slice = collect_slice(*space, cells, dimension, budget, problem_id,
                                     "problem " + std::to_string(problem_id) + " aggregation");
    std::vector<Variant> variants;
    std::vector<double> responses;
    for (const auto& [variant, values] : slice) {
        variants.push_back(variant);
        responses.push_back(median(values));
    }
    return Dataset(std::move(space), std::move(variants), std::move(responses),
                   Scenario::problem, problem_id, dimension, budget);
}

std::vector<int> problems_in_slice(std::span<const PrecisionCell> cells,
                                   int dimension,
                                   std::int64_t budget) {
    std::vector<int> ids;
    for (const PrecisionCell& c : cells)
        if (c.dimension == dimension && c.budget == budget) ids.push_back(c.problem_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

void write_cells_csv(std::ostream& out, const ConfigSpace& space, std::span<const PrecisionCell> cells) {
    std::vector<std::string> header{"variant_id"};
    for (const auto& m : space.modules()) header.push_back(m.name);
    for (const char* c : {"dimension", "budget", "problem_id", "instance_id", "log_precision"})
        header.emplace_back(c);
    out << csv::join_record(header) << '\n';

    std::vector<std::string> row;
    for (const PrecisionCell& c : cells) {
        row.clear();
        row.push_back(std::to_string(space.rank(c.variant)));
        for (int j = 0; j < space.module_count(); ++j)
            row.push_back(space.module(j).options[c.variant[static_cast<std::size_t>(j)]]);
        row.push_back(std::to_string(c.dimension));
        row.push_back(std::to_string(c.budget));
        row.push_back(std::to_string(c.problem_id));
        row.push_back(std::to_string(c.instance_id));
        row.push_back(csv::format_double(c.log_precision));
        out << csv::join_record(row) << '\n';
    }
}

std::vector<PrecisionCell> read_cells_csv(std::istream& in, const ConfigSpace& space) {
    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw data_error("cells CSV: missing header");
    const std::vector<std::string> required{"dimension", "budget", "problem_id", "instance_id", "log_precision"};
    const ColumnMap map = ColumnMap::build(header, space, required, "cells CSV");

    std::vector<PrecisionCell> out;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (csv::read_record(in, fields)) {
        ++line;
        if (fields.size() != map.width)
            throw data_error("cells CSV: wrong field count on line " + std::to_string(line));
        const std::string context = "cells CSV line " + std::to_string(line);
        PrecisionCell c;
        c.variant = map.variant(fields, space, line, "cells CSV");
        c.dimension = static_cast<int>(csv::parse_int(map.field(fields, "dimension"), context));
        c.budget = csv::parse_int(map.field(fields, "budget"), context);
        c.problem_id = static_cast<int>(csv::parse_int(map.field(fields, "problem_id"), context));
        c.instance_id = static_cast<int>(csv::parse_int(map.field(fields, "instance_id"), context));
        c.log_precision = csv::parse_double(map.field(fields, "log_precision"), context);
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace fanova
