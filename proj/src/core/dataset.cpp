#include "core/dataset.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fanova {

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::suite: return "suite";
        case Scenario::problem: return "problem";
        case Scenario::synthetic: return "synthetic";
    }
    return "unknown";
}

Dataset::Dataset(std::shared_ptr<const ConfigSpace> space,
                 std::vector<Variant> variants,
                 std::vector<double> responses,
                 Scenario scenario,
                 int problem_id,
                 int dimension,
                 std::int64_t budget)
    : space_(std::move(space)),
      scenario_(scenario),
      problem_id_(problem_id),
      dimension_(dimension),
      budget_(budget) {
    if (!space_) throw internal_error("dataset without config space");
    if (variants.size() != responses.size()) throw internal_error("dataset row arrays disagree");
    if (variants.empty()) throw data_error("dataset has no rows");

    std::vector<std::int64_t> ranks(variants.size());
    for (std::size_t i = 0; i < variants.size(); ++i) ranks[i] = space_->rank(variants[i]);

    std::vector<std::size_t> order(variants.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

    variants_.reserve(variants.size());
    responses_.reserve(responses.size());
    std::int64_t previous = -1;
    for (const std::size_t i : order) {
        if (ranks[i] == previous)
            throw data_error("dataset contains duplicate variant (rank " + std::to_string(ranks[i]) + ")");
        previous = ranks[i];
        variants_.push_back(std::move(variants[i]));
        responses_.push_back(responses[i]);
    }
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    std::vector<std::string> header{"variant_id"};
    for (const auto& m : data.space().modules()) header.push_back(m.name);
    header.emplace_back("response");
    out << csv::join_record(header) << '\n';

    std::vector<std::string> row;
    for (std::size_t i = 0; i < data.row_count(); ++i) {
        row.clear();
        row.push_back(std::to_string(data.space().rank(data.variant(i))));
        for (int j = 0; j < data.space().module_count(); ++j)
            row.push_back(data.space().module(j).options[data.variant(i)[static_cast<std::size_t>(j)]]);
        row.push_back(csv::format_double(data.response(i)));
        out << csv::join_record(row) << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in, std::shared_ptr<const ConfigSpace> space) {
    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw data_error("dataset CSV: missing header");

    const int n = space->module_count();
    std::vector<int> module_column(static_cast<std::size_t>(n), -1);
    int response_column = -1;
    for (int c = 0; c < static_cast<int>(header.size()); ++c) {
        const std::string& name = header[static_cast<std::size_t>(c)];
        if (name == "variant_id") continue;
        if (name == "response") {
            response_column = c;
            continue;
        }
        const int mi = space->find_module(name);
        if (mi < 0) throw data_error("dataset CSV: unexpected column '" + name + "'");
        if (module_column[static_cast<std::size_t>(mi)] >= 0)
            throw data_error("dataset CSV: duplicate column '" + name + "'");
        module_column[static_cast<std::size_t>(mi)] = c;
    }
    if (response_column < 0) throw data_error("dataset CSV: missing 'response' column");
    for (int j = 0; j < n; ++j)
        if (module_column[static_cast<std::size_t>(j)] < 0)
            throw data_error("dataset CSV: missing module column '" + space->module(j).name + "'");

    std::vector<Variant> variants;
    std::vector<double> responses;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (csv::read_record(in, fields)) {
        ++line;
        if (fields.size() != header.size())
            throw data_error("dataset CSV: wrong field count on line " + std::to_string(line));
        Variant v(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const std::string& label = fields[static_cast<std::size_t>(module_column[static_cast<std::size_t>(j)])];
            const int oi = space->find_option(j, label);
            if (oi < 0)
                throw data_error("dataset CSV: unknown option '" + label + "' for module '" +
                                 space->module(j).name + "' on line " + std::to_string(line));
            v[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(oi);
        }
        variants.push_back(std::move(v));
        responses.push_back(csv::parse_double(fields[static_cast<std::size_t>(response_column)],
                                              "dataset CSV line " + std::to_string(line)));
    }
    return Dataset(std::move(space), std::move(variants), std::move(responses), Scenario::synthetic);
}

}  // namespace fanova
