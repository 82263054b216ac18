#include "core/reports.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fanova {

void write_effects_csv(std::ostream& out, const EffectDecomposition& d) {
    out << "subset,order,fraction_percent\n";
    std::vector<std::string> row;
    for (std::size_t i = 0; i < d.keys.size(); ++i) {
        row.clear();
        row.push_back(subset_label(*d.space, d.keys[i]));
        row.push_back(std::to_string(d.keys[i].order()));
        row.push_back(csv::format_percent(100.0 * d.fractions[i]));
        out << csv::join_record(row) << '\n';
    }
}

EffectVector read_effects_csv(std::istream& in, int problem_id) {
    std::vector<std::string> header;
    if (!csv::read_record(in, header)) throw data_error("effects CSV: missing header");
    if (header != std::vector<std::string>{"subset", "order", "fraction_percent"})
        throw data_error("effects CSV: header must be subset,order,fraction_percent");
    EffectVector v;
    v.problem_id = problem_id;
    std::vector<std::string> fields;
    std::size_t line = 1;
    while (csv::read_record(in, fields)) {
        ++line;
        if (fields.size() != 3)
            throw data_error("effects CSV: wrong field count on line " + std::to_string(line));
        const std::string context = "effects CSV line " + std::to_string(line);
        const std::int64_t order = csv::parse_int(fields[1], context);
        if (order > 3) continue;  // effect vectors stop at triplets
        v.subset_labels.push_back(fields[0]);
        v.values.push_back(csv::parse_double(fields[2], context) / 100.0);
    }
    if (v.values.empty()) throw data_error("effects CSV: no rows");
    return v;
}

void write_summary_csv(std::ostream& out, const std::string& algorithm, int dimension,
                       std::int64_t budget, const SummaryRow& row) {
    out << "algorithm,dimension,budget,individual,pairwise,triple,total\n";
    const std::vector<std::string> fields{algorithm,
                                          std::to_string(dimension),
                                          std::to_string(budget),
                                          csv::format_percent(row.individual),
                                          csv::format_percent(row.pairwise),
                                          csv::format_percent(row.triple),
                                          csv::format_percent(row.total)};
    out << csv::join_record(fields) << '\n';
}

void write_pairs_csv(std::ostream& out, const EffectDecomposition& d) {
    out << "module1,module2,pairwise,individual1,individual2,pair_total\n";
    std::vector<std::string> fields;
    for (const PairRow& row : pair_table(d)) {
        fields.clear();
        fields.push_back(d.space->module(row.module1).name);
        fields.push_back(d.space->module(row.module2).name);
        fields.push_back(csv::format_percent(row.pairwise));
        fields.push_back(csv::format_percent(row.individual1));
        fields.push_back(csv::format_percent(row.individual2));
        fields.push_back(csv::format_percent(row.pair_total));
        out << csv::join_record(fields) << '\n';
    }
}

void write_triplets_csv(std::ostream& out, const EffectDecomposition& d) {
    out << "module1,module2,module3,triplet,triplet_total\n";
    std::vector<std::string> fields;
    for (const TripletRow& row : triplet_table(d)) {
        fields.clear();
        fields.push_back(d.space->module(row.module1).name);
        fields.push_back(d.space->module(row.module2).name);
        fields.push_back(d.space->module(row.module3).name);
        fields.push_back(csv::format_percent(row.triplet));
        fields.push_back(csv::format_percent(row.triplet_total));
        out << csv::join_record(fields) << '\n';
    }
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path + "' for digesting");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[1 << 14];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

}  // namespace fanova
