#ifndef FANOVA_DATASET_HPP
#define FANOVA_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "core/config_space.hpp"

namespace fanova {

enum class Scenario { suite, problem, synthetic };

std::string scenario_name(Scenario s);

// Rows of (variant, response) for one analysis scenario. Rows are stored
// sorted by lexicographic variant order and are unique per variant.
class Dataset {
  public:
    Dataset(std::shared_ptr<const ConfigSpace> space,
            std::vector<Variant> variants,
            std::vector<double> responses,
            Scenario scenario,
            int problem_id = 0,
            int dimension = 0,
            std::int64_t budget = 0);

    const ConfigSpace& space() const { return *space_; }
    std::shared_ptr<const ConfigSpace> space_ptr() const { return space_; }
    std::size_t row_count() const { return variants_.size(); }
    const std::vector<Variant>& variants() const { return variants_; }
    const std::vector<double>& responses() const { return responses_; }
    const Variant& variant(std::size_t row) const { return variants_[row]; }
    double response(std::size_t row) const { return responses_[row]; }

    Scenario scenario() const { return scenario_; }
    int problem_id() const { return problem_id_; }
    int dimension() const { return dimension_; }
    std::int64_t budget() const { return budget_; }

  private:
    std::shared_ptr<const ConfigSpace> space_;
    std::vector<Variant> variants_;
    std::vector<double> responses_;
    Scenario scenario_;
    int problem_id_;
    int dimension_;
    std::int64_t budget_;
};

/// Writes the dataset CSV: variant_id,<module columns>,response.
void write_dataset_csv(std::ostream& out, const Dataset& data);

/// Reads a dataset CSV produced by write_dataset_csv (scenario: synthetic).
Dataset read_dataset_csv(std::istream& in, std::shared_ptr<const ConfigSpace> space);

}  // namespace fanova

#endif
