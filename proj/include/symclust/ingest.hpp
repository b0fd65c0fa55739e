#ifndef SYMCLUST_INGEST_HPP
#define SYMCLUST_INGEST_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symclust/types.hpp"

namespace symclust {

// Schema file: JSON listing variables (name, kind, categories, breaks,
// alpha, na_category, per_unit, weight_column), the weight scheme and the
// alpha normalization flag. Alphas are normalized at load when requested.
Schema load_schema(const std::string& path);
void save_schema(const Schema& schema, const std::string& path);

// Bin index for a numeric-binned variable: half-open bins
// (-inf, b0), [b0, b1), ..., [b_last, +inf); a missing value maps to the NA
// bucket. Throws std::domain_error when the value is missing and the
// variable has no NA category.
int categorize(std::optional<double> value, const VariableSpec& spec);

// One micro-data row of a unit: one raw string per schema variable, plus the
// per-variable custom weight value where the schema names a weight column.
struct MemberRow {
    std::vector<std::string> values;
    std::vector<double> custom_weights;
};

// Aggregates the member rows of one unit into a SymbolicObject: category
// counts scaled by unit_weight, n = sum f, p = f/n, w per the schema's
// weight scheme. Variables marked per_unit count only the first row.
SymbolicObject aggregate_unit(const std::string& id, std::span<const MemberRow> rows,
                              const Schema& schema, double unit_weight);

// Delimited micro-data (comma or tab, sniffed from the header): first column
// is the unit id, variable columns are matched to the schema by name,
// weight_column (if given) supplies the per-unit design weight. Rows of the
// same unit need not be adjacent; units keep first-appearance order.
std::vector<SymbolicObject> read_microdata(const std::string& path, const Schema& schema,
                                           const std::optional<std::string>& weight_column);

// Symbolic-object file: one JSON record {"id", "vars": [{"f", "w", "n"}...]}
// per line, numbers with 17 significant digits so reload is bit-exact.
std::vector<SymbolicObject> load_units(const std::string& path, const Schema* schema);
void save_units(std::span<const SymbolicObject> units, const std::string& path);
std::string units_to_string(std::span<const SymbolicObject> units);

struct GroupProfile {
    std::string name;
    int units = 0;
    std::vector<std::vector<double>> probs;  // per variable, a distribution template
};

struct SyntheticProfile {
    Schema schema;
    std::vector<GroupProfile> groups;
    int rows_min = 5;
    int rows_max = 15;
    double unit_weight_min = 1.0;
    double unit_weight_max = 1.0;
};

struct SyntheticData {
    std::vector<SymbolicObject> units;
    std::vector<int> labels;  // planted group per unit
};

SyntheticProfile load_profile(const std::string& path);

// Seeded draw: each unit samples a row count uniformly in
// [rows_min, rows_max], then that many category draws per variable from its
// group's template.
SyntheticData generate_synthetic(const SyntheticProfile& profile, std::uint64_t seed);

}  // namespace symclust

#endif  // SYMCLUST_INGEST_HPP
