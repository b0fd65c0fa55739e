#ifndef SYMCLUST_TYPES_HPP
#define SYMCLUST_TYPES_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace symclust {

// The six basic component dissimilarities delta(p, t). delta1 is the squared
// Euclidean term; the others rescale it by powers of t and/or p.
enum class DissimKind { delta1, delta2, delta3, delta4, delta5, delta6 };

enum class VariableKind { categorical, numeric_binned };

// How per-component weights w are filled when building objects:
//   ones            w = 1
//   per_variable_n  w = n_i, the variable's value count (default)
//   custom_column   w = a per-unit column value, times the unit weight
enum class WeightScheme { ones, per_variable_n, custom_column };

const char* to_string(DissimKind kind);
const char* to_string(VariableKind kind);
const char* to_string(WeightScheme scheme);
DissimKind parse_dissim_kind(const std::string& name);
VariableKind parse_variable_kind(const std::string& name);
WeightScheme parse_weight_scheme(const std::string& name);

struct VariableSpec {
    std::string name;
    VariableKind kind = VariableKind::categorical;
    std::vector<std::string> categories;  // length k_i, NA bucket last if any
    std::vector<double> breaks;           // numeric_binned: ascending, size = non-NA categories - 1
    bool na_category = false;
    double alpha = 1.0;
    // Counted once per unit instead of once per member row (share-type
    // variables such as a one-hot country of residence).
    bool per_unit = false;
    // Micro-data column supplying the per-variable weight under
    // WeightScheme::custom_column.
    std::string weight_column;

    std::size_t arity() const { return categories.size(); }
    std::size_t non_na_categories() const {
        return categories.size() - (na_category ? 1 : 0);
    }
};

struct Schema {
    std::vector<VariableSpec> variables;
    bool alpha_normalized = false;
    WeightScheme weight_scheme = WeightScheme::per_variable_n;

    std::size_t size() const { return variables.size(); }
    std::size_t arity(std::size_t i) const { return variables[i].arity(); }

    // Empty when the schema is well-formed.
    std::vector<std::string> validate() const;

    // Rescales alphas to sum to one and sets alpha_normalized.
    void normalize_alphas();
};

// A unit: per variable, frequencies f, their count n = sum f, the
// distribution p = f / n (zero vector when n = 0), and component weights w.
struct SymbolicObject {
    std::string id;
    std::vector<std::vector<double>> freq;
    std::vector<double> count;
    std::vector<std::vector<double>> prob;
    std::vector<std::vector<double>> weight;

    std::size_t num_variables() const { return freq.size(); }

    // Builds p and n from f. Weights are filled per the scheme; for
    // custom_column the caller supplies one value per variable.
    static SymbolicObject from_frequencies(std::string id,
                                           std::vector<std::vector<double>> freq,
                                           WeightScheme scheme,
                                           const std::vector<double>* custom_weights = nullptr);

    // Loader path: f, w and n come from a file, p is recomputed as f / n.
    static SymbolicObject from_parts(std::string id,
                                     std::vector<std::vector<double>> freq,
                                     std::vector<std::vector<double>> weight,
                                     std::vector<double> count);
};

// Cluster representative. Componentwise nonnegative; not required to be a
// distribution.
struct Leader {
    std::vector<std::vector<double>> t;

    static Leader zeros(const Schema& schema);
    static Leader from_distributions(const SymbolicObject& x);
};

// Componentwise sums over cluster members feeding every closed form:
//   w = sum w_x          P = sum w_x p_x       Q = sum w_x p_x^2
//   H = sum w_x / p_x    G = sum w_x / p_x^2   (H, G over members with p_x > 0)
//   w_pos = sum w_x over members with p_x > 0 (the weight mass delta5's
//   stationary point actually sees once zero-p members drop out)
// All six are additive over disjoint unions.
struct ClusterAggregates {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> w_pos;
    std::vector<std::vector<double>> P;
    std::vector<std::vector<double>> Q;
    std::vector<std::vector<double>> H;
    std::vector<std::vector<double>> G;

    static ClusterAggregates zeros(const Schema& schema);
    ClusterAggregates& operator+=(const ClusterAggregates& other);
    friend ClusterAggregates operator+(ClusterAggregates a, const ClusterAggregates& b) {
        a += b;
        return a;
    }
};

struct Clustering {
    std::vector<int> labels;  // unit index -> cluster index in [0, k)
    std::vector<Leader> leaders;
    std::vector<double> cluster_errors;
    double total_error = 0.0;
    DissimKind kind = DissimKind::delta1;

    int k() const { return static_cast<int>(leaders.size()); }
};

// Checks a unit against the schema: arities, nonnegative f and w, n = sum f,
// p = f / n with sum p = 1 where n > 0. Violations are returned, not thrown.
std::vector<std::string> validate_object(const SymbolicObject& x, const Schema& schema);

}  // namespace symclust

#endif  // SYMCLUST_TYPES_HPP
