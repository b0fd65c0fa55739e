#include "symclust/types.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace symclust {

namespace {

constexpr double kProbSumTol = 1e-9;
constexpr double kCountTol = 1e-9;
constexpr double kAlphaSumTol = 1e-12;

std::string var_prefix(std::size_t i, const std::string& name) {
    std::ostringstream os;
    os << "variable " << i << " (" << name << "): ";
    return os.str();
}

}  // namespace

const char* to_string(DissimKind kind) {
    switch (kind) {
        case DissimKind::delta1: return "d1";
        case DissimKind::delta2: return "d2";
        case DissimKind::delta3: return "d3";
        case DissimKind::delta4: return "d4";
        case DissimKind::delta5: return "d5";
        case DissimKind::delta6: return "d6";
    }
    return "?";
}

const char* to_string(VariableKind kind) {
    return kind == VariableKind::categorical ? "categorical" : "numeric-binned";
}

const char* to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::ones: return "ones";
        case WeightScheme::per_variable_n: return "per-variable-n";
        case WeightScheme::custom_column: return "custom-column";
    }
    return "?";
}

DissimKind parse_dissim_kind(const std::string& name) {
    static const std::pair<const char*, DissimKind> table[] = {
        {"d1", DissimKind::delta1}, {"delta1", DissimKind::delta1},
        {"d2", DissimKind::delta2}, {"delta2", DissimKind::delta2},
        {"d3", DissimKind::delta3}, {"delta3", DissimKind::delta3},
        {"d4", DissimKind::delta4}, {"delta4", DissimKind::delta4},
        {"d5", DissimKind::delta5}, {"delta5", DissimKind::delta5},
        {"d6", DissimKind::delta6}, {"delta6", DissimKind::delta6},
    };
    for (const auto& [key, kind] : table)
        if (name == key) return kind;
    throw std::invalid_argument("unknown dissimilarity kind: '" + name +
                                "' (expected d1..d6)");
}

VariableKind parse_variable_kind(const std::string& name) {
    if (name == "categorical") return VariableKind::categorical;
    if (name == "numeric-binned") return VariableKind::numeric_binned;
    throw std::invalid_argument("unknown variable kind: '" + name + "'");
}

WeightScheme parse_weight_scheme(const std::string& name) {
    if (name == "ones") return WeightScheme::ones;
    if (name == "per-variable-n") return WeightScheme::per_variable_n;
    if (name == "custom-column") return WeightScheme::custom_column;
    throw std::invalid_argument("unknown weight scheme: '" + name + "'");
}

std::vector<std::string> Schema::validate() const {
    std::vector<std::string> out;
    if (variables.empty()) out.push_back("schema has no variables");
    double alpha_sum = 0.0;
    for (std::size_t i = 0; i < variables.size(); ++i) {
        const VariableSpec& v = variables[i];
        const std::string at = var_prefix(i, v.name);
        if (v.categories.empty()) out.push_back(at + "no categories");
        std::set<std::string> seen;
        for (const auto& c : v.categories)
            if (!seen.insert(c).second)
                out.push_back(at + "duplicate category label '" + c + "'");
        if (v.alpha < 0.0) out.push_back(at + "alpha < 0");
        if (!std::isfinite(v.alpha)) out.push_back(at + "alpha not finite");
        if (!v.breaks.empty()) {
            if (v.kind != VariableKind::numeric_binned)
                out.push_back(at + "breaks given for a categorical variable");
            for (std::size_t b = 1; b < v.breaks.size(); ++b)
                if (!(v.breaks[b - 1] < v.breaks[b]))
                    out.push_back(at + "breaks not strictly ascending");
            if (v.non_na_categories() >= 1 &&
                v.breaks.size() != v.non_na_categories() - 1)
                out.push_back(at + "breaks length must be non-NA categories - 1");
        } else if (v.kind == VariableKind::numeric_binned && v.non_na_categories() > 1) {
            out.push_back(at + "numeric-binned variable needs breaks");
        }
        alpha_sum += v.alpha;
    }
    if (alpha_normalized && std::fabs(alpha_sum - 1.0) > kAlphaSumTol)
        out.push_back("alphas marked normalized but sum to " + std::to_string(alpha_sum));
    return out;
}

void Schema::normalize_alphas() {
    double sum = 0.0;
    for (const auto& v : variables) sum += v.alpha;
    if (!(sum > 0.0))
        throw std::invalid_argument("cannot normalize alphas: sum is not positive");
    for (auto& v : variables) v.alpha /= sum;
    alpha_normalized = true;
}

SymbolicObject SymbolicObject::from_frequencies(std::string id,
                                                std::vector<std::vector<double>> freq,
                                                WeightScheme scheme,
                                                const std::vector<double>* custom_weights) {
    SymbolicObject x;
    x.id = std::move(id);
    x.freq = std::move(freq);
    const std::size_t m = x.freq.size();
    x.count.resize(m);
    x.prob.resize(m);
    x.weight.resize(m);
    if (scheme == WeightScheme::custom_column &&
        (custom_weights == nullptr || custom_weights->size() != m))
        throw std::invalid_argument("custom-column weights: need one value per variable");
    for (std::size_t i = 0; i < m; ++i) {
        double n = 0.0;
        for (double f : x.freq[i]) {
            if (f < 0.0) throw std::invalid_argument("negative frequency in unit " + x.id);
            n += f;
        }
        x.count[i] = n;
        x.prob[i].assign(x.freq[i].size(), 0.0);
        if (n > 0.0)
            for (std::size_t j = 0; j < x.freq[i].size(); ++j)
                x.prob[i][j] = x.freq[i][j] / n;
        double wv = 1.0;
        switch (scheme) {
            case WeightScheme::ones: wv = 1.0; break;
            case WeightScheme::per_variable_n: wv = n; break;
            case WeightScheme::custom_column: wv = (*custom_weights)[i]; break;
        }
        if (wv < 0.0) throw std::invalid_argument("negative weight in unit " + x.id);
        x.weight[i].assign(x.freq[i].size(), wv);
    }
    return x;
}

SymbolicObject SymbolicObject::from_parts(std::string id,
                                          std::vector<std::vector<double>> freq,
                                          std::vector<std::vector<double>> weight,
                                          std::vector<double> count) {
    SymbolicObject x;
    x.id = std::move(id);
    x.freq = std::move(freq);
    x.weight = std::move(weight);
    x.count = std::move(count);
    if (x.weight.size() != x.freq.size() || x.count.size() != x.freq.size())
        throw std::invalid_argument("unit " + x.id + ": f/w/n variable counts differ");
    x.prob.resize(x.freq.size());
    for (std::size_t i = 0; i < x.freq.size(); ++i) {
        if (x.weight[i].size() != x.freq[i].size())
            throw std::invalid_argument("unit " + x.id + ": f/w arity mismatch");
        x.prob[i].assign(x.freq[i].size(), 0.0);
        if (x.count[i] > 0.0)
            for (std::size_t j = 0; j < x.freq[i].size(); ++j)
                x.prob[i][j] = x.freq[i][j] / x.count[i];
    }
    return x;
}

Leader Leader::zeros(const Schema& schema) {
    Leader l;
    l.t.resize(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i)
        l.t[i].assign(schema.arity(i), 0.0);
    return l;
}

Leader Leader::from_distributions(const SymbolicObject& x) {
    Leader l;
    l.t = x.prob;
    return l;
}

ClusterAggregates ClusterAggregates::zeros(const Schema& schema) {
    ClusterAggregates a;
    auto shape = [&schema](std::vector<std::vector<double>>& field) {
        field.resize(schema.size());
        for (std::size_t i = 0; i < schema.size(); ++i)
            field[i].assign(schema.arity(i), 0.0);
    };
    shape(a.w);
    shape(a.w_pos);
    shape(a.P);
    shape(a.Q);
    shape(a.H);
    shape(a.G);
    return a;
}

ClusterAggregates& ClusterAggregates::operator+=(const ClusterAggregates& other) {
    auto add = [](std::vector<std::vector<double>>& dst,
                  const std::vector<std::vector<double>>& src) {
        if (dst.size() != src.size())
            throw std::invalid_argument("aggregate shapes differ");
        for (std::size_t i = 0; i < dst.size(); ++i) {
            if (dst[i].size() != src[i].size())
                throw std::invalid_argument("aggregate shapes differ");
            for (std::size_t j = 0; j < dst[i].size(); ++j) dst[i][j] += src[i][j];
        }
    };
    add(w, other.w);
    add(w_pos, other.w_pos);
    add(P, other.P);
    add(Q, other.Q);
    add(H, other.H);
    add(G, other.G);
    return *this;
}

std::vector<std::string> validate_object(const SymbolicObject& x, const Schema& schema) {
    std::vector<std::string> out;
    const std::string unit = "unit " + x.id + ": ";
    if (x.num_variables() != schema.size()) {
        out.push_back(unit + "has " + std::to_string(x.num_variables()) +
                      " variables, schema has " + std::to_string(schema.size()));
        return out;
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const std::string at = unit + var_prefix(i, schema.variables[i].name);
        const std::size_t k = schema.arity(i);
        if (x.freq[i].size() != k || x.prob[i].size() != k || x.weight[i].size() != k) {
            out.push_back(at + "arity mismatch (expected " + std::to_string(k) + ")");
            continue;
        }
        double fsum = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (!(x.freq[i][j] >= 0.0)) out.push_back(at + "negative or NaN frequency");
            if (!(x.weight[i][j] >= 0.0)) out.push_back(at + "negative or NaN weight");
            fsum += x.freq[i][j];
        }
        if (std::fabs(fsum - x.count[i]) > kCountTol * std::max(1.0, std::fabs(fsum)))
            out.push_back(at + "n does not equal sum of frequencies");
        if (x.count[i] > 0.0) {
            double psum = 0.0;
            bool consistent = true;
            for (std::size_t j = 0; j < k; ++j) {
                psum += x.prob[i][j];
                if (std::fabs(x.prob[i][j] * x.count[i] - x.freq[i][j]) >
                    kCountTol * std::max(1.0, x.freq[i][j]))
                    consistent = false;
            }
            if (std::fabs(psum - 1.0) > kProbSumTol)
                out.push_back(at + "distribution does not sum to 1");
            if (!consistent) out.push_back(at + "p is not f / n");
        } else {
            for (std::size_t j = 0; j < k; ++j)
                if (x.prob[i][j] != 0.0)
                    out.push_back(at + "n = 0 but p is not the zero vector");
        }
    }
    return out;
}

}  // namespace symclust
