#include "symclust/dissim.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace symclust {

namespace {

[[noreturn]] void throw_zero_t(DissimKind kind, double p) {
    throw std::domain_error(std::string(to_string(kind)) +
                            " undefined for t = 0 with p = " + std::to_string(p));
}

// Ratio of two nonnegative aggregate sums with the degenerate convention:
// 0/0 -> 0 (an all-zero component), positive/0 -> internal inconsistency.
double agg_ratio(double num, double den, DissimKind kind) {
    if (den > 0.0) return num / den;
    if (num == 0.0) return 0.0;
    throw std::logic_error(std::string("degenerate denominator for ") +
                           to_string(kind) + ": numerator " + std::to_string(num) +
                           " with zero denominator");
}

}  // namespace

double delta(DissimKind kind, double p, double t) {
    const double d = p - t;
    switch (kind) {
        case DissimKind::delta1:
            return d * d;
        case DissimKind::delta2:
            if (p == 0.0) return 1.0;  // ((0-t)/t)^2 for every t, incl. the t=0 limit
            if (t == 0.0) throw_zero_t(kind, p);
            return (d / t) * (d / t);
        case DissimKind::delta3:
            if (t == 0.0) {
                if (p == 0.0) return 0.0;
                throw_zero_t(kind, p);
            }
            return d * d / t;
        case DissimKind::delta4:
            if (p == 0.0) return 0.0;
            return (d / p) * (d / p);
        case DissimKind::delta5:
            if (p == 0.0) return 0.0;
            return d * d / p;
        case DissimKind::delta6:
            if (p == 0.0) return 0.0;
            if (t == 0.0) throw_zero_t(kind, p);
            return d * d / (p * t);
    }
    throw std::logic_error("unreachable dissimilarity kind");
}

namespace {

template <bool PoleToInf>
double variable_dissim_impl(const SymbolicObject& x, std::size_t var,
                            std::span<const double> t, DissimKind kind) {
    const auto& p = x.prob[var];
    const auto& w = x.weight[var];
    if (t.size() != p.size())
        throw std::invalid_argument("leader arity mismatch on variable " +
                                    std::to_string(var));
    if (x.count[var] == 0.0) return 0.0;  // empty variable, weight-0 semantics
    double sum = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (w[j] == 0.0) continue;  // zero weight kills the component, even if delta is undefined
        if constexpr (PoleToInf) {
            if (t[j] == 0.0 && p[j] > 0.0 &&
                (kind == DissimKind::delta2 || kind == DissimKind::delta3 ||
                 kind == DissimKind::delta6))
                return std::numeric_limits<double>::infinity();
        }
        sum += w[j] * delta(kind, p[j], t[j]);
    }
    return sum;
}

template <bool PoleToInf>
double object_dissim_impl(const SymbolicObject& x, const Leader& leader,
                          const Schema& schema, DissimKind kind) {
    if (x.num_variables() != schema.size() || leader.t.size() != schema.size())
        throw std::invalid_argument("unit/leader/schema variable counts differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const double alpha = schema.variables[i].alpha;
        if (alpha == 0.0) continue;
        sum += alpha * variable_dissim_impl<PoleToInf>(x, i, leader.t[i], kind);
    }
    return sum;
}

}  // namespace

double variable_dissim(const SymbolicObject& x, std::size_t var,
                       std::span<const double> t, DissimKind kind) {
    return variable_dissim_impl<false>(x, var, t, kind);
}

double object_dissim(const SymbolicObject& x, const Leader& leader,
                     const Schema& schema, DissimKind kind) {
    return object_dissim_impl<false>(x, leader, schema, kind);
}

double object_dissim_or_inf(const SymbolicObject& x, const Leader& leader,
                            const Schema& schema, DissimKind kind) {
    return object_dissim_impl<true>(x, leader, schema, kind);
}

double cluster_error(std::span<const SymbolicObject* const> members,
                     const Leader& leader, const Schema& schema, DissimKind kind) {
    double sum = 0.0;
    for (const SymbolicObject* x : members) sum += object_dissim(*x, leader, schema, kind);
    return sum;
}

ClusterAggregates compute_aggregates(std::span<const SymbolicObject* const> members,
                                     const Schema& schema) {
    ClusterAggregates agg = ClusterAggregates::zeros(schema);
    for (const SymbolicObject* x : members) {
        if (x->num_variables() != schema.size())
            throw std::invalid_argument("unit " + x->id + " does not match schema");
        for (std::size_t i = 0; i < schema.size(); ++i) {
            if (x->count[i] == 0.0) continue;  // contributes 0 to every dissimilarity
            const auto& p = x->prob[i];
            const auto& w = x->weight[i];
            for (std::size_t j = 0; j < p.size(); ++j) {
                agg.w[i][j] += w[j];
                agg.P[i][j] += w[j] * p[j];
                agg.Q[i][j] += w[j] * p[j] * p[j];
                if (p[j] > 0.0) {
                    agg.w_pos[i][j] += w[j];
                    agg.H[i][j] += w[j] / p[j];
                    agg.G[i][j] += w[j] / (p[j] * p[j]);
                }
            }
        }
    }
    return agg;
}

Leader leader_from_aggregates(const ClusterAggregates& agg, DissimKind kind) {
    Leader leader;
    leader.t.resize(agg.w.size());
    for (std::size_t i = 0; i < agg.w.size(); ++i) {
        const std::size_t k = agg.w[i].size();
        leader.t[i].resize(k);
        for (std::size_t j = 0; j < k; ++j) {
            double t = 0.0;
            switch (kind) {
                case DissimKind::delta1:
                    t = agg_ratio(agg.P[i][j], agg.w[i][j], kind);
                    break;
                case DissimKind::delta2:
                    t = agg_ratio(agg.Q[i][j], agg.P[i][j], kind);
                    break;
                case DissimKind::delta3:
                    t = std::sqrt(agg_ratio(agg.Q[i][j], agg.w[i][j], kind));
                    break;
                case DissimKind::delta4:
                    t = agg_ratio(agg.H[i][j], agg.G[i][j], kind);
                    break;
                case DissimKind::delta5:
                    t = agg_ratio(agg.w_pos[i][j], agg.H[i][j], kind);
                    break;
                case DissimKind::delta6:
                    t = std::sqrt(agg_ratio(agg.P[i][j], agg.H[i][j], kind));
                    break;
            }
            leader.t[i][j] = t;
        }
    }
    return leader;
}

Leader optimal_leader(std::span<const SymbolicObject* const> members,
                      const Schema& schema, DissimKind kind) {
    if (members.empty())
        throw std::invalid_argument("optimal_leader: empty cluster");
    return leader_from_aggregates(compute_aggregates(members, schema), kind);
}

std::vector<const SymbolicObject*> collect_members(
    const std::vector<SymbolicObject>& units, const std::vector<int>& labels, int c) {
    std::vector<const SymbolicObject*> out;
    for (std::size_t i = 0; i < units.size(); ++i)
        if (labels[i] == c) out.push_back(&units[i]);
    return out;
}

}  // namespace symclust
