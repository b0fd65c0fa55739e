#ifndef SYMCLUST_DISSIM_HPP
#define SYMCLUST_DISSIM_HPP

#include <span>

#include "symclust/types.hpp"

namespace symclust {

// Basic componentwise dissimilarity delta(p, t):
//   d1 (p-t)^2        d2 ((p-t)/t)^2    d3 (p-t)^2/t
//   d4 ((p-t)/p)^2    d5 (p-t)^2/p      d6 (p-t)^2/(p t)
// Zero-p rule: d4, d5, d6 are 0 whenever p = 0. d2 at p = 0 is identically 1
// and d3 at p = 0 equals t; both extend continuously to t = 0 (1 and 0),
// which is what keeps the merge identities exact on all-zero components.
// Throws std::domain_error for d2, d3, d6 when t = 0 with p > 0.
double delta(DissimKind kind, double p, double t);

// d_i(X, T) = sum_j w_ij * delta(p_ij, t_j) for one variable.
double variable_dissim(const SymbolicObject& x, std::size_t var,
                       std::span<const double> t, DissimKind kind);

// d(X, T) = sum_i alpha_i * d_i(X, T). Variables with alpha = 0 are skipped
// entirely (supplementary variables never touch the dissimilarity).
double object_dissim(const SymbolicObject& x, const Leader& leader,
                     const Schema& schema, DissimKind kind);

// Assignment variant: the t = 0 pole of d2/d3/d6 yields +infinity (the
// formulas' limit as t -> 0+) instead of a domain error, so rankings over
// candidate leaders treat such a leader as unattainably far. A cluster's own
// leader never poles against its members.
double object_dissim_or_inf(const SymbolicObject& x, const Leader& leader,
                            const Schema& schema, DissimKind kind);

// p(C, T) = sum over members of d(X, T); 0 for an empty cluster. Members are
// summed in the order given, so callers pass them in unit order.
double cluster_error(std::span<const SymbolicObject* const> members,
                     const Leader& leader, const Schema& schema, DissimKind kind);

ClusterAggregates compute_aggregates(std::span<const SymbolicObject* const> members,
                                     const Schema& schema);

// Closed-form optimal leader from accumulated aggregates:
//   d1 P/w   d2 Q/P   d3 sqrt(Q/w)   d4 H/G   d5 w_pos/H   d6 sqrt(P/H)
// A component whose members all have p = 0 (or all weight 0) gets leader 0.
// Throws std::logic_error if a denominator is 0 while the numerator is not;
// that cannot happen for aggregates of valid nonnegative inputs.
Leader leader_from_aggregates(const ClusterAggregates& agg, DissimKind kind);

// leader_from_aggregates over the members' accumulated sums. C must be
// nonempty.
Leader optimal_leader(std::span<const SymbolicObject* const> members,
                      const Schema& schema, DissimKind kind);

// Members of cluster `c` in unit order, for a flat label vector.
std::vector<const SymbolicObject*> collect_members(
    const std::vector<SymbolicObject>& units, const std::vector<int>& labels, int c);

}  // namespace symclust

#endif  // SYMCLUST_DISSIM_HPP
