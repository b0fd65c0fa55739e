#ifndef SYMCLUST_AGGLOM_HPP
#define SYMCLUST_AGGLOM_HPP

#include <span>
#include <string>
#include <vector>

#include "symclust/types.hpp"

namespace symclust {

struct MergeRecord {
    int left = -1;
    int right = -1;
    double height = 0.0;  // D(Cu, Cv) at merge time
    int new_node = -1;
};

struct DendrogramNode {
    int id = -1;
    int left = -1;   // child node ids; -1 for leaves
    int right = -1;
    double height = 0.0;
    Leader leader;
    int member_count = 0;
    ClusterAggregates aggregates;
    std::string label;  // leaves only: external id
};

struct Dendrogram {
    std::vector<DendrogramNode> nodes;  // 0..n-1 leaves, then internal nodes
    std::vector<MergeRecord> merges;    // n-1 records in merge order
    int leaf_count = 0;
    int clamped_negative_heights = 0;   // D < 0 within rounding, clamped to 0
    int negative_beyond_tolerance = 0;  // D < -1e-12: would indicate a real defect
    int nonmonotone_merges = 0;         // merge height below the previous one
};

// A dendrogram leaf: a unit, or a leaders-stage cluster carrying the
// aggregates accumulated over its members (what makes chaining the two
// methods exact rather than approximate).
struct AgglomItem {
    std::string label;
    Leader leader;
    ClusterAggregates aggregates;
    int member_count = 1;
};

AgglomItem item_from_unit(const SymbolicObject& x, const Schema& schema, DissimKind kind);
AgglomItem item_from_cluster(std::span<const SymbolicObject* const> members,
                             const Schema& schema, DissimKind kind, std::string label);

// Leader of the merged cluster from the two sides' aggregates. Aggregates
// are additive, so this equals the closed-form leader of the union.
Leader merged_leader(const ClusterAggregates& u_agg, const ClusterAggregates& v_agg,
                     DissimKind kind);

// Between-cluster dissimilarity D(Cu, Cv) = p(Cu u Cv) - p(Cu) - p(Cv),
// evaluated via the closed forms (u, v, z are the side and merged leaders):
//   d1 sum w_u w_v/(w_u+w_v) (u-v)^2        d2 P_u/u ((u-z)/z)^2 + ...
//   d3 w_u (u-z)^2/z + ...                  d4 G_u (u-z)^2 + ...
//   d5 w_u (u-z)^2/u + ...                  d6 P_u/u (u-z)^2/(u z) + ...
// Components where a side's relevant aggregates vanish contribute 0 for that
// side. Terms are alpha-weighted and summed over variables and components.
double between_dissim(const ClusterAggregates& u_agg, const ClusterAggregates& v_agg,
                      DissimKind kind, const Schema& schema);

// Stored-matrix agglomeration: n-1 merges, each picking the pair with
// minimal D (ties by smallest (left, right) node-id pair), recomputing the
// new cluster's distances from its summed aggregates. Negative heights
// within -1e-12 are clamped to 0 and counted.
Dendrogram agglomerate(std::span<const AgglomItem> items, const Schema& schema,
                       DissimKind kind);

// Flat clustering with k clusters: replays merges until k groups remain.
// Returns one label in [0, k) per leaf, numbered by first leaf occurrence.
std::vector<int> cut_merges(const std::vector<MergeRecord>& merges, int leaf_count, int k);

// Cut at height h: replays merges in merge order while height <= h.
std::vector<int> cut_merges_height(const std::vector<MergeRecord>& merges,
                                   int leaf_count, double height);

struct GapSuggestion {
    // gap[i] = height of merge i+1 minus height of merge i; the largest gap
    // over cuts with at least 3 clusters drives suggested_k.
    std::vector<double> heights;  // in merge order
    int suggested_k = 0;
    double largest_gap = 0.0;
};

GapSuggestion suggest_k(const std::vector<MergeRecord>& merges, int leaf_count);

struct WardSpecialCaseReport {
    bool applicable = false;  // all component weights equal to 1
    int pairs_checked = 0;
    double max_abs_error = 0.0;
};

// Diagnostic for the unit-weight simplification D = |Cu||Cv|/(|Cu|+|Cv|) d(u,v)
// under d1: compares it against the aggregate-based form on singleton pairs
// and small 2-vs-1 splits of the given units.
WardSpecialCaseReport ward_special_cases_check(const std::vector<SymbolicObject>& units,
                                               const Schema& schema);

}  // namespace symclust

#endif  // SYMCLUST_AGGLOM_HPP
