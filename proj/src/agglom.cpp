#include "symclust/agglom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symclust/dissim.hpp"

namespace symclust {

AgglomItem item_from_unit(const SymbolicObject& x, const Schema& schema, DissimKind kind) {
    const SymbolicObject* ptr = &x;
    AgglomItem item;
    item.label = x.id;
    item.aggregates = compute_aggregates(std::span<const SymbolicObject* const>(&ptr, 1), schema);
    item.leader = leader_from_aggregates(item.aggregates, kind);
    item.member_count = 1;
    return item;
}

AgglomItem item_from_cluster(std::span<const SymbolicObject* const> members,
                             const Schema& schema, DissimKind kind, std::string label) {
    if (members.empty()) throw std::invalid_argument("item_from_cluster: empty cluster");
    AgglomItem item;
    item.label = std::move(label);
    item.aggregates = compute_aggregates(members, schema);
    item.leader = leader_from_aggregates(item.aggregates, kind);
    item.member_count = static_cast<int>(members.size());
    return item;
}

Leader merged_leader(const ClusterAggregates& u_agg, const ClusterAggregates& v_agg,
                     DissimKind kind) {
    return leader_from_aggregates(u_agg + v_agg, kind);
}

namespace {

// One side's contribution to D at a single component; a is the side leader
// component, z the merged one. d1 is handled jointly by the caller.
double side_term(DissimKind kind, double a, double z, double w, double w_pos,
                 double P, double G) {
    const double dz = a - z;
    switch (kind) {
        case DissimKind::delta2:
            if (P == 0.0 || z == 0.0) return 0.0;
            return (P / a) * (dz / z) * (dz / z);
        case DissimKind::delta3:
            if (z == 0.0) return 0.0;
            return w * dz * dz / z;
        case DissimKind::delta4:
            return G * dz * dz;
        case DissimKind::delta5:
            if (w_pos == 0.0) return 0.0;
            return w_pos * dz * dz / a;
        case DissimKind::delta6:
            if (P == 0.0 || z == 0.0) return 0.0;
            return (P / a) * dz * dz / (a * z);
        default:
            throw std::logic_error("side_term: unexpected kind");
    }
}

double merged_component(DissimKind kind, double w, double w_pos, double P, double Q,
                        double H, double G) {
    auto ratio = [](double num, double den) { return den > 0.0 ? num / den : 0.0; };
    switch (kind) {
        case DissimKind::delta1: return ratio(P, w);
        case DissimKind::delta2: return ratio(Q, P);
        case DissimKind::delta3: return std::sqrt(ratio(Q, w));
        case DissimKind::delta4: return ratio(H, G);
        case DissimKind::delta5: return ratio(w_pos, H);
        case DissimKind::delta6: return std::sqrt(ratio(P, H));
    }
    throw std::logic_error("merged_component: unexpected kind");
}

double between_dissim_cached(const ClusterAggregates& ua, const ClusterAggregates& va,
                             const Leader& ul, const Leader& vl, DissimKind kind,
                             const Schema& schema) {
    double total = 0.0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const double alpha = schema.variables[i].alpha;
        if (alpha == 0.0) continue;
        double var_sum = 0.0;
        for (std::size_t j = 0; j < schema.arity(i); ++j) {
            const double wu = ua.w[i][j], wv = va.w[i][j];
            if (kind == DissimKind::delta1) {
                const double wsum = wu + wv;
                if (wsum == 0.0) continue;
                const double diff = ul.t[i][j] - vl.t[i][j];
                var_sum += (wu * wv / wsum) * diff * diff;
                continue;
            }
            const double z = merged_component(kind, wu + wv, ua.w_pos[i][j] + va.w_pos[i][j],
                                              ua.P[i][j] + va.P[i][j], ua.Q[i][j] + va.Q[i][j],
                                              ua.H[i][j] + va.H[i][j], ua.G[i][j] + va.G[i][j]);
            // grouped so D(u,v) == D(v,u) bit for bit
            var_sum += side_term(kind, ul.t[i][j], z, wu, ua.w_pos[i][j], ua.P[i][j],
                                 ua.G[i][j]) +
                       side_term(kind, vl.t[i][j], z, wv, va.w_pos[i][j], va.P[i][j],
                                 va.G[i][j]);
        }
        total += alpha * var_sum;
    }
    return total;
}

}  // namespace

double between_dissim(const ClusterAggregates& u_agg, const ClusterAggregates& v_agg,
                      DissimKind kind, const Schema& schema) {
    const Leader u = leader_from_aggregates(u_agg, kind);
    const Leader v = leader_from_aggregates(v_agg, kind);
    return between_dissim_cached(u_agg, v_agg, u, v, kind, schema);
}

Dendrogram agglomerate(std::span<const AgglomItem> items, const Schema& schema,
                       DissimKind kind) {
    const int n = static_cast<int>(items.size());
    if (n < 2) throw std::invalid_argument("agglomerate: need at least 2 items");

    Dendrogram dg;
    dg.leaf_count = n;
    dg.nodes.reserve(2 * n - 1);
    for (int i = 0; i < n; ++i) {
        DendrogramNode node;
        node.id = i;
        node.leader = items[i].leader;
        node.member_count = items[i].member_count;
        node.aggregates = items[i].aggregates;
        node.label = items[i].label;
        dg.nodes.push_back(std::move(node));
    }

    // Stored distance matrix over active slots; a merge reuses the left slot
    // and swap-removes the right one.
    std::vector<int> slot_node(n);
    for (int i = 0; i < n; ++i) slot_node[i] = i;
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double d = between_dissim_cached(dg.nodes[a].aggregates, dg.nodes[b].aggregates,
                                                   dg.nodes[a].leader, dg.nodes[b].leader,
                                                   kind, schema);
            dist[a][b] = d;
            dist[b][a] = d;
        }

    double prev_height = -std::numeric_limits<double>::infinity();
    int active = n;
    for (int step = 0; step < n - 1; ++step) {
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        long long best_lo = 0, best_hi = 0;
        for (int a = 0; a < active; ++a)
            for (int b = a + 1; b < active; ++b) {
                const double d = dist[a][b];
                const long long lo = std::min(slot_node[a], slot_node[b]);
                const long long hi = std::max(slot_node[a], slot_node[b]);
                if (d < best_d ||
                    (d == best_d && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
                    best_d = d;
                    best_a = a;
                    best_b = b;
                    best_lo = lo;
                    best_hi = hi;
                }
            }

        double height = best_d;
        if (height < 0.0) {
            if (height < -1e-12) ++dg.negative_beyond_tolerance;
            ++dg.clamped_negative_heights;
            height = 0.0;
        }
        if (height < prev_height) ++dg.nonmonotone_merges;
        prev_height = height;

        DendrogramNode node;
        node.id = n + step;
        node.left = static_cast<int>(best_lo);
        node.right = static_cast<int>(best_hi);
        node.height = height;
        node.aggregates = dg.nodes[slot_node[best_a]].aggregates;
        node.aggregates += dg.nodes[slot_node[best_b]].aggregates;
        node.leader = leader_from_aggregates(node.aggregates, kind);
        node.member_count = dg.nodes[slot_node[best_a]].member_count +
                            dg.nodes[slot_node[best_b]].member_count;
        dg.merges.push_back({node.left, node.right, height, node.id});
        dg.nodes.push_back(std::move(node));

        slot_node[best_a] = n + step;
        slot_node[best_b] = slot_node[active - 1];
        for (int s = 0; s < active; ++s) {
            dist[s][best_b] = dist[s][active - 1];
            dist[best_b][s] = dist[active - 1][s];
        }
        --active;
        const DendrogramNode& merged = dg.nodes[n + step];
        for (int s = 0; s < active; ++s) {
            if (s == best_a) continue;
            const DendrogramNode& other = dg.nodes[slot_node[s]];
            const double d = between_dissim_cached(merged.aggregates, other.aggregates,
                                                   merged.leader, other.leader, kind, schema);
            dist[best_a][s] = d;
            dist[s][best_a] = d;
        }
    }
    return dg;
}

namespace {

struct LeafUnion {
    std::vector<int> parent;
    explicit LeafUnion(int size) : parent(size) {
        for (int i = 0; i < size; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

std::vector<int> label_leaves(LeafUnion& uf, int leaf_count) {
    std::vector<int> labels(leaf_count, -1);
    std::vector<int> root_label;
    std::vector<int> roots;
    for (int i = 0; i < leaf_count; ++i) {
        const int r = uf.find(i);
        int lab = -1;
        for (std::size_t s = 0; s < roots.size(); ++s)
            if (roots[s] == r) lab = root_label[s];
        if (lab < 0) {
            lab = static_cast<int>(roots.size());
            roots.push_back(r);
            root_label.push_back(lab);
        }
        labels[i] = lab;
    }
    return labels;
}

}  // namespace

std::vector<int> cut_merges(const std::vector<MergeRecord>& merges, int leaf_count, int k) {
    if (k < 1 || k > leaf_count)
        throw std::invalid_argument("cut: k must be in [1, " + std::to_string(leaf_count) + "]");
    LeafUnion uf(leaf_count + static_cast<int>(merges.size()));
    const int apply = leaf_count - k;
    if (apply > static_cast<int>(merges.size()))
        throw std::invalid_argument("cut: merge list too short for requested k");
    for (int i = 0; i < apply; ++i) {
        uf.unite(merges[i].left, merges[i].new_node);
        uf.unite(merges[i].right, merges[i].new_node);
    }
    return label_leaves(uf, leaf_count);
}

std::vector<int> cut_merges_height(const std::vector<MergeRecord>& merges,
                                   int leaf_count, double height) {
    LeafUnion uf(leaf_count + static_cast<int>(merges.size()));
    for (const MergeRecord& m : merges) {
        if (m.height > height) break;
        uf.unite(m.left, m.new_node);
        uf.unite(m.right, m.new_node);
    }
    return label_leaves(uf, leaf_count);
}

GapSuggestion suggest_k(const std::vector<MergeRecord>& merges, int leaf_count) {
    GapSuggestion out;
    out.heights.reserve(merges.size());
    for (const MergeRecord& m : merges) out.heights.push_back(m.height);
    // Gap between merge i and i+1 separates a cut into k = leaf_count - i
    // clusters; the k = 2 gap is skipped (it is trivially large on most
    // trees). Ties prefer fewer clusters.
    const int n = leaf_count;
    for (int i = 1; i + 2 <= n - 1; ++i) {
        const double gap = out.heights[i] - out.heights[i - 1];
        if (gap >= out.largest_gap) {
            out.largest_gap = gap;
            out.suggested_k = n - i;
        }
    }
    return out;
}

WardSpecialCaseReport ward_special_cases_check(const std::vector<SymbolicObject>& units,
                                               const Schema& schema) {
    WardSpecialCaseReport report;
    for (const SymbolicObject& x : units)
        for (const auto& wv : x.weight)
            for (double w : wv)
                if (w != 1.0) return report;  // applicable stays false
    report.applicable = true;

    const auto d1 = DissimKind::delta1;
    auto closed_form = [&](const AgglomItem& a, const AgglomItem& b) {
        double d = 0.0;
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const double alpha = schema.variables[i].alpha;
            if (alpha == 0.0) continue;
            double s = 0.0;
            for (std::size_t j = 0; j < schema.arity(i); ++j) {
                const double diff = a.leader.t[i][j] - b.leader.t[i][j];
                s += diff * diff;
            }
            d += alpha * s;
        }
        const double cu = a.member_count, cv = b.member_count;
        return cu * cv / (cu + cv) * d;
    };
    auto check = [&](const AgglomItem& a, const AgglomItem& b) {
        const double general = between_dissim(a.aggregates, b.aggregates, d1, schema);
        report.max_abs_error = std::max(report.max_abs_error,
                                        std::fabs(general - closed_form(a, b)));
        ++report.pairs_checked;
    };

    const std::size_t n = units.size();
    std::vector<AgglomItem> singles;
    singles.reserve(n);
    for (const SymbolicObject& x : units) singles.push_back(item_from_unit(x, schema, d1));
    for (std::size_t i = 0; i < n && report.pairs_checked < 200; ++i)
        for (std::size_t j = i + 1; j < n && report.pairs_checked < 200; ++j)
            check(singles[i], singles[j]);
    for (std::size_t i = 0; i + 2 < n && report.pairs_checked < 250; ++i) {
        const SymbolicObject* pair[2] = {&units[i], &units[i + 1]};
        const AgglomItem two = item_from_cluster(pair, schema, d1, "pair");
        check(two, singles[i + 2]);
    }
    return report;
}

}  // namespace symclust
