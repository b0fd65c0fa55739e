#include "symclust/diagnostics.hpp"

#include <stdexcept>

#include "symclust/dissim.hpp"

namespace symclust {

InertiaReport inertia(const std::vector<SymbolicObject>& units,
                      const Clustering& clustering, const Schema& schema,
                      DissimKind kind) {
    if (clustering.labels.size() != units.size())
        throw std::invalid_argument("inertia: clustering does not cover the unit set");
    InertiaReport report;
    report.kind = kind;

    std::vector<const SymbolicObject*> all;
    all.reserve(units.size());
    for (const SymbolicObject& x : units) all.push_back(&x);
    const ClusterAggregates global_agg = compute_aggregates(all, schema);
    const Leader global = leader_from_aggregates(global_agg, kind);

    for (const SymbolicObject& x : units)
        report.total += object_dissim(x, global, schema, kind);

    const int k = clustering.k();
    for (int c = 0; c < k; ++c) {
        auto members = collect_members(units, clustering.labels, c);
        if (members.empty())
            throw std::invalid_argument("inertia: cluster " + std::to_string(c) +
                                        " is empty");
        const ClusterAggregates agg = compute_aggregates(members, schema);
        const Leader t_c = leader_from_aggregates(agg, kind);
        report.within += cluster_error(members, t_c, schema, kind);

        // t_C as a pseudo-unit: p components are the leader's, the component
        // weights are the cluster's aggregate w_C.
        SymbolicObject pseudo;
        pseudo.id = "cluster-" + std::to_string(c);
        pseudo.prob = t_c.t;
        pseudo.weight = agg.w;
        pseudo.freq = t_c.t;
        pseudo.count.assign(schema.size(), 1.0);
        report.between += object_dissim(pseudo, global, schema, kind);
    }
    report.residual = report.total - report.within - report.between;
    return report;
}

}  // namespace symclust
