#include <cmath>

#include "doctest.h"

#include "oracle.hpp"
#include "symclust/diagnostics.hpp"
#include "symclust/dissim.hpp"
#include "symclust/leaders.hpp"

using namespace symclust;

namespace {

Clustering clustering_for(const std::vector<SymbolicObject>& units,
                          std::vector<int> labels, int k, const Schema& schema,
                          DissimKind kind) {
    Clustering c;
    c.labels = std::move(labels);
    c.kind = kind;
    for (int i = 0; i < k; ++i) {
        auto members = collect_members(units, c.labels, i);
        c.leaders.push_back(optimal_leader(members, schema, kind));
        c.cluster_errors.push_back(cluster_error(members, c.leaders.back(), schema, kind));
        c.total_error += c.cluster_errors.back();
    }
    return c;
}

}  // namespace

TEST_CASE("single cluster: WI = TI and BI = 0") {
    Rng rng(61);
    testing::RandomClusterSpec spec;
    spec.min_units = 4;
    spec.max_units = 8;
    auto rc = testing::random_cluster(rng, spec);
    std::vector<int> labels(rc.units.size(), 0);
    const auto c = clustering_for(rc.units, labels, 1, rc.schema, DissimKind::delta1);
    const auto r = inertia(rc.units, c, rc.schema, DissimKind::delta1);
    CHECK(r.within == doctest::Approx(r.total).epsilon(1e-12));
    CHECK(r.between == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("all singletons with constant weights: WI = 0 and BI = TI") {
    Rng rng(62);
    testing::RandomClusterSpec spec;
    spec.min_units = 5;
    spec.max_units = 8;
    auto rc = testing::random_cluster(rng, spec);
    for (auto& x : rc.units)
        for (std::size_t i = 0; i < x.weight.size(); ++i)
            for (double& w : x.weight[i]) w = x.count[i];
    std::vector<int> labels(rc.units.size());
    for (std::size_t u = 0; u < labels.size(); ++u) labels[u] = static_cast<int>(u);
    const int k = static_cast<int>(rc.units.size());
    const auto c = clustering_for(rc.units, labels, k, rc.schema, DissimKind::delta1);
    const auto r = inertia(rc.units, c, rc.schema, DissimKind::delta1);
    CHECK(r.within == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.between == doctest::Approx(r.total).epsilon(1e-9));
}

TEST_CASE("random weighted 3-cluster partitions satisfy the d1 identity") {
    Rng rng(63);
    testing::RandomClusterSpec spec;
    spec.min_units = 12;
    spec.max_units = 12;
    spec.zero_p_rate = 0.15;
    for (int rep = 0; rep < 40; ++rep) {
        auto rc = testing::random_cluster(rng, spec);
        std::vector<int> labels(rc.units.size());
        for (std::size_t u = 0; u < labels.size(); ++u)
            labels[u] = u < 3 ? static_cast<int>(u) : static_cast<int>(rng.below(3));
        const auto c = clustering_for(rc.units, labels, 3, rc.schema, DissimKind::delta1);
        const auto r = inertia(rc.units, c, rc.schema, DissimKind::delta1);
        CHECK(std::fabs(r.residual) <= 1e-9 * std::max(r.total, 1.0));
    }
}

TEST_CASE("non-d1 reports carry an informational residual") {
    Rng rng(64);
    testing::RandomClusterSpec spec;
    spec.min_units = 9;
    spec.max_units = 9;
    auto rc = testing::random_cluster(rng, spec);
    std::vector<int> labels(rc.units.size());
    for (std::size_t u = 0; u < labels.size(); ++u)
        labels[u] = u < 2 ? static_cast<int>(u) : static_cast<int>(rng.below(2));
    const auto c = clustering_for(rc.units, labels, 2, rc.schema, DissimKind::delta2);
    const auto r = inertia(rc.units, c, rc.schema, DissimKind::delta2);
    CHECK(std::isfinite(r.residual));
    CHECK(r.kind == DissimKind::delta2);
}
