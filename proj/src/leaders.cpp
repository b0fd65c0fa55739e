#include "symclust/leaders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "symclust/dissim.hpp"
#include "symclust/rng.hpp"

namespace symclust {

const char* to_string(InitMethod init) {
    return init == InitMethod::random_units_as_leaders ? "random-units-as-leaders"
                                                       : "random-partition";
}

InitMethod parse_init_method(const std::string& name) {
    if (name == "random-units-as-leaders" || name == "random-units")
        return InitMethod::random_units_as_leaders;
    if (name == "random-partition") return InitMethod::random_partition;
    throw std::invalid_argument("unknown init method: '" + name + "'");
}

AssignResult assign_units(const std::vector<SymbolicObject>& units,
                          const std::vector<Leader>& leaders,
                          const Schema& schema, DissimKind kind) {
    if (leaders.empty()) throw std::invalid_argument("assign_units: no leaders");
    AssignResult res;
    res.labels.resize(units.size());
    for (std::size_t u = 0; u < units.size(); ++u) {
        double best = std::numeric_limits<double>::infinity();
        int best_c = 0;
        for (std::size_t c = 0; c < leaders.size(); ++c) {
            const double d = object_dissim_or_inf(units[u], leaders[c], schema, kind);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        res.labels[u] = best_c;
        res.total_error += best;
    }
    return res;
}

std::vector<int> repair_empty_clusters(std::vector<int> labels,
                                       const std::vector<SymbolicObject>& units,
                                       const std::vector<Leader>& leaders,
                                       const Schema& schema, DissimKind kind) {
    const int k = static_cast<int>(leaders.size());
    if (static_cast<int>(units.size()) < k)
        throw std::invalid_argument("repair_empty_clusters: fewer units than clusters");

    std::vector<int> sizes(k, 0);
    for (int c : labels) ++sizes[c];

    // Min distance to any leader, computed once; leaders do not change here.
    std::vector<double> min_dist(units.size());
    bool min_dist_ready = false;

    for (int c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        if (!min_dist_ready) {
            for (std::size_t u = 0; u < units.size(); ++u) {
                double best = std::numeric_limits<double>::infinity();
                for (const Leader& t : leaders)
                    best = std::min(best, object_dissim_or_inf(units[u], t, schema, kind));
                min_dist[u] = best;
            }
            min_dist_ready = true;
        }
        int pick = -1;
        double pick_dist = -1.0;
        for (std::size_t u = 0; u < units.size(); ++u) {
            if (sizes[labels[u]] < 2) continue;  // donor must keep a member
            if (min_dist[u] > pick_dist) {
                pick_dist = min_dist[u];
                pick = static_cast<int>(u);
            }
        }
        if (pick < 0)
            throw std::runtime_error("repair_empty_clusters: no movable unit");
        --sizes[labels[pick]];
        labels[pick] = c;
        ++sizes[c];
    }
    return labels;
}

namespace {

double partition_error(const std::vector<SymbolicObject>& units,
                       const std::vector<int>& labels,
                       const std::vector<Leader>& leaders,
                       const Schema& schema, DissimKind kind) {
    double sum = 0.0;
    for (std::size_t u = 0; u < units.size(); ++u)
        sum += object_dissim_or_inf(units[u], leaders[labels[u]], schema, kind);
    return sum;
}

std::vector<Leader> leaders_of_partition(const std::vector<SymbolicObject>& units,
                                         const std::vector<int>& labels, int k,
                                         const Schema& schema, DissimKind kind) {
    std::vector<Leader> leaders;
    leaders.reserve(k);
    for (int c = 0; c < k; ++c) {
        auto members = collect_members(units, labels, c);
        if (members.empty())
            throw std::invalid_argument("leaders_step: cluster " + std::to_string(c) +
                                        " is empty");
        leaders.push_back(optimal_leader(members, schema, kind));
    }
    return leaders;
}

std::vector<int> initial_labels(const std::vector<SymbolicObject>& units, int k,
                                const Schema& schema, DissimKind kind,
                                InitMethod init, Rng& rng) {
    const std::size_t n = units.size();
    if (init == InitMethod::random_units_as_leaders) {
        std::vector<Leader> leaders;
        leaders.reserve(k);
        for (std::size_t idx : rng.sample_distinct(n, static_cast<std::size_t>(k)))
            leaders.push_back(Leader::from_distributions(units[idx]));
        auto assigned = assign_units(units, leaders, schema, kind);
        return repair_empty_clusters(std::move(assigned.labels), units, leaders,
                                     schema, kind);
    }
    // random partition: the first k shuffled units seed clusters 0..k-1 so no
    // cluster starts empty, the rest draw a cluster uniformly
    std::vector<int> labels(n, 0);
    auto seeds = rng.sample_distinct(n, static_cast<std::size_t>(k));
    std::vector<bool> seeded(n, false);
    for (int c = 0; c < k; ++c) {
        labels[seeds[c]] = c;
        seeded[seeds[c]] = true;
    }
    for (std::size_t u = 0; u < n; ++u)
        if (!seeded[u]) labels[u] = static_cast<int>(rng.below(k));
    return labels;
}

}  // namespace

StepState leaders_step(const std::vector<SymbolicObject>& units,
                       const std::vector<int>& labels, int k,
                       const Schema& schema, DissimKind kind) {
    StepState next;
    next.leaders = leaders_of_partition(units, labels, k, schema, kind);
    auto assigned = assign_units(units, next.leaders, schema, kind);
    next.labels = repair_empty_clusters(std::move(assigned.labels), units,
                                        next.leaders, schema, kind);
    next.total_error = partition_error(units, next.labels, next.leaders, schema, kind);
    return next;
}

LeadersResult leaders_run(const std::vector<SymbolicObject>& units,
                          const Schema& schema, DissimKind kind,
                          const LeadersConfig& cfg) {
    const std::size_t n = units.size();
    if (cfg.k < 1) throw std::invalid_argument("leaders_run: k must be positive");
    if (n < static_cast<std::size_t>(cfg.k))
        throw std::invalid_argument("leaders_run: fewer units than clusters");
    if (cfg.max_iter < 1 || cfg.restarts < 1)
        throw std::invalid_argument("leaders_run: max_iter and restarts must be positive");
    if (cfg.tol < 0.0) throw std::invalid_argument("leaders_run: tol must be >= 0");

    LeadersResult result;
    double best_error = std::numeric_limits<double>::infinity();

    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(cfg.seed + static_cast<std::uint64_t>(r));
        std::vector<int> labels = initial_labels(units, cfg.k, schema, kind, cfg.init, rng);

        std::vector<double> trace;
        StepState state;
        bool converged = false;
        double prev_error = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < cfg.max_iter; ++iter) {
            state = leaders_step(units, labels, cfg.k, schema, kind);
            trace.push_back(state.total_error);
            if (state.labels == labels) {
                converged = true;
                break;
            }
            labels = std::move(state.labels);
            if (cfg.tol > 0.0 && std::isfinite(prev_error) &&
                prev_error - state.total_error <=
                    cfg.tol * std::max(prev_error, std::numeric_limits<double>::min()))
                break;
            prev_error = state.total_error;
        }

        // Final leaders and per-cluster errors for the last partition. On
        // convergence this recomputes the same values bit for bit.
        std::vector<Leader> leaders = leaders_of_partition(units, labels, cfg.k, schema, kind);
        std::vector<double> errors(cfg.k, 0.0);
        double total = 0.0;
        for (int c = 0; c < cfg.k; ++c) {
            auto members = collect_members(units, labels, c);
            errors[c] = cluster_error(members, leaders[c], schema, kind);
            total += errors[c];
        }

        result.restarts.push_back({cfg.seed + static_cast<std::uint64_t>(r), total,
                                   static_cast<int>(trace.size()), converged});
        if (total < best_error) {
            best_error = total;
            result.best_restart = r;
            result.trace = std::move(trace);
            result.clustering.labels = std::move(labels);
            result.clustering.leaders = std::move(leaders);
            result.clustering.cluster_errors = std::move(errors);
            result.clustering.total_error = total;
            result.clustering.kind = kind;
        }
    }
    return result;
}

}  // namespace symclust
