#ifndef SYMCLUST_LEADERS_HPP
#define SYMCLUST_LEADERS_HPP

#include <cstdint>
#include <vector>

#include "symclust/types.hpp"

namespace symclust {

enum class InitMethod { random_units_as_leaders, random_partition };

const char* to_string(InitMethod init);
InitMethod parse_init_method(const std::string& name);

struct LeadersConfig {
    int k = 2;
    int max_iter = 100;
    int restarts = 1;
    std::uint64_t seed = 0;
    InitMethod init = InitMethod::random_units_as_leaders;
    double tol = 0.0;  // relative criterion-improvement early stop; 0 = exact convergence only
};

struct AssignResult {
    std::vector<int> labels;
    double total_error = 0.0;
};

// Nearest-leader assignment; ties go to the lowest leader index.
AssignResult assign_units(const std::vector<SymbolicObject>& units,
                          const std::vector<Leader>& leaders,
                          const Schema& schema, DissimKind kind);

// Empty-cluster rule: for each empty cluster in increasing index
// order, the unit most dissimilar from all current leaders (by min over
// leaders) moves there, provided its donor cluster keeps at least one
// member. Ties go to the lowest unit index. Throws if units < k.
std::vector<int> repair_empty_clusters(std::vector<int> labels,
                                       const std::vector<SymbolicObject>& units,
                                       const std::vector<Leader>& leaders,
                                       const Schema& schema, DissimKind kind);

struct StepState {
    std::vector<int> labels;
    std::vector<Leader> leaders;
    double total_error = 0.0;
};

// One iteration: optimal leaders for the current partition, nearest-leader
// reassignment, empty-cluster repair. total_error is the criterion of the
// returned partition under the returned leaders.
StepState leaders_step(const std::vector<SymbolicObject>& units,
                       const std::vector<int>& labels, int k,
                       const Schema& schema, DissimKind kind);

struct RestartSummary {
    std::uint64_t seed = 0;
    double total_error = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct LeadersResult {
    Clustering clustering;
    std::vector<double> trace;  // criterion after each step of the winning restart
    int best_restart = 0;
    std::vector<RestartSummary> restarts;
};

// Iterates leaders_step per restart until the assignment stabilizes (or the
// relative improvement drops below tol, or max_iter); returns the restart
// with the smallest criterion, lowest restart index on ties. Restart r uses
// seed cfg.seed + r.
LeadersResult leaders_run(const std::vector<SymbolicObject>& units,
                          const Schema& schema, DissimKind kind,
                          const LeadersConfig& cfg);

}  // namespace symclust

#endif  // SYMCLUST_LEADERS_HPP
