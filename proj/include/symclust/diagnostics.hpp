#ifndef SYMCLUST_DIAGNOSTICS_HPP
#define SYMCLUST_DIAGNOSTICS_HPP

#include "symclust/types.hpp"

namespace symclust {

// Inertia decomposition TI = WI + BI.
//   TI = sum_X d(X, t_U)       t_U: leader of the whole unit set
//   WI = P(C)                  per-cluster optimal leaders
//   BI = sum_C d(t_C, t_U)     t_C weighted by the cluster's aggregate w_C
// The identity holds for d1 with arbitrary nonnegative weights; for the
// other kinds the residual is informational only.
struct InertiaReport {
    double total = 0.0;
    double within = 0.0;
    double between = 0.0;
    double residual = 0.0;  // total - within - between
    DissimKind kind = DissimKind::delta1;
};

InertiaReport inertia(const std::vector<SymbolicObject>& units,
                      const Clustering& clustering, const Schema& schema,
                      DissimKind kind);

}  // namespace symclust

#endif  // SYMCLUST_DIAGNOSTICS_HPP
