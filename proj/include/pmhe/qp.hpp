#ifndef PMHE_QP_HPP
#define PMHE_QP_HPP

#include <vector>

#include "pmhe/types.hpp"

namespace pmhe {

struct QpOptions {
    // Iteration cap is max_iters_per_row * max(1, #rows).
    int max_iters_per_row = 50;
    double tol = 1e-8;
};

struct QpResult {
    Vec z;
    Vec multipliers;              // one per constraint row, >= 0
    std::vector<int> active_set;  // rows tight at the solution, ascending
    double kkt_residual = 0.0;
    int iterations = 0;
};

// Solves min 0.5 z'Hz + g'z  s.t.  A z <= b  with H symmetric positive
// definite, by a dual active-set method started at the unconstrained
// minimizer. Each cycle refactorizes the active-set system (Cholesky of H
// plus a dense solve of the small Schur complement); constraint selection is
// most-violated-first with smallest-index tie-breaking, so runs are
// deterministic. Throws SolverError if the constraints are inconsistent or
// the iteration cap is hit before the KKT residual reaches options.tol.
QpResult solve_qp(const Mat& H, const Vec& g, const Mat& A, const Vec& b,
                  const QpOptions& options = {});

}  // namespace pmhe

#endif  // PMHE_QP_HPP
