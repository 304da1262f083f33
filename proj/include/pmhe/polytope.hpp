#ifndef PMHE_POLYTOPE_HPP
#define PMHE_POLYTOPE_HPP

#include "pmhe/lti_system.hpp"
#include "pmhe/stacked.hpp"
#include "pmhe/types.hpp"
#include "pmhe/window.hpp"

namespace pmhe {

// Stacked state-constraint polytope { z = [x; w] : G x + F w <= E }.
// One row block per window stage r = 0..horizon constrains the predicted
// state A^r x + sum_s A^{r-1-s} (B u + w_s); the input contribution sits on
// the right-hand side E, which therefore changes with the input window.
struct PolytopeSet {
    Mat G;  // rows x n
    Mat F;  // rows x horizon*n
    Vec E;
    int n = 0;
    int horizon = 0;
    int qx = 0;  // rows per stage block

    int rows() const { return static_cast<int>(E.size()); }
    Mat stacked() const;

    double membership_tol() const { return 1e-9 * (1.0 + E.lpNorm<Eigen::Infinity>()); }
    bool contains(const StackedVector& z) const;
    // Worst signed violation max_i (row_i . z - E_i); <= 0 means feasible.
    double violation(const StackedVector& z) const;
};

// Assembles the stacked polytope for the window's effective horizon
// min(window.time(), N) from the per-state set { x : Cx x <= dx }.
// Throws ConfigError when the interior probe finds no strictly feasible
// point (slack margin below 1e-8).
PolytopeSet build_polytope(const Mat& Cx, const Vec& dx, const LtiSystem& sys,
                           const MeasurementWindow& window, int N);

// Chebyshev-style interior probe for { v : A v <= b }: returns the slack
// margin min_i (b_i - a_i'v)/|a_i| of the best point found (capped at 1).
double interior_margin(const Mat& A, const Vec& b);

}  // namespace pmhe

#endif  // PMHE_POLYTOPE_HPP
