#ifndef PMHE_BREGMAN_HPP
#define PMHE_BREGMAN_HPP

#include "pmhe/polytope.hpp"
#include "pmhe/qp.hpp"
#include "pmhe/stacked.hpp"
#include "pmhe/types.hpp"

namespace pmhe {

// Quadratic Bregman geometry psi(z) = 0.5 (x'Px + w'Ww) with P and W
// positive definite, so D(z1,z2) = 0.5 |x1-x2|_P^2 + 0.5 |w1-w2|_W^2.
// In state-only mode the residual block is pinned at zero and psi reduces to
// the P term; sigma/gamma are then the extremal eigenvalues of P alone.
// For partially filled windows (horizon ell < N) the leading ell*n principal
// block of W applies; eigenvalue interlacing keeps sigma/gamma valid bounds.
class BregmanGeometry {
public:
    static BregmanGeometry quadratic(Mat P, Mat W);
    static BregmanGeometry state_quadratic(Mat P);

    bool state_only() const { return state_only_; }
    double sigma() const { return sigma_; }
    double gamma() const { return gamma_; }
    const Mat& P() const { return P_; }
    const Mat& W() const { return W_; }

    // Metric over the active decision space at effective horizon ell.
    Mat metric(int ell) const;

    double distance(const StackedVector& z1, const StackedVector& z2) const;

    // grad psi as a full stacked vector (residual part zero in state-only mode).
    StackedVector grad_psi(const StackedVector& z) const;

    // [D(c,a) + D(a,b) - D(c,b)] - (grad psi(b) - grad psi(a))'(c - a);
    // identically zero up to roundoff, kept as a self-test of the geometry.
    double three_points_gap(const StackedVector& a, const StackedVector& b,
                            const StackedVector& c) const;

private:
    BregmanGeometry() = default;
    Mat P_, W_;
    bool state_only_ = false;
    double sigma_ = 0.0, gamma_ = 0.0;
};

// Bregman projection argmin_{z in set} D(z, zbar). Feasible zbar is returned
// unchanged. KKT residual of the backing QP is <= options tol (1e-8).
StackedVector project(const BregmanGeometry& geom, const StackedVector& zbar,
                      const PolytopeSet& set, QpResult* report = nullptr);

// One mirror step: argmin_{z in set} eta g'z + D(z, center). A set with zero
// rows means unconstrained, giving center - eta M^{-1} g in closed form.
StackedVector mirror_subproblem(const BregmanGeometry& geom, const StackedVector& gradient,
                                double eta, const StackedVector& center,
                                const PolytopeSet& set, QpResult* report = nullptr);

// Generalized Pythagoras inequality for the projection of zbar against a
// feasible probe z: D(Pi(zbar), zbar) <= D(z, zbar) - D(z, Pi(zbar)) + 1e-8.
bool pythagoras_check(const BregmanGeometry& geom, const StackedVector& zbar,
                      const StackedVector& z, const PolytopeSet& set);

}  // namespace pmhe

#endif  // PMHE_BREGMAN_HPP
