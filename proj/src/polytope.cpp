#include "pmhe/polytope.hpp"

#include <cmath>

#include "pmhe/qp.hpp"

namespace pmhe {

Mat PolytopeSet::stacked() const {
    Mat GF(rows(), n + horizon * n);
    GF.leftCols(n) = G;
    if (horizon > 0) GF.rightCols(horizon * n) = F;
    return GF;
}

double PolytopeSet::violation(const StackedVector& z) const {
    if (z.n != n || z.horizon != horizon) throw DimensionError("PolytopeSet::violation: shape");
    Vec lhs = G * z.head();
    if (horizon > 0) lhs += F * z.residuals();
    return (lhs - E).maxCoeff();
}

bool PolytopeSet::contains(const StackedVector& z) const {
    return violation(z) <= membership_tol();
}

double interior_margin(const Mat& A, const Vec& b) {
    const int nv = static_cast<int>(A.cols());
    const int q = static_cast<int>(A.rows());
    if (q == 0) return 1.0;

    Vec norms(q);
    for (int i = 0; i < q; ++i) norms(i) = A.row(i).norm();

    // max r s.t. a_i'v + |a_i| r <= b_i, r <= 1, solved as a lightly
    // regularized QP; the margin of the returned point is the certificate,
    // not the QP objective, so the regularization bias is harmless.
    Mat Ar(q + 1, nv + 1);
    Ar.setZero();
    Ar.block(0, 0, q, nv) = A;
    Ar.col(nv).head(q) = norms;
    Ar(q, nv) = 1.0;
    Vec br(q + 1);
    br.head(q) = b;
    br(q) = 1.0;

    const double reg = 1e-6;
    Mat H = reg * Mat::Identity(nv + 1, nv + 1);
    Vec g = Vec::Zero(nv + 1);
    g(nv) = -1.0;

    Vec v;
    try {
        v = solve_qp(H, g, Ar, br).z;
    } catch (const SolverError&) {
        return -1.0;
    }

    double margin = 1.0;
    for (int i = 0; i < q; ++i) {
        if (norms(i) < 1e-14) {
            if (b(i) < -1e-12) return -1.0;  // 0 <= b_i violated outright
            continue;
        }
        margin = std::min(margin, (b(i) - A.row(i).dot(v.head(nv))) / norms(i));
    }
    return margin;
}

PolytopeSet build_polytope(const Mat& Cx, const Vec& dx, const LtiSystem& sys,
                           const MeasurementWindow& window, int N) {
    if (Cx.cols() != sys.n()) throw ConfigError("build_polytope: Cx column count != n");
    if (Cx.rows() != dx.size()) throw ConfigError("build_polytope: Cx/dx row mismatch");

    const int n = sys.n();
    const int qx = static_cast<int>(Cx.rows());
    const int ell = std::min(window.time(), N);

    PolytopeSet set;
    set.n = n;
    set.horizon = ell;
    set.qx = qx;
    set.G.resize((ell + 1) * qx, n);
    set.F = Mat::Zero((ell + 1) * qx, ell * n);
    set.E.resize((ell + 1) * qx);

    const int t0 = window.time() - ell;  // head time of the window
    for (int r = 0; r <= ell; ++r) {
        set.G.middleRows(r * qx, qx) = Cx * sys.pow_A(r);
        for (int s = 0; s < r; ++s)
            set.F.block(r * qx, s * n, qx, n) = Cx * sys.pow_A(r - 1 - s);
        // utilde_r = sum_s A^{r-1-s} B u_{t0+s}
        Vec ut = Vec::Zero(n);
        for (int s = 0; s < r; ++s) ut += sys.pow_A(r - 1 - s) * sys.B() * window.u_at(t0 + s);
        set.E.segment(r * qx, qx) = dx - Cx * ut;
    }

    if (interior_margin(set.stacked(), set.E) <= 1e-8)
        throw ConfigError("build_polytope: constraint set has empty interior");
    return set;
}

}  // namespace pmhe
