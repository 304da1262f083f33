#include "pmhe/bregman.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace pmhe {

namespace {

void require_pd(const Mat& M, const char* name) {
    if (M.rows() != M.cols()) throw ConfigError(std::string(name) + " must be square");
    if ((M - M.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + M.norm()))
        throw ConfigError(std::string(name) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ConfigError(std::string(name) + " must be positive definite");
}

std::pair<double, double> eig_range(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

}  // namespace

BregmanGeometry BregmanGeometry::quadratic(Mat P, Mat W) {
    require_pd(P, "BregmanGeometry: P");
    require_pd(W, "BregmanGeometry: W");
    BregmanGeometry g;
    g.P_ = std::move(P);
    g.W_ = std::move(W);
    const auto [pmin, pmax] = eig_range(g.P_);
    const auto [wmin, wmax] = eig_range(g.W_);
    g.sigma_ = std::min(pmin, wmin);
    g.gamma_ = std::max(pmax, wmax);
    return g;
}

BregmanGeometry BregmanGeometry::state_quadratic(Mat P) {
    require_pd(P, "BregmanGeometry: P");
    BregmanGeometry g;
    g.P_ = std::move(P);
    g.W_ = Mat::Zero(0, 0);
    g.state_only_ = true;
    std::tie(g.sigma_, g.gamma_) = eig_range(g.P_);
    return g;
}

Mat BregmanGeometry::metric(int ell) const {
    const int n = static_cast<int>(P_.rows());
    if (state_only_) return P_;
    if (ell * n > W_.rows()) throw DimensionError("BregmanGeometry::metric: horizon exceeds W");
    Mat M = Mat::Zero((ell + 1) * n, (ell + 1) * n);
    M.topLeftCorner(n, n) = P_;
    if (ell > 0) M.bottomRightCorner(ell * n, ell * n) = W_.topLeftCorner(ell * n, ell * n);
    return M;
}

double BregmanGeometry::distance(const StackedVector& z1, const StackedVector& z2) const {
    if (z1.n != z2.n || z1.horizon != z2.horizon)
        throw DimensionError("BregmanGeometry::distance: shape mismatch");
    const Vec dx = z1.head() - z2.head();
    double d = 0.5 * dx.dot(P_ * dx);
    if (!state_only_ && z1.horizon > 0) {
        const Vec dw = z1.residuals() - z2.residuals();
        d += 0.5 * dw.dot(W_.topLeftCorner(dw.size(), dw.size()) * dw);
    }
    return d;
}

StackedVector BregmanGeometry::grad_psi(const StackedVector& z) const {
    StackedVector g = StackedVector::zero(z.n, z.horizon);
    g.head() = P_ * z.head();
    if (!state_only_ && z.horizon > 0)
        g.residuals() = W_.topLeftCorner(z.horizon * z.n, z.horizon * z.n) * z.residuals();
    return g;
}

double BregmanGeometry::three_points_gap(const StackedVector& a, const StackedVector& b,
                                         const StackedVector& c) const {
    const double lhs = distance(c, a) + distance(a, b) - distance(c, b);
    const Vec gdiff = grad_psi(b).data - grad_psi(a).data;
    return lhs - gdiff.dot(c.data - a.data);
}

namespace {

// Constraint matrix over the active decision coordinates.
Mat reduced_rows(const BregmanGeometry& geom, const PolytopeSet& set) {
    if (geom.state_only()) return set.G;
    return set.stacked();
}

StackedVector embed(const BregmanGeometry& geom, const Vec& d, int n, int ell) {
    if (geom.state_only()) return StackedVector::from_head(d, ell);
    return StackedVector(d, n, ell);
}

}  // namespace

StackedVector project(const BregmanGeometry& geom, const StackedVector& zbar,
                      const PolytopeSet& set, QpResult* report) {
    if (set.rows() > 0 && set.contains(zbar)) {
        if (report) *report = QpResult{zbar.data, Vec::Zero(set.rows()), {}, 0.0, 0};
        return zbar;
    }
    const Mat M = geom.metric(zbar.horizon);
    const Vec center = geom.state_only() ? Vec(zbar.head()) : zbar.data;
    QpResult res = solve_qp(M, -(M * center), reduced_rows(geom, set), set.E);
    StackedVector out = embed(geom, res.z, zbar.n, zbar.horizon);
    if (report) *report = std::move(res);
    return out;
}

StackedVector mirror_subproblem(const BregmanGeometry& geom, const StackedVector& gradient,
                                double eta, const StackedVector& center,
                                const PolytopeSet& set, QpResult* report) {
    if (eta <= 0.0) throw ConfigError("mirror_subproblem: step size must be positive");
    if (gradient.dim() != center.dim()) throw DimensionError("mirror_subproblem: shape");
    const Mat M = geom.metric(center.horizon);
    const Vec c = geom.state_only() ? Vec(center.head()) : center.data;
    const Vec g = geom.state_only() ? Vec(gradient.head()) : gradient.data;
    if (set.rows() == 0) {
        const Vec z = c - eta * M.llt().solve(g);
        if (report) *report = QpResult{z, Vec::Zero(0), {}, 0.0, 0};
        return embed(geom, z, center.n, center.horizon);
    }
    QpResult res = solve_qp(M, eta * g - M * c, reduced_rows(geom, set), set.E);
    StackedVector out = embed(geom, res.z, center.n, center.horizon);
    if (report) *report = std::move(res);
    return out;
}

bool pythagoras_check(const BregmanGeometry& geom, const StackedVector& zbar,
                      const StackedVector& z, const PolytopeSet& set) {
    const StackedVector proj = project(geom, zbar, set);
    return geom.distance(proj, zbar) <= geom.distance(z, zbar) - geom.distance(z, proj) + 1e-8;
}

}  // namespace pmhe
