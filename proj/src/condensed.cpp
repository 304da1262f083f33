#include "pmhe/condensed.hpp"

#include <Eigen/Eigenvalues>

namespace pmhe {

namespace {

void require_psd(const Mat& M, int dim, const char* name) {
    if (M.rows() != dim || M.cols() != dim)
        throw ConfigError(std::string("build_condensed: ") + name + " has wrong shape");
    if ((M - M.transpose()).lpNorm<Eigen::Infinity>() > 1e-10 * (1.0 + M.norm()))
        throw ConfigError(std::string("build_condensed: ") + name + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat> eig(M);
    if (eig.eigenvalues().minCoeff() < -1e-10 * (1.0 + M.norm()))
        throw ConfigError(std::string("build_condensed: ") + name + " is not PSD");
}

}  // namespace

CondensedProblem build_condensed(const LtiSystem& sys, const MeasurementWindow& window,
                                 int N, const StageWeights& weights) {
    if (window.time() == 0) throw ConfigError("build_condensed: empty window");
    if (N < 1) throw ConfigError("build_condensed: horizon must be >= 1");
    require_psd(weights.R, sys.p(), "R");
    if (!weights.residuals_fixed) require_psd(weights.Qw, sys.n(), "Qw");

    const int n = sys.n();
    const int p = sys.p();
    const int ell = std::min(window.time(), N);
    const int t0 = window.time() - ell;

    CondensedProblem prob;
    prob.n_ = n;
    prob.horizon_ = ell;
    prob.head_time_ = t0;
    prob.fixed_ = weights.residuals_fixed;
    prob.R_ = weights.R;
    prob.Qw_ = weights.residuals_fixed ? Mat::Zero(n, n) : weights.Qw;

    const int nd = prob.decision_dim();
    prob.H_ = Mat::Zero(nd, nd);
    prob.b_ = Vec::Zero(nd);
    prob.c0_ = 0.0;

    for (int t = 0; t < ell; ++t) {
        prob.obs_rows_.push_back(sys.C() * sys.pow_A(t));

        Vec ut = Vec::Zero(n);
        for (int s = 0; s < t; ++s) ut += sys.pow_A(t - 1 - s) * sys.B() * window.u_at(t0 + s);
        const Vec ybar = window.y_at(t0 + t) - sys.C() * ut;

        Mat M = Mat::Zero(p, nd);
        M.leftCols(n) = prob.obs_rows_[t];
        if (!prob.fixed_)
            for (int s = 0; s < t; ++s)
                M.block(0, (1 + s) * n, p, n) = sys.C() * sys.pow_A(t - 1 - s);

        prob.H_ += M.transpose() * weights.R * M;
        prob.b_ += M.transpose() * weights.R * ybar;
        prob.c0_ += 0.5 * ybar.dot(weights.R * ybar);
    }
    if (!prob.fixed_)
        for (int s = 0; s < ell; ++s)
            prob.H_.block((1 + s) * n, (1 + s) * n, n, n) += weights.Qw;

    return prob;
}

Vec CondensedProblem::decision_of(const StackedVector& z) const {
    if (z.n != n_ || z.horizon != horizon_)
        throw DimensionError("CondensedProblem: stacked vector shape mismatch");
    return fixed_ ? Vec(z.head()) : z.data;
}

StackedVector CondensedProblem::stacked_of(const Vec& d) const {
    if (d.size() != decision_dim()) throw DimensionError("CondensedProblem: decision size");
    if (!fixed_) return StackedVector(d, n_, horizon_);
    return StackedVector::from_head(d, horizon_);
}

double CondensedProblem::eval_loss(const StackedVector& z) const {
    const Vec d = decision_of(z);
    return 0.5 * d.dot(H_ * d) - b_.dot(d) + c0_;
}

StackedVector CondensedProblem::eval_gradient(const StackedVector& z) const {
    const Vec d = decision_of(z);
    const Vec g = H_ * d - b_;
    if (!fixed_) return StackedVector(g, n_, horizon_);
    return StackedVector::from_head(g, horizon_);
}

}  // namespace pmhe
