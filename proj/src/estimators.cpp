#include "pmhe/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace pmhe {

namespace {

int argmin_loss(const std::vector<double>& losses) {
    int best = 0;
    for (size_t i = 1; i < losses.size(); ++i)
        if (losses[i] < losses[best]) best = static_cast<int>(i);  // ties keep smallest index
    return best;
}

}  // namespace

Vec reconstruct_state(const LtiSystem& sys, const StackedVector& zhat,
                      const MeasurementWindow& window) {
    const int ell = zhat.horizon;
    if (ell > window.size())
        throw DimensionError("reconstruct_state: horizon exceeds window content");
    const int k = window.time();
    const int t0 = k - ell;
    Vec x = sys.pow_A(ell) * zhat.head();
    for (int j = 0; j < ell; ++j)
        x += sys.pow_A(ell - 1 - j) * (sys.B() * window.u_at(t0 + j) + zhat.w(j));
    return x;
}

StackedVector apriori_operator(const LtiSystem& sys, const Mat& L,
                               const StackedVector& zhat, const MeasurementWindow& window,
                               int N) {
    const int k = window.time();
    if (k < N) {
        // Window still filling: head time stays put, one residual block appended.
        return StackedVector::from_head(zhat.head(), zhat.horizon + 1);
    }
    const int t0 = k - N;
    const Vec y = window.y_at(t0);
    const Vec u = window.u_at(t0);
    const Vec head = sys.A() * zhat.head() + sys.B() * u + L * (y - sys.C() * zhat.head());
    return StackedVector::from_head(head, N);
}

// ---------------------------------------------------------------------------
// AnytimeEstimator
// ---------------------------------------------------------------------------

AnytimeEstimator::AnytimeEstimator(LtiSystem sys, Mat Cx, Vec dx, int N,
                                   StageWeights weights, StabilityCertificate cert,
                                   StepSchedule schedule, Vec x0_hat, AnytimeOptions options)
    : sys_(std::move(sys)),
      Cx_(std::move(Cx)),
      dx_(std::move(dx)),
      N_(N),
      weights_(std::move(weights)),
      cert_(std::move(cert)),
      schedule_(std::move(schedule)),
      geom_(cert_.geometry()),
      options_(options),
      window_(sys_.p(), sys_.m(), N),
      zbar_head_(std::move(x0_hat)) {
    if (options_.require_valid_certificate && !cert_.valid)
        throw DesignError("AnytimeEstimator: certificate is not valid");
    if (zbar_head_.size() != sys_.n()) throw DimensionError("AnytimeEstimator: x0_hat size");
    trace_.x0_hat = zbar_head_;
}

const TraceRecord& AnytimeEstimator::step(const Vec& y, const Vec& u) {
    window_.push(y, u);
    trace_.ys.push_back(y);
    trace_.us.push_back(u);
    const int k = window_.time();
    const int ell = std::min(k, N_);

    const PolytopeSet set = build_polytope(Cx_, dx_, sys_, window_, N_);
    const CondensedProblem prob = build_condensed(sys_, window_, N_, weights_);
    const StackedVector zbar = StackedVector::from_head(zbar_head_, ell);

    TraceRecord rec;
    rec.k = k;
    rec.ell = ell;
    try {
        rec.iterates.push_back(project(geom_, zbar, set));
    } catch (const SolverError& e) {
        throw EstimatorError("anytime pMHE: warm-start projection failed at k=" +
                                 std::to_string(k),
                             k, -1, e.residual());
    }
    rec.losses.push_back(prob.eval_loss(rec.iterates.back()));

    const int budget = schedule_.it(k);
    for (int i = 0; i < budget; ++i) {
        const double eta = schedule_.eta(k, i);
        const StackedVector grad = prob.eval_gradient(rec.iterates.back());
        const StackedVector& center =
            options_.warm_constant_centering ? zbar : rec.iterates.back();
        try {
            rec.iterates.push_back(mirror_subproblem(geom_, grad, eta, center, set));
        } catch (const SolverError& e) {
            throw EstimatorError("anytime pMHE: mirror step failed at k=" + std::to_string(k) +
                                     ", i=" + std::to_string(i),
                                 k, i, e.residual());
        }
        rec.losses.push_back(prob.eval_loss(rec.iterates.back()));
        rec.etas.push_back(eta);
    }

    rec.i_minloss = argmin_loss(rec.losses);
    rec.j_selected = options_.jselect == JSelect::kMinLoss
                         ? rec.i_minloss
                         : static_cast<int>(rec.iterates.size()) - 1;
    const StackedVector& zj = rec.iterates[rec.j_selected];
    rec.head_estimate = zj.head();
    rec.xhat = reconstruct_state(sys_, zj, window_);

    zbar_head_ = apriori_operator(sys_, cert_.L, zj, window_, N_).head();

    trace_.records.push_back(std::move(rec));
    return trace_.records.back();
}

// ---------------------------------------------------------------------------
// OptimalPmheEstimator
// ---------------------------------------------------------------------------

OptimalPmheEstimator::OptimalPmheEstimator(LtiSystem sys, Mat Cx, Vec dx, int N,
                                           StageWeights weights, StabilityCertificate cert,
                                           Vec x0_hat, bool require_valid_certificate)
    : sys_(std::move(sys)),
      Cx_(std::move(Cx)),
      dx_(std::move(dx)),
      N_(N),
      weights_(std::move(weights)),
      cert_(std::move(cert)),
      geom_(cert_.geometry()),
      window_(sys_.p(), sys_.m(), N),
      zbar_head_(std::move(x0_hat)) {
    if (require_valid_certificate && !cert_.valid)
        throw DesignError("OptimalPmheEstimator: certificate is not valid");
    trace_.x0_hat = zbar_head_;
}

const TraceRecord& OptimalPmheEstimator::step(const Vec& y, const Vec& u) {
    window_.push(y, u);
    trace_.ys.push_back(y);
    trace_.us.push_back(u);
    const int k = window_.time();
    const int ell = std::min(k, N_);

    const PolytopeSet set = build_polytope(Cx_, dx_, sys_, window_, N_);
    const CondensedProblem prob = build_condensed(sys_, window_, N_, weights_);
    const StackedVector zbar = StackedVector::from_head(zbar_head_, ell);

    // min f(z) + D(z, zbar): strictly convex since the metric is PD.
    const Mat M = geom_.metric(ell);
    const Vec c = prob.decision_of(zbar);
    const Mat H = prob.hessian() + M;
    const Vec g = -prob.linear() - M * c;
    const Mat rows = geom_.state_only() ? set.G : set.stacked();

    StackedVector zstar = zbar;
    try {
        zstar = prob.stacked_of(solve_qp(H, g, rows, set.E).z);
    } catch (const SolverError& e) {
        throw EstimatorError("optimal pMHE: QP failed at k=" + std::to_string(k), k, 0,
                             e.residual());
    }

    TraceRecord rec;
    rec.k = k;
    rec.ell = ell;
    rec.iterates.push_back(zstar);
    rec.losses.push_back(prob.eval_loss(zstar));
    rec.i_minloss = 0;
    rec.j_selected = 0;
    rec.head_estimate = zstar.head();
    rec.xhat = reconstruct_state(sys_, zstar, window_);

    zbar_head_ = apriori_operator(sys_, cert_.L, zstar, window_, N_).head();

    trace_.records.push_back(std::move(rec));
    return trace_.records.back();
}

// ---------------------------------------------------------------------------
// GmheEstimator
// ---------------------------------------------------------------------------

namespace {

BregmanGeometry euclidean_geometry(int n, int N, bool residuals_fixed) {
    if (residuals_fixed) return BregmanGeometry::state_quadratic(Mat::Identity(n, n));
    return BregmanGeometry::quadratic(Mat::Identity(n, n), Mat::Identity(N * n, N * n));
}

}  // namespace

GmheEstimator::GmheEstimator(LtiSystem sys, Mat Cx, Vec dx, int N, StageWeights weights,
                             GmheOptions options, Vec x0_hat)
    : sys_(std::move(sys)),
      Cx_(std::move(Cx)),
      dx_(std::move(dx)),
      N_(N),
      weights_(std::move(weights)),
      options_(std::move(options)),
      euclid_(euclidean_geometry(sys_.n(), N, weights_.residuals_fixed)),
      window_(sys_.p(), sys_.m(), N),
      apriori_head_(std::move(x0_hat)) {
    if (options_.step_size < 0.0) throw ConfigError("GmheEstimator: negative step size");
    if (options_.iterations < 0) throw ConfigError("GmheEstimator: negative iteration count");
    trace_.x0_hat = apriori_head_;
}

const TraceRecord& GmheEstimator::step(const Vec& y, const Vec& u) {
    window_.push(y, u);
    trace_.ys.push_back(y);
    trace_.us.push_back(u);
    const int k = window_.time();
    const int ell = std::min(k, N_);

    const PolytopeSet set = build_polytope(Cx_, dx_, sys_, window_, N_);
    const CondensedProblem prob = build_condensed(sys_, window_, N_, weights_);

    TraceRecord rec;
    rec.k = k;
    rec.ell = ell;
    StackedVector z = StackedVector::from_head(apriori_head_, ell);
    if (options_.luenberger_gain) z = project(euclid_, z, set);
    rec.iterates.push_back(z);
    rec.losses.push_back(prob.eval_loss(z));

    for (int i = 0; i < options_.iterations; ++i) {
        const StackedVector grad = prob.eval_gradient(rec.iterates.back());
        StackedVector next = rec.iterates.back();
        if (options_.step_size > 0.0) {
            try {
                next = mirror_subproblem(euclid_, grad, options_.step_size,
                                         rec.iterates.back(), set);
            } catch (const SolverError& e) {
                throw EstimatorError("GMHE: projected gradient step failed at k=" +
                                         std::to_string(k) + ", i=" + std::to_string(i),
                                     k, i, e.residual());
            }
        }
        if (next.data.norm() > 1e12)
            throw EstimatorError("GMHE: iterate diverged at k=" + std::to_string(k), k, i,
                                 next.data.norm());
        rec.iterates.push_back(next);
        rec.losses.push_back(prob.eval_loss(next));
        rec.etas.push_back(options_.step_size);
    }

    rec.i_minloss = argmin_loss(rec.losses);
    rec.j_selected = static_cast<int>(rec.iterates.size()) - 1;
    const StackedVector& zfin = rec.iterates.back();
    rec.head_estimate = zfin.head();
    rec.xhat = reconstruct_state(sys_, zfin, window_);

    // Next a priori head x_bar = A xhat_head + B u (+ optional observer
    // correction), computed now while the head-time entries are still in the
    // window; during the fill-in phase the head time does not advance.
    const Mat gain = options_.luenberger_gain
                         ? *options_.luenberger_gain
                         : Mat::Zero(sys_.n(), sys_.p());
    apriori_head_ = apriori_operator(sys_, gain, zfin, window_, N_).head();

    trace_.records.push_back(std::move(rec));
    return trace_.records.back();
}

// ---------------------------------------------------------------------------
// LuenbergerEstimator
// ---------------------------------------------------------------------------

LuenbergerEstimator::LuenbergerEstimator(LtiSystem sys, Mat L, Vec x0_hat)
    : sys_(std::move(sys)), L_(std::move(L)), xhat_(std::move(x0_hat)) {
    if (L_.rows() != sys_.n() || L_.cols() != sys_.p())
        throw DimensionError("LuenbergerEstimator: L shape");
    if (xhat_.size() != sys_.n()) throw DimensionError("LuenbergerEstimator: x0_hat size");
    trace_.x0_hat = xhat_;
}

const TraceRecord& LuenbergerEstimator::step(const Vec& y, const Vec& u) {
    trace_.ys.push_back(y);
    trace_.us.push_back(u);
    xhat_ = sys_.A() * xhat_ + sys_.B() * u + L_ * (y - sys_.C() * xhat_);
    ++k_;

    TraceRecord rec;
    rec.k = k_;
    rec.ell = 0;
    rec.head_estimate = xhat_;
    rec.xhat = xhat_;
    trace_.records.push_back(std::move(rec));
    return trace_.records.back();
}

}  // namespace pmhe
