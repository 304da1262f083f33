#ifndef PMHE_ESTIMATORS_HPP
#define PMHE_ESTIMATORS_HPP

#include <memory>
#include <optional>
#include <vector>

#include "pmhe/bregman.hpp"
#include "pmhe/condensed.hpp"
#include "pmhe/design.hpp"
#include "pmhe/lti_system.hpp"
#include "pmhe/polytope.hpp"
#include "pmhe/stacked.hpp"
#include "pmhe/types.hpp"
#include "pmhe/window.hpp"

namespace pmhe {

// Solver failure inside an estimator step, tagged with the time index and
// mirror-iteration index it happened at (-1 = warm start / a priori solve).
class EstimatorError : public SolverError {
public:
    EstimatorError(const std::string& what, int k, int iter, double residual)
        : SolverError(what, residual), k_(k), iter_(iter) {}
    int k() const { return k_; }
    int iter() const { return iter_; }

private:
    int k_, iter_;
};

enum class JSelect { kLastIterate, kMinLoss };

struct TraceRecord {
    int k = 0;
    int ell = 0;
    std::vector<StackedVector> iterates;  // warm start first, then mirror outputs
    std::vector<double> losses;           // one per iterate
    std::vector<double> etas;             // step sizes actually used
    int j_selected = 0;
    int i_minloss = 0;
    Vec head_estimate;
    Vec xhat;

    // Filled by the simulation runner when the true trajectory is known.
    bool has_truth = false;
    Vec x_true, x_true_head;
    double err_cur = 0.0;
    double err_head = 0.0;
    double dpsi = 0.0;  // D(z_k, zhat^{j(k)})
};

struct EstimateTrace {
    std::vector<TraceRecord> records;
    std::vector<Vec> ys, us;  // stream as fed, index = discrete time
    Vec x0_hat;
};

// Forward prediction of StateEst: x_k = A^ell x_head + sum A^{k-1-j} (B u_j + w_j),
// with the indexing collapsing onto [0, k) while the window is still filling.
Vec reconstruct_state(const LtiSystem& sys, const StackedVector& zhat,
                      const MeasurementWindow& window);

// A priori operator: Luenberger-corrects the head and zeroes the residual
// block once the window is full; while it is filling, the head time does not
// advance yet and the vector is only padded by one zero residual block.
StackedVector apriori_operator(const LtiSystem& sys, const Mat& L,
                               const StackedVector& zhat, const MeasurementWindow& window,
                               int N);

// Common step-driven interface: step(y_t, u_t) consumes the data of discrete
// time t (t = number of steps taken so far) and produces the estimate of
// x_{t+1}. One estimator instance owns its window and is single-threaded.
class Estimator {
public:
    virtual ~Estimator() = default;
    virtual const TraceRecord& step(const Vec& y, const Vec& u) = 0;
    const EstimateTrace& trace() const { return trace_; }
    EstimateTrace& mutable_trace() { return trace_; }

protected:
    EstimateTrace trace_;
};

struct AnytimeOptions {
    JSelect jselect = JSelect::kLastIterate;
    bool warm_constant_centering = false;  // center every mirror step at zbar_k
    bool require_valid_certificate = true;
};

// Algorithm: per measurement, Bregman-project the a priori estimate, run
// it(k) mirror steps, pick the j(k) iterate, and propagate the a priori
// through the observer dynamics.
class AnytimeEstimator : public Estimator {
public:
    AnytimeEstimator(LtiSystem sys, Mat Cx, Vec dx, int N, StageWeights weights,
                     StabilityCertificate cert, StepSchedule schedule, Vec x0_hat,
                     AnytimeOptions options = {});

    const TraceRecord& step(const Vec& y, const Vec& u) override;

    const StabilityCertificate& certificate() const { return cert_; }
    const BregmanGeometry& geometry() const { return geom_; }
    int horizon() const { return N_; }

private:
    LtiSystem sys_;
    Mat Cx_;
    Vec dx_;
    int N_;
    StageWeights weights_;
    StabilityCertificate cert_;
    StepSchedule schedule_;
    BregmanGeometry geom_;
    AnytimeOptions options_;
    MeasurementWindow window_;
    Vec zbar_head_;
};

// Exact-solve baseline: minimizes f_k + D(., zbar_k) over the constraint set
// at every step instead of iterating.
class OptimalPmheEstimator : public Estimator {
public:
    OptimalPmheEstimator(LtiSystem sys, Mat Cx, Vec dx, int N, StageWeights weights,
                         StabilityCertificate cert, Vec x0_hat,
                         bool require_valid_certificate = true);

    const TraceRecord& step(const Vec& y, const Vec& u) override;

private:
    LtiSystem sys_;
    Mat Cx_;
    Vec dx_;
    int N_;
    StageWeights weights_;
    StabilityCertificate cert_;
    BregmanGeometry geom_;
    MeasurementWindow window_;
    Vec zbar_head_;
};

struct GmheOptions {
    std::optional<Mat> luenberger_gain;  // set: observer-corrected a priori
    double step_size = 0.0;
    int iterations = 1;
};

// Gradient-descent MHE baseline: plain Euclidean gradient steps on f_k from
// a model-predicted a priori. The classical form of this estimator is
// unconstrained; each step here is followed by a projection so comparisons
// stay on the constrained problem. With the observer-corrected a priori the
// pipeline matches anytime pMHE under the identity geometry, including the
// initial projection.
class GmheEstimator : public Estimator {
public:
    GmheEstimator(LtiSystem sys, Mat Cx, Vec dx, int N, StageWeights weights,
                  GmheOptions options, Vec x0_hat);

    const TraceRecord& step(const Vec& y, const Vec& u) override;

private:
    LtiSystem sys_;
    Mat Cx_;
    Vec dx_;
    int N_;
    StageWeights weights_;
    GmheOptions options_;
    BregmanGeometry euclid_;
    MeasurementWindow window_;
    Vec apriori_head_;
};

// Plain observer recursion, the stability baseline.
class LuenbergerEstimator : public Estimator {
public:
    LuenbergerEstimator(LtiSystem sys, Mat L, Vec x0_hat);

    const TraceRecord& step(const Vec& y, const Vec& u) override;

private:
    LtiSystem sys_;
    Mat L_;
    Vec xhat_;
    int k_ = 0;
};

}  // namespace pmhe

#endif  // PMHE_ESTIMATORS_HPP
