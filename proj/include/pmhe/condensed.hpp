#ifndef PMHE_CONDENSED_HPP
#define PMHE_CONDENSED_HPP

#include <vector>

#include "pmhe/lti_system.hpp"
#include "pmhe/stacked.hpp"
#include "pmhe/types.hpp"
#include "pmhe/window.hpp"

namespace pmhe {

// Quadratic stage costs: output residuals weighted by R (p x p, PSD), model
// residuals by Qw (n x n, PSD). With residuals_fixed the model residuals are
// pinned to zero and drop out of the decision space entirely, which is how
// the head-state-only estimation variant is realized.
struct StageWeights {
    Mat R;
    Mat Qw;
    bool residuals_fixed = false;
};

// Window loss f_k condensed onto z = [x; w]: every output residual is
// expressed through the dynamics as y_i - O_i x - C u~_i - sum_j C A^{i-j-1} w_j,
// so f_k(z) = 0.5 d'Hd - b'd + c0 over the active decision coordinates d.
class CondensedProblem {
public:
    int n() const { return n_; }
    int horizon() const { return horizon_; }
    int head_time() const { return head_time_; }
    bool residuals_fixed() const { return fixed_; }

    int dim() const { return (horizon_ + 1) * n_; }
    int decision_dim() const { return fixed_ ? n_ : dim(); }

    const Mat& hessian() const { return H_; }
    const Vec& linear() const { return b_; }
    double constant() const { return c0_; }

    double eval_loss(const StackedVector& z) const;
    StackedVector eval_gradient(const StackedVector& z) const;

    Vec decision_of(const StackedVector& z) const;
    StackedVector stacked_of(const Vec& d) const;

    // O_t = C A^t for stage t = 0..horizon-1.
    const std::vector<Mat>& obs_rows() const { return obs_rows_; }
    const Mat& stage_weight_R() const { return R_; }
    const Mat& stage_weight_Qw() const { return Qw_; }

    friend CondensedProblem build_condensed(const LtiSystem& sys,
                                            const MeasurementWindow& window, int N,
                                            const StageWeights& weights);

private:
    int n_ = 0, horizon_ = 0, head_time_ = 0;
    bool fixed_ = false;
    Mat H_;
    Vec b_;
    double c0_ = 0.0;
    Mat R_, Qw_;
    std::vector<Mat> obs_rows_;
};

CondensedProblem build_condensed(const LtiSystem& sys, const MeasurementWindow& window,
                                 int N, const StageWeights& weights);

}  // namespace pmhe

#endif  // PMHE_CONDENSED_HPP
