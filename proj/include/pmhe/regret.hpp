#ifndef PMHE_REGRET_HPP
#define PMHE_REGRET_HPP

#include <optional>
#include <ostream>
#include <vector>

#include "pmhe/design.hpp"
#include "pmhe/estimators.hpp"
#include "pmhe/types.hpp"

namespace pmhe {

enum class ComparatorKind { kTrueStates, kCustomFeasible, kGesEstimator };

// Feasible reference sequence z^c_k the accumulated losses are measured
// against. values[k-1] holds z^c_k; one entry past the trace length is
// needed to evaluate the variation C_T at the final time.
struct ComparatorSequence {
    ComparatorKind kind = ComparatorKind::kCustomFeasible;
    std::vector<StackedVector> values;
    StackedVector z0c;       // initial guess of the generating estimator
    double alpha_c = 1.0;    // GES envelope parameters (kGesEstimator)
    double beta_c = 0.0;

    static ComparatorSequence true_states(const std::vector<Vec>& xs, int N, int count);
    // heads[t] = estimate of x_t from the generating estimator, t = 0..count.
    static ComparatorSequence from_heads(const std::vector<Vec>& heads, int N, int count,
                                         ComparatorKind kind);
};

// Least-squares GES fit on log |x_t - head^c_t|: beta_c from the slope,
// alpha_c inflated so  |z_k - z^c_k| <= alpha_c beta_c^k |z_0 - z^c_0|
// holds at every observed k (alpha_c floored at 1).
void fit_ges_parameters(ComparatorSequence& comp, const std::vector<Vec>& xs_true, int N,
                        int count);

// Rebuild the per-step window problems from a recorded stream.
std::vector<CondensedProblem> replay_problems(const LtiSystem& sys, const std::vector<Vec>& ys,
                                              const std::vector<Vec>& us, int N,
                                              const StageWeights& weights);
std::vector<PolytopeSet> replay_polytopes(const LtiSystem& sys, const Mat& Cx, const Vec& dx,
                                          const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                          int N);

// Cumulative regret R(T) = sum_{k<=T} [min_i f_k(zhat_k^i) - f_k(z^c_k)],
// T = 1..trace length. Comparator feasibility is checked against sets when
// provided; an infeasible entry raises ConfigError naming k.
std::vector<double> regret_series(const EstimateTrace& trace, const ComparatorSequence& comp,
                                  const std::vector<CondensedProblem>& problems,
                                  const std::vector<PolytopeSet>* sets = nullptr);

// C_T = sum_{k<=T} |z^c_{k+1} - Phi_k(z^c_k)|, T = 1..count.
std::vector<double> comparator_variation(const ComparatorSequence& comp, const LtiSystem& sys,
                                         const Mat& L, const std::vector<Vec>& ys,
                                         const std::vector<Vec>& us, int N, int count);

struct EmpiricalConstants {
    double Gf = 0.0;    // max |grad f_k| over visited points
    double M = 0.0;     // max |grad psi| + max |grad psi o Phi_k|
    double Dmax = 0.0;  // max pairwise D_psi among same-step visited points
};

// Trajectory-empirical surrogates of the sup-over-set constants, taken over
// all recorded iterates plus (when given) the comparator points.
EmpiricalConstants empirical_constants(const EstimateTrace& trace,
                                       const std::vector<CondensedProblem>& problems,
                                       const BregmanGeometry& geom, const LtiSystem& sys,
                                       const Mat& L, int N,
                                       const ComparatorSequence* comp = nullptr);

// (sqrt(T)/it(T)) (Lf/sigma) (Dmax + M C_T); inverse-sqrt schedule with
// non-increasing budgets required.
double regret_bound_sqrt_schedule(const StabilityCertificate& cert, const StepSchedule& schedule,
                      double Dmax, double M, double CT, int T);

// Dmax/S_T + (Gf^2/2sigma) sum_k ssq_k/S_k + M C_T/S_T with S_k the per-step
// step-size sums; requires the sums to be non-increasing up to T.
double regret_bound_general(const StabilityCertificate& cert, const StepSchedule& schedule,
                      double Gf, double Dmax, double M, double CT, int T);

// Constant-regret bound for GES comparators.
double regret_bound_ges_comparator(const StabilityCertificate& cert, const ComparatorSequence& comp,
                      const StackedVector& z0, const StackedVector& zbar0);

// sqrt( sum_{k=N..Tsim} |e_k|^2 / (Tsim - N + 1) ) over the recorded head errors.
double rmse(const EstimateTrace& trace, int N, int Tsim);

struct RegretReport {
    std::vector<double> R;     // R(T), T = 1..Tsim
    std::vector<double> avgR;  // R(T)/T
    std::vector<double> C;     // C_T
    EmpiricalConstants constants;
    std::vector<double> bound2, bound3, bound4;  // empty when not applicable

    void write_csv(std::ostream& os) const;
};

}  // namespace pmhe

#endif  // PMHE_REGRET_HPP
