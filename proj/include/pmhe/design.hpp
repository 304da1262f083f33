#ifndef PMHE_DESIGN_HPP
#define PMHE_DESIGN_HPP

#include <complex>
#include <string>
#include <vector>

#include "pmhe/bregman.hpp"
#include "pmhe/condensed.hpp"
#include "pmhe/lti_system.hpp"
#include "pmhe/types.hpp"

namespace pmhe {

// Observer gain via Ackermann's formula, single-output systems only.
// Complex poles must appear in conjugate pairs. Throws DesignError when
// p > 1 (supply L directly) or when (A, C) is not observable.
Mat place_gain(const LtiSystem& sys, const std::vector<std::complex<double>>& poles);

// Unique P > 0 with (A-LC)' P (A-LC) - P = -(Q + eps I), eps = 1e-6 lam_min(Q),
// so the strict matrix inequality holds with margin. Requires A-LC Schur.
Mat solve_lmi(const LtiSystem& sys, const Mat& L, const Mat& Q);

enum class SmoothnessMode { kHessian, kClosedFormBound };

// Gradient-Lipschitz constant of the window loss. kHessian is the exact
// largest Hessian eigenvalue; kClosedFormBound is the norm-sum upper bound
// lam_max(R) * sum_t |C A^t|^2, extended with the residual-map and Qw terms
// when the residuals are free decision variables so it stays an upper bound.
double smoothness_constant(const CondensedProblem& prob, SmoothnessMode mode);

struct StabilityCertificate {
    Mat L, P, W, Q;
    bool residuals_fixed = false;
    double sigma = 0.0, gamma = 0.0;
    double c = 0.0;
    double Lf = 0.0;
    double beta_e = 0.0;  // 1 - 2c/gamma
    double beta = 0.0;    // sqrt(beta_e)
    double alpha = 0.0;   // sqrt(gamma/sigma)
    double lmi_margin = 0.0;        // lam_max((A-LC)'P(A-LC) - P + Q)
    double spectral_radius = 0.0;   // rho(A-LC)
    bool valid = false;

    double step_bound() const { return sigma / Lf; }
    BregmanGeometry geometry() const;
    std::string report() const;
};

// Bundles all stability constants and checks them: LMI margin <= 1e-9,
// c > 0, sigma <= gamma. An invalid input yields valid = false with the
// offending margin recorded rather than an exception.
StabilityCertificate certify(const LtiSystem& sys, const Mat& L, const Mat& P,
                             const Mat& W, const Mat& Q, const CondensedProblem& prob,
                             SmoothnessMode mode = SmoothnessMode::kClosedFormBound);

enum class ScheduleKind { kConstant, kInverseSqrt };

struct StepSchedule {
    ScheduleKind kind = ScheduleKind::kConstant;
    double base = 0.0;         // step scale, sigma/Lf unless overridden
    std::vector<int> budgets;  // it(k); k past the end repeats the last entry
    bool bound_mode = false;   // regret accounting requested

    int it(int k) const;
    double eta(int k, int i) const;
    double step_sum(int k) const;
    double step_sqsum(int k) const;
    bool step_sums_non_increasing(int T) const;
};

// Validated schedule factory: requires a valid certificate, caps the base at
// sigma/Lf, and in bound mode rejects increasing iteration budgets.
StepSchedule make_schedule(const StabilityCertificate& cert, ScheduleKind kind,
                           std::vector<int> budgets, bool bound_mode = false,
                           double base_override = -1.0);

}  // namespace pmhe

#endif  // PMHE_DESIGN_HPP
