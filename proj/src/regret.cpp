#include "pmhe/regret.hpp"

#include <algorithm>
#include <cmath>

#include "pmhe/report.hpp"

namespace pmhe {

namespace {

int effective_horizon(int k, int N) { return std::min(k, N); }

// Stacked estimate of an estimator without per-step iterates (observer
// baselines): head value is the estimate that was current at the head time.
StackedVector delayed_stacked(const EstimateTrace& trace, int k, int ell) {
    const int t0 = k - ell;
    const Vec& head = t0 == 0 ? trace.x0_hat : trace.records[t0 - 1].xhat;
    return StackedVector::from_head(head, ell);
}

}  // namespace

ComparatorSequence ComparatorSequence::true_states(const std::vector<Vec>& xs, int N,
                                                   int count) {
    ComparatorSequence comp;
    comp.kind = ComparatorKind::kTrueStates;
    for (int k = 1; k <= count; ++k) {
        const int ell = effective_horizon(k, N);
        if (k - ell < 0 || k - ell >= static_cast<int>(xs.size()))
            throw DimensionError("ComparatorSequence::true_states: state sequence too short");
        comp.values.push_back(StackedVector::from_head(xs[k - ell], ell));
    }
    comp.z0c = StackedVector::from_head(xs[0], 0);
    comp.beta_c = 0.0;
    comp.alpha_c = 1.0;
    return comp;
}

ComparatorSequence ComparatorSequence::from_heads(const std::vector<Vec>& heads, int N,
                                                  int count, ComparatorKind kind) {
    ComparatorSequence comp;
    comp.kind = kind;
    for (int k = 1; k <= count; ++k) {
        const int ell = effective_horizon(k, N);
        if (k - ell >= static_cast<int>(heads.size()))
            throw DimensionError("ComparatorSequence::from_heads: head sequence too short");
        comp.values.push_back(StackedVector::from_head(heads[k - ell], ell));
    }
    comp.z0c = StackedVector::from_head(heads[0], 0);
    return comp;
}

void fit_ges_parameters(ComparatorSequence& comp, const std::vector<Vec>& xs_true, int N,
                        int count) {
    const double e0 = (xs_true[0] - comp.z0c.head()).norm();
    std::vector<double> ks, logs, errs;
    errs.reserve(count);
    for (int k = 1; k <= count; ++k) {
        const int ell = effective_horizon(k, N);
        const double ek = (xs_true[k - ell] - comp.values[k - 1].head()).norm();
        errs.push_back(ek);
        if (ek > 1e-280) {
            ks.push_back(static_cast<double>(k));
            logs.push_back(std::log(ek));
        }
    }
    if (e0 <= 0.0 || ks.size() < 2) {
        comp.alpha_c = 1.0;
        comp.beta_c = 0.0;
        return;
    }
    // least-squares slope of log e_k vs k
    double mk = 0, ml = 0;
    for (size_t i = 0; i < ks.size(); ++i) {
        mk += ks[i];
        ml += logs[i];
    }
    mk /= ks.size();
    ml /= ks.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < ks.size(); ++i) {
        num += (ks[i] - mk) * (logs[i] - ml);
        den += (ks[i] - mk) * (ks[i] - mk);
    }
    double beta_c = std::exp(num / den);
    beta_c = std::min(std::max(beta_c, 0.0), 1.0 - 1e-12);
    double alpha_c = 1.0;
    for (int k = 1; k <= count; ++k)
        if (errs[k - 1] > 0.0)
            alpha_c = std::max(alpha_c, errs[k - 1] / (std::pow(beta_c, k) * e0));
    comp.beta_c = beta_c;
    comp.alpha_c = alpha_c;
}

std::vector<CondensedProblem> replay_problems(const LtiSystem& sys, const std::vector<Vec>& ys,
                                              const std::vector<Vec>& us, int N,
                                              const StageWeights& weights) {
    MeasurementWindow window(sys.p(), sys.m(), N);
    std::vector<CondensedProblem> out;
    for (size_t t = 0; t < ys.size(); ++t) {
        window.push(ys[t], us[t]);
        out.push_back(build_condensed(sys, window, N, weights));
    }
    return out;
}

std::vector<PolytopeSet> replay_polytopes(const LtiSystem& sys, const Mat& Cx, const Vec& dx,
                                          const std::vector<Vec>& ys, const std::vector<Vec>& us,
                                          int N) {
    MeasurementWindow window(sys.p(), sys.m(), N);
    std::vector<PolytopeSet> out;
    for (size_t t = 0; t < ys.size(); ++t) {
        window.push(ys[t], us[t]);
        out.push_back(build_polytope(Cx, dx, sys, window, N));
    }
    return out;
}

std::vector<double> regret_series(const EstimateTrace& trace, const ComparatorSequence& comp,
                                  const std::vector<CondensedProblem>& problems,
                                  const std::vector<PolytopeSet>* sets) {
    const size_t T = trace.records.size();
    if (comp.values.size() < T || problems.size() < T)
        throw DimensionError("regret_series: comparator or problem sequence too short");

    std::vector<double> out;
    out.reserve(T);
    double acc = 0.0;
    for (size_t k1 = 0; k1 < T; ++k1) {
        const CondensedProblem& prob = problems[k1];
        const StackedVector& zc = comp.values[k1];
        if (sets && !(*sets)[k1].contains(zc))
            throw ConfigError("regret_series: comparator infeasible at k=" +
                              std::to_string(k1 + 1));
        const TraceRecord& rec = trace.records[k1];
        double algo;
        if (!rec.losses.empty()) {
            algo = *std::min_element(rec.losses.begin(), rec.losses.end());
        } else {
            algo = prob.eval_loss(delayed_stacked(trace, rec.k, prob.horizon()));
        }
        acc += algo - prob.eval_loss(zc);
        out.push_back(acc);
    }
    return out;
}

std::vector<double> comparator_variation(const ComparatorSequence& comp, const LtiSystem& sys,
                                         const Mat& L, const std::vector<Vec>& ys,
                                         const std::vector<Vec>& us, int N, int count) {
    if (static_cast<int>(comp.values.size()) < count + 1)
        throw DimensionError("comparator_variation: need z^c up to T+1");
    MeasurementWindow window(sys.p(), sys.m(), N);
    std::vector<double> out;
    double acc = 0.0;
    for (int k = 1; k <= count; ++k) {
        window.push(ys[k - 1], us[k - 1]);
        const StackedVector phi = apriori_operator(sys, L, comp.values[k - 1], window, N);
        acc += (comp.values[k].data - phi.data).norm();
        out.push_back(acc);
    }
    return out;
}

EmpiricalConstants empirical_constants(const EstimateTrace& trace,
                                       const std::vector<CondensedProblem>& problems,
                                       const BregmanGeometry& geom, const LtiSystem& sys,
                                       const Mat& L, int N, const ComparatorSequence* comp) {
    EmpiricalConstants out;
    double M1 = 0.0, M2 = 0.0;
    MeasurementWindow window(sys.p(), sys.m(), N);
    for (size_t k1 = 0; k1 < trace.records.size(); ++k1) {
        window.push(trace.ys[k1], trace.us[k1]);
        const TraceRecord& rec = trace.records[k1];
        const CondensedProblem& prob = problems[k1];

        std::vector<const StackedVector*> pts;
        for (const auto& z : rec.iterates) pts.push_back(&z);
        if (comp) pts.push_back(&comp->values[k1]);

        for (const StackedVector* z : pts) {
            out.Gf = std::max(out.Gf, prob.eval_gradient(*z).data.norm());
            M1 = std::max(M1, geom.grad_psi(*z).data.norm());
            const StackedVector phi = apriori_operator(sys, L, *z, window, N);
            M2 = std::max(M2, geom.grad_psi(phi).data.norm());
        }
        for (size_t a = 0; a < pts.size(); ++a)
            for (size_t b = 0; b < pts.size(); ++b)
                if (a != b) out.Dmax = std::max(out.Dmax, geom.distance(*pts[a], *pts[b]));
    }
    out.M = M1 + M2;
    return out;
}

double regret_bound_sqrt_schedule(const StabilityCertificate& cert, const StepSchedule& schedule,
                      double Dmax, double M, double CT, int T) {
    if (schedule.kind != ScheduleKind::kInverseSqrt)
        throw ConfigError("regret_bound_sqrt_schedule: inverse-sqrt schedule required");
    for (int k = 1; k < T; ++k)
        if (schedule.it(k + 1) > schedule.it(k))
            throw ConfigError("regret_bound_sqrt_schedule: it(k) must be non-increasing");
    return std::sqrt(static_cast<double>(T)) / schedule.it(T) * (cert.Lf / cert.sigma) *
           (Dmax + M * CT);
}

double regret_bound_general(const StabilityCertificate& cert, const StepSchedule& schedule,
                      double Gf, double Dmax, double M, double CT, int T) {
    if (!schedule.step_sums_non_increasing(T))
        throw ConfigError("regret_bound_general: step-size sums must be non-increasing");
    double mid = 0.0;
    for (int k = 1; k <= T; ++k) mid += schedule.step_sqsum(k) / schedule.step_sum(k);
    const double ST = schedule.step_sum(T);
    return Dmax / ST + Gf * Gf / (2.0 * cert.sigma) * mid + M * CT / ST;
}

double regret_bound_ges_comparator(const StabilityCertificate& cert, const ComparatorSequence& comp,
                      const StackedVector& z0, const StackedVector& zbar0) {
    if (comp.kind != ComparatorKind::kGesEstimator)
        throw ConfigError("regret_bound_ges_comparator: GES comparator required");
    if (!cert.valid || cert.beta >= 1.0 || comp.beta_c >= 1.0)
        throw ConfigError("regret_bound_ges_comparator: contraction rates must be below 1");
    const double b2 = cert.beta * cert.beta;
    const double bc2 = comp.beta_c * comp.beta_c;
    const double d_init = (z0.data - zbar0.data).squaredNorm();
    const double d_comp = (z0.data - comp.z0c.data).squaredNorm();
    return 0.5 * cert.Lf *
           (cert.alpha * cert.alpha * b2 / (1.0 - b2) * d_init +
            comp.alpha_c * comp.alpha_c * bc2 / (1.0 - bc2) * d_comp);
}

double rmse(const EstimateTrace& trace, int N, int Tsim) {
    if (static_cast<int>(trace.records.size()) < Tsim || N < 1 || N > Tsim)
        throw DimensionError("rmse: trace does not cover k = N..Tsim");
    double acc = 0.0;
    for (int k = N; k <= Tsim; ++k) {
        const TraceRecord& rec = trace.records[k - 1];
        if (!rec.has_truth) throw DimensionError("rmse: record lacks truth at k=" + std::to_string(k));
        acc += rec.err_head * rec.err_head;
    }
    return std::sqrt(acc / static_cast<double>(Tsim - N + 1));
}

void RegretReport::write_csv(std::ostream& os) const {
    os << "T,R,R/T,C_T,bound2,bound3,bound4\n";
    for (size_t i = 0; i < R.size(); ++i) {
        os << (i + 1) << ',' << fmt17(R[i]) << ',' << fmt17(avgR[i]) << ','
           << (i < C.size() ? fmt17(C[i]) : std::string()) << ','
           << (i < bound2.size() ? fmt17(bound2[i]) : std::string()) << ','
           << (i < bound3.size() ? fmt17(bound3[i]) : std::string()) << ','
           << (i < bound4.size() ? fmt17(bound4[i]) : std::string()) << '\n';
    }
}

}  // namespace pmhe
