// Acceptance suite: one self-contained check per release criterion, each
// printing a single [PASS]/[FAIL] line. Exit status is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pmhe/estimators.hpp"
#include "pmhe/regret.hpp"
#include "pmhe/scenario.hpp"

using namespace pmhe;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

struct ReactorSetup {
    LtiSystem sys;
    Mat Cx;
    Vec dx;
    StageWeights weights;
    StabilityCertificate cert;
    Vec x0_true, x0_hat;
    std::vector<Vec> xs, ys, us;

    ReactorSetup()
        : sys(Scenario::builtin_reactor().A, Scenario::builtin_reactor().B,
              Scenario::builtin_reactor().C),
          Cx(-Mat::Identity(3, 3)),
          dx(Vec::Zero(3)),
          weights{Mat::Constant(1, 1, 0.01), Mat::Zero(3, 3), true},
          x0_true((Vec(3) << 1.0, 0.5, 2.0).finished()),
          x0_hat(Vec::Zero(3)) {
        const Mat L = place_gain(sys, {{0.4754, 0}, {0.8497, 0}, {0.9727, 0}});
        const Mat Q = Mat::Identity(3, 3);
        MeasurementWindow scratch(1, 1, 2);
        scratch.push(Vec::Zero(1), Vec::Zero(1));
        scratch.push(Vec::Zero(1), Vec::Zero(1));
        cert = certify(sys, L, solve_lmi(sys, L, Q), Mat(), Q,
                       build_condensed(sys, scratch, 2, weights));
        Vec x = x0_true;
        for (int t = 0; t <= 105; ++t) {
            xs.push_back(x);
            ys.push_back(sys.C() * x);
            us.push_back(Vec::Zero(1));
            x = sys.A() * x;
        }
        xs.push_back(x);
    }

    EstimateTrace run_anytime(int it, ScheduleKind kind, int T = 100) const {
        StepSchedule sched = make_schedule(cert, kind, {it}, true);
        AnytimeEstimator est(sys, Cx, dx, 2, weights, cert, sched, x0_hat);
        for (int t = 0; t < T; ++t) est.step(ys[t], us[t]);
        return est.trace();
    }
};

// --- 1: GES envelope over every intermediate iterate --------------------

void criterion_1(const ReactorSetup& rig) {
    const auto t0 = std::chrono::steady_clock::now();
    const BregmanGeometry geom = rig.cert.geometry();
    const double init = (rig.x0_true - rig.x0_hat).squaredNorm();
    bool ok = true;
    std::string detail;
    for (const int it : {1, 5, 20, 200}) {
        const EstimateTrace trace = rig.run_anytime(it, ScheduleKind::kConstant);
        for (const TraceRecord& rec : trace.records) {
            const Vec head_true = rig.xs[rec.k - rec.ell];
            const double env =
                (rig.cert.gamma / rig.cert.sigma) * std::pow(rig.cert.beta_e, rec.k) * init +
                1e-8;
            for (const StackedVector& z : rec.iterates) {
                StackedVector z_true = StackedVector::from_head(head_true, rec.ell);
                if ((z_true.data - z.data).squaredNorm() > env) {
                    ok = false;
                    detail = "violated at it=" + std::to_string(it) +
                             ", k=" + std::to_string(rec.k);
                }
            }
        }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > 5.0) {
        ok = false;
        detail += " runtime " + std::to_string(secs) + "s > 5s";
    }
    report(1, "GES envelope over it in {1,5,20,200}, constant step", ok, detail);
}

// --- 2: per-iteration descent inequality ----------------------------------

void criterion_2(const ReactorSetup& rig) {
    const BregmanGeometry geom = rig.cert.geometry();
    bool ok = true;
    std::string detail;
    for (const int it : {1, 5, 20, 200}) {
        const EstimateTrace trace = rig.run_anytime(it, ScheduleKind::kConstant);
        for (const TraceRecord& rec : trace.records) {
            const StackedVector z_true =
                StackedVector::from_head(rig.xs[rec.k - rec.ell], rec.ell);
            for (size_t i = 0; i + 1 < rec.iterates.size(); ++i) {
                const double d_next = geom.distance(z_true, rec.iterates[i + 1]);
                const double d_prev = geom.distance(z_true, rec.iterates[i]);
                const double step2 =
                    (rec.iterates[i + 1].data - rec.iterates[i].data).squaredNorm();
                const double rhs = d_prev +
                                   0.5 * (rec.etas[i] * rig.cert.Lf - rig.cert.sigma) * step2 +
                                   1e-8;
                if (d_next > rhs) {
                    ok = false;
                    detail = "violated at it=" + std::to_string(it) +
                             ", k=" + std::to_string(rec.k) + ", i=" + std::to_string(i);
                }
            }
        }
    }
    report(2, "per-iteration descent inequality on the same runs", ok, detail);
}

// --- 3: regret-bound dominance and budget ordering ------------------------

void criterion_3(const ReactorSetup& rig) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    const ComparatorSequence comp = ComparatorSequence::true_states(rig.xs, 2, 101);
    std::vector<double> final_regret;

    for (const int it : {1, 5, 20}) {
        const EstimateTrace trace = rig.run_anytime(it, ScheduleKind::kInverseSqrt);
        const auto problems = replay_problems(rig.sys, trace.ys, trace.us, 2, rig.weights);
        const auto sets =
            replay_polytopes(rig.sys, rig.Cx, rig.dx, trace.ys, trace.us, 2);
        const auto R = regret_series(trace, comp, problems, &sets);
        const auto C =
            comparator_variation(comp, rig.sys, rig.cert.L, rig.ys, rig.us, 2, 100);
        for (double c : C)
            if (c > 1e-9) {
                ok = false;
                detail = "C_T above 1e-9";
            }
        const auto ec = empirical_constants(trace, problems, rig.cert.geometry(), rig.sys,
                                            rig.cert.L, 2, &comp);
        for (int T = 1; T <= 100; ++T) {
            const double bound = std::sqrt(static_cast<double>(T)) / it *
                                 (rig.cert.Lf / rig.cert.sigma) * ec.Dmax;
            if (R[T - 1] > bound) {
                ok = false;
                detail = "dominance failed at it=" + std::to_string(it) +
                         ", T=" + std::to_string(T);
            }
        }
        final_regret.push_back(R.back());
    }
    if (!(final_regret[0] > final_regret[1] && final_regret[1] > final_regret[2])) {
        ok = false;
        detail = "R(100) not strictly decreasing in it";
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > 10.0) {
        ok = false;
        detail += " runtime over budget";
    }
    report(3, "sqrt-schedule regret dominance with C_T = 0, decreasing R(100)", ok, detail);
}

// --- 4: anytime vs exact-solve ordering -----------------------------------

void criterion_4(const ReactorSetup& rig) {
    const ComparatorSequence comp = ComparatorSequence::true_states(rig.xs, 2, 101);

    const EstimateTrace any = rig.run_anytime(20, ScheduleKind::kInverseSqrt);
    OptimalPmheEstimator opt(rig.sys, rig.Cx, rig.dx, 2, rig.weights, rig.cert, rig.x0_hat);
    for (int t = 0; t < 100; ++t) opt.step(rig.ys[t], rig.us[t]);

    const auto problems = replay_problems(rig.sys, any.ys, any.us, 2, rig.weights);
    const double r_any = regret_series(any, comp, problems).back();
    const double r_opt = regret_series(opt.trace(), comp, problems).back();

    std::ostringstream os;
    os << "anytime R(100) = " << r_any << ", exact-solve R(100) = " << r_opt;
    report(4, "anytime it=20 strictly beats the exact-solve baseline", r_any < r_opt, os.str());
}

// --- 5: oracle equivalence on random instances -----------------------------

void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    oracles::TestRng rng(2024);
    bool ok = true;
    std::string detail;
    int done = 0;
    while (done < 50) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 1.999));
        const int N = 1 + static_cast<int>(rng.uniform(0.0, 1.999));
        const int qx = 1 + static_cast<int>(rng.uniform(0.0, 1.999));
        if ((N + 1) * qx > 6) continue;

        const Mat A = rng.stable_matrix(n, 0.95);
        const Mat C = rng.mat(1, n);
        const Mat B = rng.mat(n, 1);
        const LtiSystem sys(A, B, C);

        // State set with guaranteed interior around a reference point.
        const Mat Cx = rng.mat(qx, n);
        const Vec xref = rng.vec(n);
        const Vec dxv = Cx * xref + rng.vec(qx, 0.5, 1.5);

        MeasurementWindow w(1, 1, N);
        for (int t = 0; t < N + 1; ++t) w.push(rng.vec(1), rng.vec(1, -0.3, 0.3));

        const bool fixed = done % 2 == 0;
        StageWeights weights{rng.spd(1), fixed ? Mat::Zero(n, n) : rng.spd(n), fixed};
        CondensedProblem prob = build_condensed(sys, w, N, weights);
        PolytopeSet set;
        try {
            set = build_polytope(Cx, dxv, sys, w, N);
        } catch (const ConfigError&) {
            continue;
        }
        const int nd = prob.decision_dim();
        const Mat rows = fixed ? set.G : set.stacked();

        const Mat P = rng.spd(n);
        const Mat W = rng.spd(N * n);
        const BregmanGeometry geom =
            fixed ? BregmanGeometry::state_quadratic(P) : BregmanGeometry::quadratic(P, W);
        const Mat M = geom.metric(N);

        StackedVector center = StackedVector::zero(n, N);
        center.data = rng.vec((N + 1) * n, -2.0, 2.0);
        const StackedVector grad = prob.eval_gradient(center);
        const double eta = rng.uniform(0.05, 1.0);

        try {
            // Mirror step vs enumeration.
            const StackedVector ms = mirror_subproblem(geom, grad, eta, center, set);
            const Vec ms_ref = oracles::enumerate_qp(
                M, eta * prob.decision_of(grad) - M * prob.decision_of(center), rows, set.E);
            if ((prob.decision_of(ms) - ms_ref).norm() > 1e-7 * (1.0 + ms_ref.norm())) {
                ok = false;
                detail = "mirror step mismatch";
            }

            // Bregman projection vs enumeration.
            const StackedVector pr = project(geom, center, set);
            const Vec pr_ref =
                oracles::enumerate_qp(M, -(M * prob.decision_of(center)), rows, set.E);
            if ((prob.decision_of(pr) - pr_ref).norm() > 1e-7 * (1.0 + pr_ref.norm())) {
                ok = false;
                detail = "projection mismatch";
            }

            // Exact-solve subproblem vs enumeration.
            const Vec alg1 = solve_qp(prob.hessian() + M,
                                      -prob.linear() - M * prob.decision_of(center), rows,
                                      set.E)
                                 .z;
            const Vec alg1_ref = oracles::enumerate_qp(
                prob.hessian() + M, -prob.linear() - M * prob.decision_of(center), rows, set.E);
            if ((alg1 - alg1_ref).norm() > 1e-7 * (1.0 + alg1_ref.norm())) {
                ok = false;
                detail = "exact-solve QP mismatch";
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        ++done;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > 10.0) {
        ok = false;
        detail += " runtime over budget";
    }
    report(5, "QP, mirror-step and projection match enumeration on 50 instances", ok, detail);
}

// --- 6: certificate correctness --------------------------------------------

void criterion_6(const ReactorSetup& rig) {
    bool ok = true;
    std::string detail;

    if (rig.cert.lmi_margin > 1e-9) {
        ok = false;
        detail = "LMI margin " + std::to_string(rig.cert.lmi_margin);
    }

    const Mat X = rig.sys.A() - rig.cert.L * rig.sys.C();
    std::vector<double> eigs;
    const Eigen::VectorXcd ev = X.eigenvalues();
    for (int i = 0; i < 3; ++i) eigs.push_back(ev(i).real());
    std::sort(eigs.begin(), eigs.end());
    const double want[] = {0.4754, 0.8497, 0.9727};
    for (int i = 0; i < 3; ++i)
        if (std::abs(eigs[i] - want[i]) > 1e-6) {
            ok = false;
            detail = "closed-loop eigenvalue off";
        }

    const BregmanGeometry geom = rig.cert.geometry();
    oracles::TestRng rng(99);
    for (int t = 0; t < 1000; ++t) {
        const StackedVector z1 = StackedVector::from_head(rng.vec(3, -4.0, 4.0), 2);
        const StackedVector z2 = StackedVector::from_head(rng.vec(3, -4.0, 4.0), 2);
        const StackedVector p1 = StackedVector::from_head(X * z1.head(), 2);
        const StackedVector p2 = StackedVector::from_head(X * z2.head(), 2);
        const double lhs = geom.distance(p1, p2) - geom.distance(z1, z2);
        if (lhs > -rig.cert.c * (z1.data - z2.data).squaredNorm() + 1e-8) {
            ok = false;
            detail = "contraction inequality violated in sampling";
        }
    }
    report(6, "reactor certificate: LMI margin, spectrum, sampled contraction", ok, detail);
}

// --- 7: identity reproductions ---------------------------------------------

void criterion_7(const ReactorSetup& rig) {
    bool ok = true;
    std::string detail;

    // Three-points identity on random triples.
    oracles::TestRng rng(7);
    const BregmanGeometry geom = BregmanGeometry::quadratic(rng.spd(3), rng.spd(6));
    for (int t = 0; t < 1000; ++t) {
        StackedVector a = StackedVector::zero(3, 2), b = a, c = a;
        a.data = rng.vec(9, -5.0, 5.0);
        b.data = rng.vec(9, -5.0, 5.0);
        c.data = rng.vec(9, -5.0, 5.0);
        const double scale = std::abs(geom.distance(c, a)) + std::abs(geom.distance(a, b)) +
                             std::abs(geom.distance(c, b));
        if (std::abs(geom.three_points_gap(a, b, c)) > 1e-9 * (1.0 + scale)) {
            ok = false;
            detail = "three-points identity gap too large";
        }
    }

    // Zero loss at the true stacked state along a noiseless run.
    MeasurementWindow w(1, 1, 2);
    for (int t = 0; t < 100; ++t) {
        w.push(rig.ys[t], rig.us[t]);
        const CondensedProblem prob = build_condensed(rig.sys, w, 2, rig.weights);
        const StackedVector z_true =
            StackedVector::from_head(rig.xs[w.time() - prob.horizon()], prob.horizon());
        if (prob.eval_loss(z_true) > 1e-9) {
            ok = false;
            detail = "nonzero loss at the true state, k=" + std::to_string(t + 1);
        }
    }

    // Observer-corrected GMHE with the pMHE step equals anytime pMHE under
    // the identity metric.
    const Mat Q = 1e-3 * Mat::Identity(3, 3);
    MeasurementWindow scratch(1, 1, 2);
    scratch.push(Vec::Zero(1), Vec::Zero(1));
    scratch.push(Vec::Zero(1), Vec::Zero(1));
    const StabilityCertificate certI =
        certify(rig.sys, rig.cert.L, Mat::Identity(3, 3), Mat(), Q,
                build_condensed(rig.sys, scratch, 2, rig.weights));
    if (!certI.valid) {
        ok = false;
        detail = "identity-metric certificate unexpectedly invalid";
    } else {
        StepSchedule sched = make_schedule(certI, ScheduleKind::kConstant, {1}, false);
        AnytimeEstimator pmhe(rig.sys, rig.Cx, rig.dx, 2, rig.weights, certI, sched,
                              rig.x0_hat);
        GmheOptions opt;
        opt.luenberger_gain = certI.L;
        opt.step_size = certI.step_bound();
        opt.iterations = 1;
        GmheEstimator gmhe(rig.sys, rig.Cx, rig.dx, 2, rig.weights, opt, rig.x0_hat);
        for (int t = 0; t < 100; ++t) {
            const Vec xa = pmhe.step(rig.ys[t], rig.us[t]).xhat;
            const Vec xb = gmhe.step(rig.ys[t], rig.us[t]).xhat;
            if ((xa - xb).lpNorm<Eigen::Infinity>() > 1e-12) {
                ok = false;
                detail = "GMHE/pMHE estimates differ at k=" + std::to_string(t + 1);
            }
        }
    }
    report(7, "identities: three-points, zero loss at truth, GMHE equivalence", ok, detail);
}

// --- 8: constant-regret plateau with a GES comparator -----------------------

void criterion_8() {
    bool ok = true;
    std::string detail;

    // Fast 2-state system: the benchmark reactor's slowest mode (0.9727)
    // keeps per-step losses visible through T = 100, so the 1e-6 plateau is
    // demonstrated on a design whose error actually dies out by T = 50.
    Mat A(2, 2), C(1, 2);
    A << 0.5, 0.1, 0.0, 0.4;
    C << 1.0, 0.0;
    const LtiSystem sys(A, Mat::Zero(2, 1), C);
    const Mat Cx = -Mat::Identity(2, 2);
    const Vec dx = Vec::Constant(2, 10.0);  // x >= -10
    StageWeights weights{Mat::Identity(1, 1), Mat::Zero(2, 2), true};

    const Mat L = place_gain(sys, {{0.2, 0}, {0.25, 0}});
    const Mat Q = Mat::Identity(2, 2);
    MeasurementWindow scratch(1, 1, 2);
    scratch.push(Vec::Zero(1), Vec::Zero(1));
    scratch.push(Vec::Zero(1), Vec::Zero(1));
    const StabilityCertificate cert =
        certify(sys, L, solve_lmi(sys, L, Q), Mat(), Q, build_condensed(sys, scratch, 2, weights));
    if (!cert.valid) {
        report(8, "constant-regret plateau", false, "certificate invalid");
        return;
    }

    const Vec x0_true = (Vec(2) << 1.0, 0.5).finished();
    const Vec x0_hat = Vec::Zero(2);
    std::vector<Vec> xs, ys, us;
    Vec x = x0_true;
    for (int t = 0; t <= 105; ++t) {
        xs.push_back(x);
        ys.push_back(sys.C() * x);
        us.push_back(Vec::Zero(1));
        x = sys.A() * x;
    }
    xs.push_back(x);

    StepSchedule sched = make_schedule(cert, ScheduleKind::kConstant, {20}, true);
    AnytimeEstimator est(sys, Cx, dx, 2, weights, cert, sched, x0_hat);
    for (int t = 0; t < 100; ++t) est.step(ys[t], us[t]);
    const EstimateTrace trace = est.trace();

    // GES comparator: an observer with faster poles from a different guess.
    const Mat Lc = place_gain(sys, {{0.1, 0}, {0.15, 0}});
    std::vector<Vec> heads;
    Vec xc = (Vec(2) << 0.5, 0.0).finished();
    heads.push_back(xc);
    for (int t = 0; t <= 101; ++t) {
        xc = sys.A() * xc + Lc * (ys[t] - sys.C() * xc);
        heads.push_back(xc);
    }
    ComparatorSequence comp =
        ComparatorSequence::from_heads(heads, 2, 101, ComparatorKind::kGesEstimator);
    fit_ges_parameters(comp, xs, 2, 101);

    const auto problems = replay_problems(sys, trace.ys, trace.us, 2, weights);
    const auto sets = replay_polytopes(sys, Cx, dx, trace.ys, trace.us, 2);
    std::vector<double> R;
    try {
        R = regret_series(trace, comp, problems, &sets);
    } catch (const ConfigError& e) {
        report(8, "constant-regret plateau", false, e.what());
        return;
    }

    for (int T = 50; T <= 100; ++T)
        if (std::abs(R[T - 1] - R[99]) > 1e-6 * (1.0 + std::abs(R[99]))) {
            ok = false;
            detail = "no plateau at T=" + std::to_string(T);
        }

    const double bound = regret_bound_ges_comparator(cert, comp, StackedVector::from_head(x0_true, 0),
                                        StackedVector::from_head(x0_hat, 0));
    for (double r : R)
        if (r > bound) {
            ok = false;
            detail = "regret exceeds the constant bound";
        }
    std::ostringstream os;
    os << "R(100) = " << R[99] << ", bound = " << bound << ", fitted beta_c = " << comp.beta_c;
    report(8, "constant-regret plateau with a GES comparator", ok,
           detail.empty() ? os.str() : detail);
}

// --- 9: byte-identical reruns ----------------------------------------------

void criterion_9() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "pmhe_acceptance";
    fs::remove_all(dir);

    Scenario sc = Scenario::builtin_reactor();
    sc.noise_std = 0.05;  // force the RNG into the loop
    sc.seed = 7;

    const auto slurp = [](const fs::path& p) {
        std::ifstream is(p, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    };

    run_scenario(sc, (dir / "a").string(), OutputFormat::kCsv);
    run_scenario(sc, (dir / "b").string(), OutputFormat::kCsv);
    const bool ok =
        slurp(dir / "a" / "reactor_trace.csv") == slurp(dir / "b" / "reactor_trace.csv") &&
        slurp(dir / "a" / "reactor_regret.csv") == slurp(dir / "b" / "reactor_regret.csv") &&
        !slurp(dir / "a" / "reactor_trace.csv").empty();
    report(9, "equal seeds produce byte-identical csv output", ok);
}

}  // namespace

int main() {
    const ReactorSetup rig;
    criterion_1(rig);
    criterion_2(rig);
    criterion_3(rig);
    criterion_4(rig);
    criterion_5();
    criterion_6(rig);
    criterion_7(rig);
    criterion_8();
    criterion_9();
    if (g_failures == 0) std::printf("acceptance: all criteria passed\n");
    return g_failures;
}
