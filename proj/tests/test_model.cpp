#include <doctest.h>

#include "oracles.hpp"
#include "pmhe/condensed.hpp"
#include "pmhe/lti_system.hpp"
#include "pmhe/polytope.hpp"
#include "pmhe/scenario.hpp"

using namespace pmhe;

namespace {

LtiSystem reactor() {
    const Scenario sc = Scenario::builtin_reactor();
    return LtiSystem(sc.A, sc.B, sc.C);
}

// Push a noiseless trajectory of the given length into a fresh window.
MeasurementWindow simulate_window(const LtiSystem& sys, const Vec& x0, int steps, int N) {
    MeasurementWindow w(sys.p(), sys.m(), N);
    Vec x = x0;
    for (int t = 0; t < steps; ++t) {
        w.push(sys.C() * x, Vec::Zero(sys.m()));
        x = sys.A() * x;
    }
    return w;
}

}  // namespace

TEST_CASE("lti system validates dimensions and reports detectability") {
    CHECK_THROWS_AS(LtiSystem(Mat::Zero(2, 3), Mat::Zero(2, 1), Mat::Zero(1, 2)), ConfigError);
    CHECK_THROWS_AS(LtiSystem(Mat::Zero(2, 2), Mat::Zero(3, 1), Mat::Zero(1, 2)), ConfigError);
    CHECK_THROWS_AS(LtiSystem(Mat::Zero(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 3)), ConfigError);

    CHECK(reactor().detectable());

    // Unstable unobserved mode: x2 has eigenvalue 2 and never reaches y.
    Mat A(2, 2), C(1, 2);
    A << 0.5, 0.0, 0.0, 2.0;
    C << 1.0, 0.0;
    CHECK_FALSE(LtiSystem(A, Mat::Zero(2, 0), C).detectable());
    // Stable unobserved mode is fine for detectability.
    A(1, 1) = 0.3;
    CHECK(LtiSystem(A, Mat::Zero(2, 0), C).detectable());
}

TEST_CASE("measurement window holds the most recent N pairs") {
    MeasurementWindow w(1, 1, 3);
    CHECK(w.size() == 0);
    for (int t = 0; t < 5; ++t) w.push(Vec::Constant(1, t), Vec::Constant(1, 10.0 + t));
    CHECK(w.time() == 5);
    CHECK(w.size() == 3);
    CHECK(w.oldest_time() == 2);
    CHECK(w.y_at(2)(0) == 2.0);
    CHECK(w.u_at(4)(0) == 14.0);
    CHECK_THROWS_AS(w.y_at(1), DimensionError);
    CHECK_THROWS_AS(w.y_at(5), DimensionError);
    CHECK_THROWS_AS(w.push(Vec::Zero(2), Vec::Zero(1)), DimensionError);
}

TEST_CASE("stacked vector shape invariants") {
    const StackedVector z = StackedVector::zero(3, 2);
    CHECK(z.dim() == 9);
    CHECK(z.data.size() == 9);
    CHECK_THROWS_AS(StackedVector(Vec::Zero(8), 3, 2), DimensionError);
    const StackedVector h = StackedVector::from_head(Vec::Constant(2, 1.5), 1);
    CHECK(h.head()(0) == 1.5);
    CHECK(h.w(0).norm() == 0.0);
    CHECK_THROWS_AS(h.w(1), DimensionError);
}

TEST_CASE("noiseless reactor window: loss vanishes at the true stacked state") {
    const LtiSystem sys = reactor();
    Vec x0(3);
    x0 << 1.0, 0.5, 2.0;
    const int N = 2;
    const MeasurementWindow w = simulate_window(sys, x0, 5, N);

    StageWeights weights{Mat::Constant(1, 1, 0.01), Mat::Zero(3, 3), true};
    const CondensedProblem prob = build_condensed(sys, w, N, weights);

    // True head state at time k - N = 3.
    const Vec head = sys.pow_A(3) * x0;
    const StackedVector z_true = StackedVector::from_head(head, N);
    CHECK(prob.eval_loss(z_true) <= 1e-9);
    CHECK(prob.eval_gradient(z_true).data.norm() <= 1e-9);
}

TEST_CASE("zero window with identity weight gives zero loss at zero") {
    Mat A = 0.5 * Mat::Identity(2, 2), C = Mat::Identity(2, 2);
    const LtiSystem sys(A, Mat::Zero(2, 1), C);
    MeasurementWindow w(2, 1, 2);
    w.push(Vec::Zero(2), Vec::Zero(1));
    w.push(Vec::Zero(2), Vec::Zero(1));
    StageWeights weights{Mat::Identity(2, 2), Mat::Zero(2, 2), true};
    const CondensedProblem prob = build_condensed(sys, w, 2, weights);
    CHECK(prob.eval_loss(StackedVector::zero(2, 2)) == 0.0);
}

TEST_CASE("condensed loss matches the roll-out oracle on random instances") {
    oracles::TestRng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 3;
        const int N = 1 + trial % 3;
        const Mat A = rng.stable_matrix(n, 1.1);  // mild instability is fine here
        const Mat B = rng.mat(n, 1);
        const Mat C = rng.mat(1, n);
        const LtiSystem sys(A, B, C);

        MeasurementWindow w(1, 1, N);
        std::vector<Vec> ys, us;
        for (int t = 0; t < N; ++t) {
            ys.push_back(rng.vec(1));
            us.push_back(rng.vec(1));
            w.push(ys.back(), us.back());
        }

        const bool fixed = trial % 2 == 0;
        const Mat R = rng.spd(1);
        const Mat Qw = fixed ? Mat::Zero(n, n) : rng.spd(n);
        StageWeights weights{R, Qw, fixed};
        const CondensedProblem prob = build_condensed(sys, w, N, weights);

        StackedVector z = StackedVector::zero(n, N);
        z.head() = rng.vec(n);
        if (!fixed) z.residuals() = rng.vec(N * n);

        const double expected = oracles::rollout_loss(sys, ys, us, R, Qw, z);
        CHECK(prob.eval_loss(z) == doctest::Approx(expected).epsilon(1e-8));
    }
}

TEST_CASE("residual coordinates are excluded from the loss when pinned") {
    const LtiSystem sys = reactor();
    Vec x0(3);
    x0 << 0.4, 1.0, 0.2;
    const MeasurementWindow w = simulate_window(sys, x0, 4, 2);
    StageWeights weights{Mat::Constant(1, 1, 0.01), Mat::Zero(3, 3), true};
    const CondensedProblem prob = build_condensed(sys, w, 2, weights);

    StackedVector z = StackedVector::from_head(Vec::Constant(3, 0.7), 2);
    const double base = prob.eval_loss(z);
    z.residuals() = Vec::Constant(6, 3.14);
    CHECK(prob.eval_loss(z) == base);
    CHECK(prob.eval_gradient(z).residuals().norm() == 0.0);
}

TEST_CASE("gradient agrees with central finite differences") {
    oracles::TestRng rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 2 + trial % 2;
        const LtiSystem sys(rng.stable_matrix(n, 1.05), rng.mat(n, 1), rng.mat(1, n));
        MeasurementWindow w(1, 1, 2);
        for (int t = 0; t < 3; ++t) w.push(rng.vec(1), rng.vec(1));

        const bool fixed = trial % 2 == 0;
        StageWeights weights{rng.spd(1), fixed ? Mat::Zero(n, n) : rng.spd(n), fixed};
        const CondensedProblem prob = build_condensed(sys, w, 2, weights);
        StackedVector z = StackedVector::zero(n, 2);
        z.data = rng.vec(3 * n);
        const Vec grad = prob.eval_gradient(z).data;

        const auto loss = [&](const Vec& v) {
            return prob.eval_loss(StackedVector(v, n, 2));
        };
        const Vec fd = oracles::fd_gradient(loss, z.data);
        CHECK((grad - fd).norm() <= 1e-5 * (1.0 + fd.norm()));
    }
}

TEST_CASE("gradient vanishes at the unconstrained minimizer") {
    oracles::TestRng rng(11);
    const Mat A = rng.stable_matrix(2);
    const Mat C = rng.mat(1, 2);
    const LtiSystem sys(A, Mat::Zero(2, 0), C);
    MeasurementWindow w(1, 0, 2);
    w.push(rng.vec(1), Vec::Zero(0));
    w.push(rng.vec(1), Vec::Zero(0));
    StageWeights weights{Mat::Identity(1, 1), Mat(0.5 * Mat::Identity(2, 2)), false};
    const CondensedProblem prob = build_condensed(sys, w, 2, weights);

    const Vec zmin = (prob.hessian() + 1e-12 * Mat::Identity(6, 6)).ldlt().solve(prob.linear());
    CHECK(prob.eval_gradient(StackedVector(zmin, 2, 2)).data.norm() <= 1e-8);
}

TEST_CASE("stacked polytope of the nonnegativity set") {
    const LtiSystem sys = reactor();
    const Mat Cx = -Mat::Identity(3, 3);
    const Vec dx = Vec::Zero(3);
    const MeasurementWindow w = simulate_window(sys, Vec::Constant(3, 1.0), 4, 2);
    const PolytopeSet set = build_polytope(Cx, dx, sys, w, 2);

    CHECK(set.rows() == 9);
    CHECK(set.E.norm() == 0.0);  // B = 0
    for (int r = 0; r <= 2; ++r)
        CHECK((set.G.middleRows(3 * r, 3) + sys.pow_A(r)).norm() == 0.0);

    // True trajectory stays feasible.
    const Vec head = sys.pow_A(2) * Vec::Constant(3, 1.0);
    CHECK(set.contains(StackedVector::from_head(head, 2)));
    CHECK_FALSE(set.contains(StackedVector::from_head(Vec::Constant(3, -0.5), 2)));
}

TEST_CASE("degenerate horizon polytope reduces to the state set") {
    Mat A = 0.5 * Mat::Identity(2, 2);
    const LtiSystem sys(A, Mat::Zero(2, 1), Mat::Identity(2, 2));
    MeasurementWindow w(2, 1, 0);
    Mat Cx(1, 2);
    Cx << 1.0, 1.0;
    const Vec dx = Vec::Constant(1, 2.0);
    const PolytopeSet set = build_polytope(Cx, dx, sys, w, 0);
    CHECK(set.horizon == 0);
    CHECK((set.G - Cx).norm() == 0.0);
    CHECK((set.E - dx).norm() == 0.0);
}

TEST_CASE("polytope rhs tracks the input window") {
    oracles::TestRng rng(23);
    const Mat A = rng.stable_matrix(2);
    const Mat B = rng.mat(2, 1);
    const LtiSystem sys(A, B, Mat::Identity(2, 2));
    const int N = 2;
    MeasurementWindow w(2, 1, N);
    std::vector<Vec> us;
    for (int t = 0; t < 3; ++t) {
        us.push_back(rng.vec(1));
        w.push(rng.vec(2), us.back());
    }
    Mat Cx(1, 2);
    Cx << 0.3, -0.7;
    const Vec dx = Vec::Constant(1, 5.0);
    const PolytopeSet set = build_polytope(Cx, dx, sys, w, N);

    // utilde_r by explicit forward accumulation of the windowed inputs.
    Vec ut = Vec::Zero(2);
    for (int r = 0; r <= N; ++r) {
        if (r > 0) ut = A * ut + B * us[us.size() - N + r - 1];
        CHECK((set.E.segment(r, 1) - (dx - Cx * ut)).norm() <= 1e-12);
    }
}

TEST_CASE("empty-interior state set is rejected") {
    Mat A = 0.5 * Mat::Identity(2, 2);
    const LtiSystem sys(A, Mat::Zero(2, 1), Mat::Identity(2, 2));
    MeasurementWindow w(2, 1, 1);
    w.push(Vec::Zero(2), Vec::Zero(1));
    Mat Cx(2, 2);
    Cx << 1.0, 0.0, -1.0, 0.0;  // x1 <= 0 and x1 >= 1
    Vec dx(2);
    dx << 0.0, -1.0;
    CHECK_THROWS_AS(build_polytope(Cx, dx, sys, w, 1), ConfigError);
}

TEST_CASE("weight dimension mismatch is a configuration error") {
    const LtiSystem sys = reactor();
    const MeasurementWindow w = simulate_window(sys, Vec::Constant(3, 1.0), 3, 2);
    StageWeights bad{Mat::Identity(2, 2), Mat::Zero(3, 3), true};  // R is p x p = 1 x 1
    CHECK_THROWS_AS(build_condensed(sys, w, 2, bad), ConfigError);

    StageWeights weights{Mat::Constant(1, 1, 0.01), Mat::Zero(3, 3), true};
    const CondensedProblem prob = build_condensed(sys, w, 2, weights);
    CHECK_THROWS_AS(prob.eval_loss(StackedVector::zero(3, 1)), DimensionError);
}
