#include "pmhe/design.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace pmhe {

namespace {

double spectral_radius_of(const Mat& M) {
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

double lam_min(const Mat& M) {
    return Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().minCoeff();
}

double lam_max(const Mat& M) {
    return Eigen::SelfAdjointEigenSolver<Mat>(M).eigenvalues().maxCoeff();
}

}  // namespace

Mat place_gain(const LtiSystem& sys, const std::vector<std::complex<double>>& poles) {
    if (sys.p() != 1)
        throw DesignError("place_gain: only single-output systems supported; supply L directly");
    const int n = sys.n();
    if (static_cast<int>(poles.size()) != n)
        throw DesignError("place_gain: need exactly n poles");

    // Desired characteristic polynomial; conjugate pairing keeps it real.
    std::vector<std::complex<double>> coeff{1.0};
    for (const auto& pole : poles) {
        std::vector<std::complex<double>> next(coeff.size() + 1, 0.0);
        for (size_t i = 0; i < coeff.size(); ++i) {
            next[i] += coeff[i];
            next[i + 1] -= coeff[i] * pole;
        }
        coeff = std::move(next);
    }
    for (const auto& c : coeff)
        if (std::abs(c.imag()) > 1e-9 * (1.0 + std::abs(c.real())))
            throw DesignError("place_gain: complex poles must form conjugate pairs");

    Mat phiA = Mat::Zero(n, n);
    for (int i = 0; i <= n; ++i) phiA += coeff[i].real() * sys.pow_A(n - i);

    Mat O(n, n);
    for (int i = 0; i < n; ++i) O.row(i) = sys.C() * sys.pow_A(i);
    Eigen::ColPivHouseholderQR<Mat> qr(O);
    qr.setThreshold(1e-10);
    if (qr.rank() < n)
        throw DesignError("place_gain: (A, C) not observable, requested mode unplaceable");

    Vec en = Vec::Zero(n);
    en(n - 1) = 1.0;
    Mat L = phiA * qr.solve(en);

    // Verify placement through the closed-loop characteristic polynomial
    // (Faddeev-LeVerrier); eigenvalues of defective spectra such as deadbeat
    // are too ill-conditioned to recompute directly.
    const Mat X = sys.A() - L * sys.C();
    Vec got = Vec::Zero(n + 1);
    got(0) = 1.0;
    Mat Mk = Mat::Zero(n, n);
    for (int k = 1; k <= n; ++k) {
        Mk = X * Mk + got(k - 1) * Mat::Identity(n, n);
        got(k) = -(X * Mk).trace() / k;
    }
    double scale = 1.0;
    for (int i = 0; i <= n; ++i) scale = std::max(scale, std::abs(coeff[i].real()));
    for (int i = 0; i <= n; ++i)
        if (std::abs(got(i) - coeff[i].real()) > 1e-6 * scale)
            throw DesignError("place_gain: placed spectrum off by more than 1e-6");
    return L;
}

Mat solve_lmi(const LtiSystem& sys, const Mat& L, const Mat& Q) {
    const int n = sys.n();
    if (L.rows() != n || L.cols() != sys.p()) throw DesignError("solve_lmi: L shape");
    if (Q.rows() != n || Q.cols() != n) throw DesignError("solve_lmi: Q shape");
    const double qmin = lam_min(Q);
    if (qmin <= 0.0) throw DesignError("solve_lmi: Q must be positive definite");

    const Mat X = sys.A() - L * sys.C();
    if (spectral_radius_of(X) >= 1.0 - 1e-12)
        throw DesignError("solve_lmi: A - LC is not Schur stable");

    const Mat Qp = Q + (1e-6 * qmin) * Mat::Identity(n, n);

    // vec(X'PX) = (X' kron X') vec(P); small n, dense Kronecker solve.
    const Mat Xt = X.transpose();
    Mat K(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            K.block(i * n, j * n, n, n) = Xt(i, j) * Xt;
    Vec rhs(n * n);
    for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = -Qp.col(j);
    const Vec vecP = (K - Mat::Identity(n * n, n * n)).partialPivLu().solve(rhs);

    Mat P(n, n);
    for (int j = 0; j < n; ++j) P.col(j) = vecP.segment(j * n, n);
    return 0.5 * (P + P.transpose());
}

double smoothness_constant(const CondensedProblem& prob, SmoothnessMode mode) {
    if (mode == SmoothnessMode::kHessian) return std::max(0.0, lam_max(prob.hessian()));

    const double rmax = lam_max(prob.stage_weight_R());
    double sum = 0.0;
    double cum = 0.0;
    for (const Mat& Ot : prob.obs_rows()) {
        const double norm2 = Ot.squaredNorm() == 0.0
                                 ? 0.0
                                 : std::pow(Ot.jacobiSvd().singularValues()(0), 2);
        if (prob.residuals_fixed()) {
            sum += norm2;
        } else {
            cum += norm2;  // stage t touches x and w_0..w_{t-1}: all powers up to t
            sum += cum;
        }
    }
    double lf = rmax * sum;
    if (!prob.residuals_fixed()) lf += std::max(0.0, lam_max(prob.stage_weight_Qw()));
    return lf;
}

BregmanGeometry StabilityCertificate::geometry() const {
    if (residuals_fixed) return BregmanGeometry::state_quadratic(P);
    return BregmanGeometry::quadratic(P, W);
}

StabilityCertificate certify(const LtiSystem& sys, const Mat& L, const Mat& P,
                             const Mat& W, const Mat& Q, const CondensedProblem& prob,
                             SmoothnessMode mode) {
    const int n = sys.n();
    if (L.rows() != n || L.cols() != sys.p()) throw DimensionError("certify: L shape");
    if (P.rows() != n || P.cols() != n) throw DimensionError("certify: P shape");
    if (Q.rows() != n || Q.cols() != n) throw DimensionError("certify: Q shape");

    StabilityCertificate cert;
    cert.L = L;
    cert.P = P;
    cert.Q = Q;
    cert.residuals_fixed = prob.residuals_fixed();
    cert.W = cert.residuals_fixed ? Mat() : W;
    if (!cert.residuals_fixed && (W.rows() == 0 || W.rows() != W.cols()))
        throw DimensionError("certify: W required when residuals are free");

    const Mat X = sys.A() - L * sys.C();
    cert.spectral_radius = spectral_radius_of(X);
    cert.lmi_margin = lam_max(X.transpose() * P * X - P + Q);

    if (cert.residuals_fixed) {
        cert.sigma = lam_min(P);
        cert.gamma = lam_max(P);
        cert.c = 0.5 * lam_min(Q);
    } else {
        cert.sigma = std::min(lam_min(P), lam_min(W));
        cert.gamma = std::max(lam_max(P), lam_max(W));
        cert.c = 0.5 * std::min(lam_min(Q), lam_min(W));
    }
    cert.Lf = smoothness_constant(prob, mode);

    cert.valid = cert.lmi_margin <= 1e-9 && cert.c > 0.0 && cert.sigma > 0.0 &&
                 cert.sigma <= cert.gamma && cert.spectral_radius < 1.0 && cert.Lf > 0.0;
    if (cert.valid) {
        cert.beta_e = 1.0 - 2.0 * cert.c / cert.gamma;
        cert.beta = std::sqrt(std::max(0.0, cert.beta_e));
        cert.alpha = std::sqrt(cert.gamma / cert.sigma);
    }
    return cert;
}

std::string StabilityCertificate::report() const {
    std::ostringstream os;
    os << "stability certificate\n"
       << "  valid:            " << (valid ? "yes" : "NO") << "\n"
       << "  residuals fixed:  " << (residuals_fixed ? "yes" : "no") << "\n"
       << "  rho(A - LC):      " << spectral_radius << "\n"
       << "  LMI margin:       " << lmi_margin << "  (lam_max((A-LC)'P(A-LC) - P + Q))\n"
       << "  sigma:            " << sigma << "\n"
       << "  gamma:            " << gamma << "\n"
       << "  c:                " << c << "\n"
       << "  L_f:              " << Lf << "\n"
       << "  beta_e:           " << beta_e << "\n"
       << "  beta:             " << beta << "\n"
       << "  alpha:            " << alpha << "\n"
       << "  step bound s/Lf:  " << (Lf > 0 ? sigma / Lf : 0.0) << "\n";
    return os.str();
}

int StepSchedule::it(int k) const {
    if (k < 1) throw DimensionError("StepSchedule::it: k >= 1 required");
    if (budgets.empty()) return 0;
    const size_t idx = std::min<size_t>(k - 1, budgets.size() - 1);
    return budgets[idx];
}

double StepSchedule::eta(int k, int i) const {
    if (k < 1 || i < 0 || i >= it(k)) throw DimensionError("StepSchedule::eta: index");
    return kind == ScheduleKind::kConstant ? base : base / std::sqrt(static_cast<double>(k));
}

double StepSchedule::step_sum(int k) const {
    return it(k) == 0 ? 0.0 : it(k) * eta(k, 0);
}

double StepSchedule::step_sqsum(int k) const {
    if (it(k) == 0) return 0.0;
    const double e = eta(k, 0);
    return it(k) * e * e;
}

bool StepSchedule::step_sums_non_increasing(int T) const {
    for (int k = 1; k < T; ++k)
        if (step_sum(k + 1) > step_sum(k) + 1e-12) return false;
    return true;
}

StepSchedule make_schedule(const StabilityCertificate& cert, ScheduleKind kind,
                           std::vector<int> budgets, bool bound_mode,
                           double base_override) {
    if (!cert.valid) throw DesignError("make_schedule: certificate is not valid");
    if (budgets.empty()) throw ConfigError("make_schedule: empty iteration budget");
    for (size_t i = 0; i < budgets.size(); ++i) {
        if (budgets[i] < 0) throw ConfigError("make_schedule: negative budget");
        if (bound_mode && budgets[i] < 1)
            throw ConfigError("make_schedule: bound mode needs it(k) >= 1");
        if (bound_mode && i > 0 && budgets[i] > budgets[i - 1])
            throw ConfigError("make_schedule: increasing it(k) not allowed in bound mode");
    }
    StepSchedule s;
    s.kind = kind;
    s.base = base_override > 0.0 ? base_override : cert.step_bound();
    if (s.base > cert.step_bound() + 1e-12)
        throw ConfigError("make_schedule: base step exceeds sigma/Lf");
    s.budgets = std::move(budgets);
    s.bound_mode = bound_mode;
    return s;
}

}  // namespace pmhe
