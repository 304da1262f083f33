#include "oracles.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>

namespace pmhe::oracles {

double rollout_loss(const LtiSystem& sys, const std::vector<Vec>& ys,
                    const std::vector<Vec>& us, const Mat& R, const Mat& Qw,
                    const StackedVector& z) {
    const int ell = z.horizon;
    Vec x = z.head();
    double loss = 0.0;
    for (int i = 0; i < ell; ++i) {
        const Vec v = ys[i] - sys.C() * x;
        loss += 0.5 * v.dot(R * v);
        const Vec w = z.w(i);
        loss += 0.5 * w.dot(Qw * w);
        x = sys.A() * x + sys.B() * us[i] + w;
    }
    return loss;
}

namespace {

void subsets_of_size(int q, int size, std::vector<std::vector<int>>& out) {
    if (size == 0) {
        out.push_back({});
        return;
    }
    std::vector<int> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        int i = size - 1;
        while (i >= 0 && idx[i] == q - size + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace

Vec enumerate_qp(const Mat& H, const Vec& g, const Mat& A, const Vec& b) {
    const int nv = static_cast<int>(H.rows());
    const int q = static_cast<int>(A.rows());
    const double feas_tol = 1e-9 * (1.0 + (q ? b.lpNorm<Eigen::Infinity>() : 0.0));

    double best = std::numeric_limits<double>::infinity();
    Vec best_z;
    std::vector<std::vector<int>> candidates;
    for (int size = 0; size <= std::min(nv, q); ++size) subsets_of_size(q, size, candidates);

    for (const auto& S : candidates) {
        const int m = static_cast<int>(S.size());
        Mat KKT(nv + m, nv + m);
        KKT.setZero();
        KKT.topLeftCorner(nv, nv) = H;
        for (int j = 0; j < m; ++j) {
            KKT.block(0, nv + j, nv, 1) = A.row(S[j]).transpose();
            KKT.block(nv + j, 0, 1, nv) = A.row(S[j]);
        }
        Vec rhs(nv + m);
        rhs.head(nv) = -g;
        for (int j = 0; j < m; ++j) rhs(nv + j) = b(S[j]);

        Eigen::FullPivLU<Mat> lu(KKT);
        if (!lu.isInvertible()) continue;
        const Vec sol = lu.solve(rhs);
        const Vec z = sol.head(nv);
        const Vec lam = sol.tail(m);

        if (lam.size() > 0 && lam.minCoeff() < -1e-9) continue;
        bool feasible = true;
        for (int i = 0; i < q && feasible; ++i)
            if (A.row(i).dot(z) - b(i) > feas_tol) feasible = false;
        if (!feasible) continue;

        const double val = 0.5 * z.dot(H * z) + g.dot(z);
        if (val < best - 1e-12) {
            best = val;
            best_z = z;
        }
    }
    if (best_z.size() == 0) throw std::runtime_error("enumerate_qp: no KKT point found");
    return best_z;
}

Mat stein_series(const Mat& X, const Mat& Q) {
    const int n = static_cast<int>(X.rows());
    Mat P = Mat::Zero(n, n);
    Mat term = Q;
    Mat Xj = Mat::Identity(n, n);
    for (int j = 0; j < 100000; ++j) {
        P += term;
        Xj = Xj * X;
        term = Xj.transpose() * Q * Xj;
        if (term.lpNorm<Eigen::Infinity>() < 1e-12) break;
    }
    return P;
}

double power_lambda_max(const Mat& M, int iters) {
    Vec v = Vec::Ones(M.rows()).normalized();
    v(0) += 0.5;  // break symmetry against an orthogonal start
    v.normalize();
    double lam = 0.0;
    for (int i = 0; i < std::max(iters, 200000); ++i) {
        const Vec w = M * v;
        const double next = v.dot(w);
        const double nw = w.norm();
        if (nw < 1e-300) return 0.0;
        v = w / nw;
        if (i > 10 && std::abs(next - lam) <= 1e-13 * (1.0 + std::abs(next))) return next;
        lam = next;
    }
    return lam;
}

double fit_decay_rate(const std::vector<double>& values) {
    std::vector<double> ks, ls;
    for (size_t i = 0; i < values.size(); ++i) {
        if (values[i] > 1e-280) {
            ks.push_back(static_cast<double>(i));
            ls.push_back(std::log(values[i]));
        }
    }
    if (ks.size() < 2) return 0.0;
    double mk = 0, ml = 0;
    for (size_t i = 0; i < ks.size(); ++i) {
        mk += ks[i];
        ml += ls[i];
    }
    mk /= ks.size();
    ml /= ks.size();
    double num = 0, den = 0;
    for (size_t i = 0; i < ks.size(); ++i) {
        num += (ks[i] - mk) * (ls[i] - ml);
        den += (ks[i] - mk) * (ks[i] - mk);
    }
    return std::exp(num / den);
}

}  // namespace pmhe::oracles
