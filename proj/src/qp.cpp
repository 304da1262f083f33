#include "pmhe/qp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>

namespace pmhe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kkt_residual(const Mat& H, const Vec& g, const Mat& A, const Vec& b,
                    const Vec& z, const Vec& lambda) {
    Vec stat = H * z + g;
    if (A.rows() > 0) stat += A.transpose() * lambda;
    double res = stat.lpNorm<Eigen::Infinity>();
    for (int i = 0; i < A.rows(); ++i) {
        const double rs = 1.0 + std::abs(b(i));  // per-row scale
        const double s = (A.row(i).dot(z) - b(i)) / rs;
        res = std::max(res, std::max(0.0, s));          // primal feasibility
        res = std::max(res, std::abs(lambda(i) * s));   // complementarity
        res = std::max(res, std::max(0.0, -lambda(i)));
    }
    return res;
}

}  // namespace

QpResult solve_qp(const Mat& H, const Vec& g, const Mat& A, const Vec& b,
                  const QpOptions& options) {
    const int nv = static_cast<int>(H.rows());
    const int q = static_cast<int>(A.rows());
    if (H.cols() != nv || g.size() != nv) throw DimensionError("solve_qp: H/g shape");
    if (A.rows() != b.size() || (q > 0 && A.cols() != nv))
        throw DimensionError("solve_qp: A/b shape");

    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success)
        throw SolverError("solve_qp: Hessian is not positive definite", kInf);

    QpResult out;
    out.z = llt.solve(-g);
    if (q == 0) {
        out.multipliers = Vec::Zero(0);
        out.kkt_residual = (H * out.z + g).lpNorm<Eigen::Infinity>();
        return out;
    }

    const double dep_tol = 1e-13;
    const int max_iters = options.max_iters_per_row * std::max(1, q);

    std::vector<int> active;
    std::vector<double> u;  // multipliers of active rows

    // Work in the n_i = -a_i >= -b_i convention so multipliers stay >= 0.
    while (true) {
        // Most violated row in the per-row scale; smallest index wins ties.
        int p = -1;
        double worst = 1e-11;
        for (int i = 0; i < q; ++i) {
            const double s = (A.row(i).dot(out.z) - b(i)) / (1.0 + std::abs(b(i)));
            if (s > worst + 1e-15) {
                worst = s;
                p = i;
            }
        }
        if (p < 0) break;

        const Vec np = -A.row(p).transpose();
        double up_acc = 0.0;

        // Resolve constraint p: take full or partial (drop) steps until p
        // enters the active set or infeasibility is established.
        while (true) {
            if (++out.iterations > max_iters) {
                Vec lam = Vec::Zero(q);
                for (size_t j = 0; j < active.size(); ++j) lam(active[j]) = u[j];
                throw SolverError("solve_qp: iteration cap exceeded",
                                  kkt_residual(H, g, A, b, out.z, lam));
            }

            const int na = static_cast<int>(active.size());
            const Vec hinv_np = llt.solve(np);
            Vec r(na), d;
            if (na > 0) {
                Mat N(nv, na);
                for (int j = 0; j < na; ++j) N.col(j) = -A.row(active[j]).transpose();
                const Mat HinvN = llt.solve(N);
                const Mat S = N.transpose() * HinvN;
                r = S.ldlt().solve(N.transpose() * hinv_np);
                d = hinv_np - HinvN * r;
            } else {
                d = hinv_np;
            }

            // Dual step length: first active multiplier driven to zero.
            double t1 = kInf;
            int drop = -1;
            for (int j = 0; j < na; ++j) {
                if (r(j) > dep_tol) {
                    const double tj = u[j] / r(j);
                    if (tj < t1 - 1e-15) {
                        t1 = tj;
                        drop = j;
                    }
                }
            }

            const double denom = np.dot(d);
            double t2 = kInf;
            if (denom > dep_tol) {
                const double sp = np.dot(out.z) + b(p);  // n_p'z - (-b_p), < 0 when violated
                t2 = -sp / denom;
            }

            const double t = std::min(t1, t2);
            if (t == kInf) {
                Vec lam = Vec::Zero(q);
                for (size_t j = 0; j < active.size(); ++j) lam(active[j]) = u[j];
                throw SolverError("solve_qp: constraints are infeasible",
                                  kkt_residual(H, g, A, b, out.z, lam));
            }

            if (t2 < kInf) out.z += t * d;
            for (int j = 0; j < na; ++j) u[j] -= t * r(j);
            up_acc += t;

            if (t == t2) {
                active.push_back(p);
                u.push_back(up_acc);
                break;
            }
            active.erase(active.begin() + drop);
            u.erase(u.begin() + drop);
        }
    }

    out.multipliers = Vec::Zero(q);
    for (size_t j = 0; j < active.size(); ++j) out.multipliers(active[j]) = u[j];
    std::sort(active.begin(), active.end());
    out.active_set = std::move(active);
    out.kkt_residual = kkt_residual(H, g, A, b, out.z, out.multipliers);
    if (out.kkt_residual > options.tol)
        throw SolverError("solve_qp: KKT residual above tolerance", out.kkt_residual);
    return out;
}

}  // namespace pmhe
