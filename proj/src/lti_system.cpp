#include "pmhe/lti_system.hpp"

#include <Eigen/Eigenvalues>

namespace pmhe {

namespace {

bool pbh_detectable(const Mat& A, const Mat& C) {
    const int n = static_cast<int>(A.rows());
    Eigen::EigenSolver<Mat> eig(A);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> lambda = eig.eigenvalues()(i);
        if (std::abs(lambda) < 1.0 - 1e-9) continue;
        Eigen::MatrixXcd pencil(n + C.rows(), n);
        pencil.topRows(n) = A.cast<std::complex<double>>() -
                            lambda * Eigen::MatrixXcd::Identity(n, n);
        pencil.bottomRows(C.rows()) = C.cast<std::complex<double>>();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(pencil);
        qr.setThreshold(1e-10);
        if (qr.rank() < n) return false;
    }
    return true;
}

}  // namespace

LtiSystem::LtiSystem(Mat A, Mat B, Mat C)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)) {
    if (A_.rows() != A_.cols()) throw ConfigError("LtiSystem: A must be square");
    n_ = static_cast<int>(A_.rows());
    if (B_.size() == 0) B_ = Mat::Zero(n_, 0);
    if (B_.rows() != n_) throw ConfigError("LtiSystem: B row count must equal n");
    m_ = static_cast<int>(B_.cols());
    if (C_.cols() != n_) throw ConfigError("LtiSystem: C column count must equal n");
    p_ = static_cast<int>(C_.rows());
    if (n_ <= 0 || p_ <= 0) throw ConfigError("LtiSystem: empty state or output");
    detectable_ = pbh_detectable(A_, C_);
    apow_.push_back(Mat::Identity(n_, n_));
    apow_.push_back(A_);
}

const Mat& LtiSystem::pow_A(int i) const {
    if (i < 0) throw DimensionError("LtiSystem::pow_A: negative exponent");
    while (static_cast<int>(apow_.size()) <= i) apow_.push_back(apow_.back() * A_);
    return apow_[i];
}

}  // namespace pmhe
