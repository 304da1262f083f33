#ifndef PMHE_LTI_SYSTEM_HPP
#define PMHE_LTI_SYSTEM_HPP

#include <vector>

#include "pmhe/types.hpp"

namespace pmhe {

// Discrete-time LTI model x+ = A x + B u, y = C x.
// Immutable after construction; powers of A are precomputed on demand and cached.
class LtiSystem {
public:
    LtiSystem(Mat A, Mat B, Mat C);

    int n() const { return n_; }
    int m() const { return m_; }
    int p() const { return p_; }

    const Mat& A() const { return A_; }
    const Mat& B() const { return B_; }
    const Mat& C() const { return C_; }

    // A^i, i >= 0.
    const Mat& pow_A(int i) const;

    // PBH rank test on every eigenvalue with |lambda| >= 1.
    bool detectable() const { return detectable_; }

private:
    Mat A_, B_, C_;
    int n_, m_, p_;
    bool detectable_;
    mutable std::vector<Mat> apow_;
};

}  // namespace pmhe

#endif  // PMHE_LTI_SYSTEM_HPP
