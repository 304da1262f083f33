#ifndef PMHE_STACKED_HPP
#define PMHE_STACKED_HPP

#include "pmhe/types.hpp"

namespace pmhe {

// Estimation decision vector z = [x; w_0; ...; w_{horizon-1}] with the
// window-head state x in R^n and one model residual per window stage.
// Flat length is always (horizon+1)*n; the horizon grows from 0 to N while
// the measurement window is filling.
struct StackedVector {
    Vec data;
    int n = 0;
    int horizon = 0;

    StackedVector() = default;
    StackedVector(Vec flat, int n_, int horizon_);

    static StackedVector zero(int n, int horizon);
    // Head set to x, all residual blocks zero.
    static StackedVector from_head(const Vec& x, int horizon);

    int dim() const { return (horizon + 1) * n; }

    Eigen::VectorBlock<Vec> head() { return data.head(n); }
    Eigen::VectorBlock<const Vec> head() const { return data.head(n); }
    Eigen::VectorBlock<Vec> residuals() { return data.tail(horizon * n); }
    Eigen::VectorBlock<const Vec> residuals() const { return data.tail(horizon * n); }
    // Residual block i, 0 <= i < horizon.
    Eigen::VectorBlock<const Vec> w(int i) const;
};

}  // namespace pmhe

#endif  // PMHE_STACKED_HPP
