#include "pmhe/stacked.hpp"

namespace pmhe {

StackedVector::StackedVector(Vec flat, int n_, int horizon_)
    : data(std::move(flat)), n(n_), horizon(horizon_) {
    if (n <= 0 || horizon < 0) throw DimensionError("StackedVector: bad shape");
    if (data.size() != dim()) throw DimensionError("StackedVector: flat length != (horizon+1)*n");
}

StackedVector StackedVector::zero(int n, int horizon) {
    return StackedVector(Vec::Zero((horizon + 1) * n), n, horizon);
}

StackedVector StackedVector::from_head(const Vec& x, int horizon) {
    StackedVector z = zero(static_cast<int>(x.size()), horizon);
    z.head() = x;
    return z;
}

Eigen::VectorBlock<const Vec> StackedVector::w(int i) const {
    if (i < 0 || i >= horizon) throw DimensionError("StackedVector::w: index");
    return data.segment((1 + i) * n, n);
}

}  // namespace pmhe
