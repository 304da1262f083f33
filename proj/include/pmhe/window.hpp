#ifndef PMHE_WINDOW_HPP
#define PMHE_WINDOW_HPP

#include <deque>

#include "pmhe/types.hpp"

namespace pmhe {

// Sliding window of the most recent N measurement/input pairs.
// push(y_t, u_t) appends the data of discrete time t = time() and evicts the
// oldest pair once more than N are held. Entries are addressed by absolute
// time index, valid on [time()-size(), time()-1].
class MeasurementWindow {
public:
    MeasurementWindow(int p, int m, int N);

    void push(const Vec& y, const Vec& u);

    int time() const { return k_; }
    int size() const { return static_cast<int>(ys_.size()); }
    int capacity() const { return N_; }

    const Vec& y_at(int t) const;
    const Vec& u_at(int t) const;

    int oldest_time() const { return k_ - size(); }

private:
    int p_, m_, N_;
    int k_ = 0;
    std::deque<Vec> ys_, us_;
};

}  // namespace pmhe

#endif  // PMHE_WINDOW_HPP
