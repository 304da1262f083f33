#include "pmhe/window.hpp"

namespace pmhe {

MeasurementWindow::MeasurementWindow(int p, int m, int N) : p_(p), m_(m), N_(N) {
    if (p <= 0 || m < 0 || N < 0) throw ConfigError("MeasurementWindow: bad dimensions");
}

void MeasurementWindow::push(const Vec& y, const Vec& u) {
    if (y.size() != p_) throw DimensionError("MeasurementWindow::push: y size");
    if (u.size() != m_) throw DimensionError("MeasurementWindow::push: u size");
    ys_.push_back(y);
    us_.push_back(u);
    ++k_;
    if (static_cast<int>(ys_.size()) > N_) {
        ys_.pop_front();
        us_.pop_front();
    }
}

const Vec& MeasurementWindow::y_at(int t) const {
    const int idx = t - oldest_time();
    if (idx < 0 || idx >= size()) throw DimensionError("MeasurementWindow::y_at: index out of window");
    return ys_[idx];
}

const Vec& MeasurementWindow::u_at(int t) const {
    const int idx = t - oldest_time();
    if (idx < 0 || idx >= size()) throw DimensionError("MeasurementWindow::u_at: index out of window");
    return us_[idx];
}

}  // namespace pmhe
