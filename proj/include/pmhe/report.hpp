#ifndef PMHE_REPORT_HPP
#define PMHE_REPORT_HPP

#include <ostream>
#include <string>
#include <vector>

#include "pmhe/estimators.hpp"

namespace pmhe {

// Full-precision scientific notation, 17 significant digits.
std::string fmt17(double v);

void write_trace_csv(std::ostream& os, const EstimateTrace& trace, int n);

// Minimal standalone line plot: one polyline over sample index, with the
// y axis optionally showing log10 of the data.
void write_line_svg(std::ostream& os, const std::vector<double>& values,
                    const std::string& title, bool log_y);

}  // namespace pmhe

#endif  // PMHE_REPORT_HPP
