#include "pmhe/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace pmhe {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", v);
    return buf;
}

void write_trace_csv(std::ostream& os, const EstimateTrace& trace, int n) {
    os << "k,ell,iters,j_selected,i_minloss";
    for (int i = 0; i < n; ++i) os << ",xhat_" << i;
    for (int i = 0; i < n; ++i) os << ",xtrue_" << i;
    os << ",err_head,err_cur,loss_min,loss_selected,dpsi,eta_first\n";
    for (const TraceRecord& rec : trace.records) {
        os << rec.k << ',' << rec.ell << ',' << std::max<int>(0, rec.iterates.size() - 1)
           << ',' << rec.j_selected << ',' << rec.i_minloss;
        for (int i = 0; i < n; ++i) os << ',' << fmt17(rec.xhat(i));
        for (int i = 0; i < n; ++i)
            os << ',' << (rec.has_truth ? fmt17(rec.x_true(i)) : std::string());
        const double loss_min =
            rec.losses.empty() ? 0.0 : *std::min_element(rec.losses.begin(), rec.losses.end());
        const double loss_sel = rec.losses.empty() ? 0.0 : rec.losses[rec.j_selected];
        os << ',' << (rec.has_truth ? fmt17(rec.err_head) : std::string()) << ','
           << (rec.has_truth ? fmt17(rec.err_cur) : std::string()) << ','
           << fmt17(loss_min) << ',' << fmt17(loss_sel) << ','
           << (rec.has_truth ? fmt17(rec.dpsi) : std::string()) << ','
           << (rec.etas.empty() ? std::string() : fmt17(rec.etas.front())) << '\n';
    }
}

void write_line_svg(std::ostream& os, const std::vector<double>& values,
                    const std::string& title, bool log_y) {
    const int w = 640, h = 400, ml = 60, mr = 15, mt = 30, mb = 35;
    std::vector<double> ys;
    ys.reserve(values.size());
    for (double v : values) ys.push_back(log_y ? std::log10(std::max(v, 1e-16)) : v);
    double lo = ys.empty() ? 0.0 : *std::min_element(ys.begin(), ys.end());
    double hi = ys.empty() ? 1.0 : *std::max_element(ys.begin(), ys.end());
    if (hi - lo < 1e-12) hi = lo + 1.0;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    os << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">"
       << title << (log_y ? " (log10)" : "") << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << ml - 5 << "\" y=\"" << mt + 5
       << "\" text-anchor=\"end\" font-size=\"10\">" << fmt17(hi).substr(0, 9) << "</text>\n";
    os << "<text x=\"" << ml - 5 << "\" y=\"" << h - mb
       << "\" text-anchor=\"end\" font-size=\"10\">" << fmt17(lo).substr(0, 9) << "</text>\n";
    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < ys.size(); ++i) {
        const double x = ml + (w - ml - mr) * (ys.size() > 1 ? double(i) / (ys.size() - 1) : 0.5);
        const double y = h - mb - (h - mt - mb) * (ys[i] - lo) / (hi - lo);
        os << x << ',' << y << ' ';
    }
    os << "\"/>\n</svg>\n";
}

}  // namespace pmhe
