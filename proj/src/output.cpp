#include "anchor/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace anchor {

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void CsvWriter::header(const std::vector<std::string>& names) { row(names); }

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
    CsvWriter csv(out);
    csv.header({"k", "queries_cum", "op_norm_true", "op_norm_est", "batch_S1", "batch_S2",
                "branch", "dist_to_solution", "uv_gap", "eta", "restart"});
    for (const TraceRecord& rec : trace.records)
        csv.row({CsvWriter::cell(rec.k), CsvWriter::cell(rec.queries_cum),
                 CsvWriter::cell(rec.op_norm_true), CsvWriter::cell(rec.op_norm_est),
                 CsvWriter::cell(rec.batch_s1), CsvWriter::cell(rec.batch_s2),
                 std::string(1, rec.branch), CsvWriter::cell(rec.dist_to_solution),
                 CsvWriter::cell(rec.uv_gap), CsvWriter::cell(rec.eta),
                 std::to_string(rec.restart)});
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct AxisScale {
    double lo = 0.0, hi = 1.0;
    bool log = false;

    double to_unit(double v) const {
        const double a = log ? std::log10(v) : v;
        const double l = log ? std::log10(lo) : lo;
        const double h = log ? std::log10(hi) : hi;
        return h > l ? (a - l) / (h - l) : 0.5;
    }
};

std::vector<double> axis_ticks(const AxisScale& axis, int target) {
    std::vector<double> ticks;
    if (axis.log) {
        const int e_lo = static_cast<int>(std::floor(std::log10(axis.lo)));
        const int e_hi = static_cast<int>(std::ceil(std::log10(axis.hi)));
        int step = std::max(1, (e_hi - e_lo) / target);
        for (int e = e_lo; e <= e_hi; e += step) ticks.push_back(std::pow(10.0, e));
    } else {
        const double span = axis.hi - axis.lo;
        if (span <= 0.0) return {axis.lo};
        const double raw = span / target;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double mult : {1.0, 2.0, 5.0, 10.0})
            if (mag * mult >= raw) {
                step = mag * mult;
                break;
            }
        for (double t = std::ceil(axis.lo / step) * step; t <= axis.hi + 1e-12 * span; t += step)
            ticks.push_back(t);
    }
    return ticks;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

}  // namespace

void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& options) {
    const int margin_l = 70, margin_r = 150, margin_t = 40, margin_b = 55;
    const double plot_w = options.width - margin_l - margin_r;
    const double plot_h = options.height - margin_t - margin_b;

    AxisScale x_axis{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity(), options.log_x};
    AxisScale y_axis{std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity(), options.log_y};
    bool any = false;
    for (const PlotSeries& s : series)
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            const double x = s.x[i], y = s.y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (options.log_x && x <= 0.0) continue;
            if (options.log_y && y <= 0.0) continue;
            x_axis.lo = std::min(x_axis.lo, x);
            x_axis.hi = std::max(x_axis.hi, x);
            y_axis.lo = std::min(y_axis.lo, y);
            y_axis.hi = std::max(y_axis.hi, y);
            any = true;
        }
    if (!any) {
        x_axis = {options.log_x ? 1.0 : 0.0, options.log_x ? 10.0 : 1.0, options.log_x};
        y_axis = {options.log_y ? 1.0 : 0.0, options.log_y ? 10.0 : 1.0, options.log_y};
    }
    if (x_axis.lo == x_axis.hi) x_axis.hi = x_axis.lo + (options.log_x ? x_axis.lo * 9 : 1.0);
    if (y_axis.lo == y_axis.hi) y_axis.hi = y_axis.lo + (options.log_y ? y_axis.lo * 9 : 1.0);

    auto px = [&](double v) { return margin_l + x_axis.to_unit(v) * plot_w; };
    auto py = [&](double v) { return margin_t + (1.0 - y_axis.to_unit(v)) * plot_h; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
        << "\" height=\"" << options.height << "\" viewBox=\"0 0 " << options.width << " "
        << options.height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << options.width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << options.title << "</text>\n";

    // Frame and ticks.
    out << "<rect x=\"" << margin_l << "\" y=\"" << margin_t << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    for (double t : axis_ticks(x_axis, 6)) {
        if (t < x_axis.lo * (x_axis.log ? 0.999 : 1.0) - 1e-300 || t > x_axis.hi * 1.001) continue;
        const double x = px(t);
        out << "<line x1=\"" << x << "\" y1=\"" << margin_t + plot_h << "\" x2=\"" << x
            << "\" y2=\"" << margin_t + plot_h + 5 << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << margin_t + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(t) << "</text>\n";
    }
    for (double t : axis_ticks(y_axis, 6)) {
        if (t < y_axis.lo * (y_axis.log ? 0.999 : 1.0) - 1e-300 || t > y_axis.hi * 1.001) continue;
        const double y = py(t);
        out << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << y << "\" x2=\"" << margin_l
            << "\" y2=\"" << y << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << margin_l - 9 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_label(t) << "</text>\n";
    }
    out << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << options.height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << options.x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << margin_t + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
        << "transform=\"rotate(-90 18 " << margin_t + plot_h / 2 << ")\">" << options.y_label
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size() && i < series[s].y.size(); ++i) {
            const double x = series[s].x[i], y = series[s].y[i];
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            if (options.log_x && x <= 0.0) continue;
            if (options.log_y && y <= 0.0) continue;
            out << px(x) << ',' << py(y) << ' ';
        }
        out << "\"/>\n";
        const double ly = margin_t + 16.0 + 18.0 * static_cast<double>(s);
        out << "<line x1=\"" << margin_l + plot_w + 10 << "\" y1=\"" << ly << "\" x2=\""
            << margin_l + plot_w + 30 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << margin_l + plot_w + 35 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[s].label
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace anchor
