#ifndef ANCHOR_OUTPUT_HPP
#define ANCHOR_OUTPUT_HPP

#include "anchor/trace.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace anchor {

/// Formats a double so it round-trips through text (17 significant digits),
/// with stable spelling for NaN.
std::string format_number(double value);

/// Minimal CSV emitter: header row, comma separators, newline-terminated rows.
class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}

    void header(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);

    static std::string cell(double value) { return format_number(value); }
    static std::string cell(std::int64_t value) { return std::to_string(value); }
    static std::string cell(std::uint64_t value) { return std::to_string(value); }

  private:
    std::ostream& out_;
};

void write_trace_csv(std::ostream& out, const RunTrace& trace);

/// One named series of (x, y) points for the plotter.
struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = true;
    int width = 860;
    int height = 540;
};

/// Self-contained SVG line plot (axes, ticks, legend, polylines); no external
/// plotting dependency. Non-positive values are dropped on log scales.
void write_svg_plot(std::ostream& out, const std::vector<PlotSeries>& series,
                    const PlotOptions& options);

}  // namespace anchor

#endif
