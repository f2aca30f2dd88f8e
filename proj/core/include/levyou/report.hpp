#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "levyou/coupling.hpp"

namespace levyou {

/// Finite values as shortest round-trip decimal; infinities as the literal
/// "inf"/"-inf" (every CSV field is finite or "inf" by contract).
std::string format_number(double v);

/// Minimal CSV writer: header row up front, one row() call per record.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    ~CsvWriter();

  private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

struct PlotSeries {
    std::vector<double> x, y;
    std::string label;
};

/// Self-contained SVG scatter/line plot (polyline + axis primitives, no
/// external dependency). Optional log axes and an annotated power-law fit.
void write_svg_plot(const std::string& path, const std::vector<PlotSeries>& series,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_x, bool log_y,
                    const std::optional<SlopeFit>& fit = std::nullopt);

}  // namespace levyou
