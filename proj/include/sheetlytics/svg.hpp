#pragma once

#include <string>

#include "sheetlytics/analysis.hpp"

namespace sheetlytics {

// Standalone SVG tornado chart: one horizontal bar per row (already sorted
// longest-first), a vertical line at the base output value, and low/high
// input annotations at the bar ends.
std::string render_tornado_svg(const TornadoData& data);

// Standalone SVG scatter/line chart of a one-parameter sweep: one series
// per output with a legend; error or non-numeric entries become gaps.
std::string render_sweep_svg(const SA1Table& table);

// Numbers on chart labels use 6 significant digits.
std::string svg_number(double v);

std::string xml_escape(const std::string& text);

} // namespace sheetlytics
