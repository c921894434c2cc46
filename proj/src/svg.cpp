#include "sheetlytics/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace sheetlytics {

namespace {

constexpr const char* kSeriesColors[] = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
};
constexpr int kSeriesColorCount = 6;

std::string attr_number(double v) {
    char buf[48];
    int n = std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf, buf + n);
}

struct LinearScale {
    double domain_lo = 0, domain_hi = 1;
    double range_lo = 0, range_hi = 1;

    double operator()(double x) const {
        double t = (x - domain_lo) / (domain_hi - domain_lo);
        return range_lo + t * (range_hi - range_lo);
    }
};

// Pads a [lo, hi] interval so bars and points never sit on the frame edge.
void pad_domain(double& lo, double& hi) {
    if (lo == hi) {
        double pad = lo == 0 ? 1.0 : std::fabs(lo) * 0.1;
        lo -= pad;
        hi += pad;
        return;
    }
    double pad = (hi - lo) * 0.08;
    lo -= pad;
    hi += pad;
}

std::string svg_open(int width, int height) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
           std::to_string(width) + " " + std::to_string(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    return out;
}

void add_text(std::string& out, double x, double y, const std::string& text,
              const char* anchor = "start", const char* extra = "") {
    out += "<text x=\"" + attr_number(x) + "\" y=\"" + attr_number(y) + "\" text-anchor=\"" +
           anchor + "\"" + extra + ">" + xml_escape(text) + "</text>\n";
}

void add_line(std::string& out, double x1, double y1, double x2, double y2,
              const std::string& stroke, const char* extra = "") {
    out += "<line x1=\"" + attr_number(x1) + "\" y1=\"" + attr_number(y1) + "\" x2=\"" +
           attr_number(x2) + "\" y2=\"" + attr_number(y2) + "\" stroke=\"" + stroke + "\"" +
           extra + "/>\n";
}

} // namespace

std::string svg_number(double v) {
    char buf[48];
    int n = std::snprintf(buf, sizeof buf, "%.6g", v);
    return std::string(buf, buf + n);
}

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

std::string render_tornado_svg(const TornadoData& data) {
    constexpr int kWidth = 720;
    constexpr int kRowHeight = 34;
    constexpr int kTop = 48;
    constexpr int kBottom = 28;
    constexpr double kPlotLeft = 180;
    constexpr double kPlotRight = kWidth - 80;

    int rows = static_cast<int>(data.rows.size());
    int height = kTop + rows * kRowHeight + kBottom;

    double lo = data.base_output, hi = data.base_output;
    for (const TornadoDataRow& row : data.rows) {
        for (const CellValue* v : {&row.out_at_low, &row.out_at_high}) {
            if (v->is_number()) {
                lo = std::min(lo, v->as_number());
                hi = std::max(hi, v->as_number());
            }
        }
    }
    pad_domain(lo, hi);
    LinearScale x{lo, hi, kPlotLeft, kPlotRight};

    std::string out = svg_open(kWidth, height);
    add_text(out, kWidth / 2.0, 22,
             data.output.to_string() + " sensitivity (base " + svg_number(data.base_output) + ")",
             "middle", " font-size=\"14\" font-weight=\"bold\"");

    for (int i = 0; i < rows; ++i) {
        const TornadoDataRow& row = data.rows[static_cast<size_t>(i)];
        double y = kTop + i * kRowHeight;
        double mid = y + kRowHeight / 2.0;
        add_text(out, kPlotLeft - 10, mid + 4, row.label, "end");

        if (row.out_at_low.is_number() && row.out_at_high.is_number()) {
            double a = row.out_at_low.as_number();
            double b = row.out_at_high.as_number();
            double bar_lo = x(std::min(a, b));
            double bar_hi = x(std::max(a, b));
            out += "<rect x=\"" + attr_number(bar_lo) + "\" y=\"" + attr_number(mid - 9) +
                   "\" width=\"" + attr_number(bar_hi - bar_lo) +
                   "\" height=\"18\" fill=\"#4f81bd\"/>\n";
            bool low_on_left = a <= b;
            add_text(out, bar_lo - 4, mid + 4,
                     svg_number(low_on_left ? row.low : row.high), "end",
                     " font-size=\"10\" fill=\"#555555\"");
            add_text(out, bar_hi + 4, mid + 4,
                     svg_number(low_on_left ? row.high : row.low), "start",
                     " font-size=\"10\" fill=\"#555555\"");
        } else {
            add_text(out, kPlotLeft + 4, mid + 4, "(error)", "start",
                     " font-size=\"10\" fill=\"#aa0000\"");
        }
    }

    // base output marker
    double base_x = x(data.base_output);
    add_line(out, base_x, kTop - 8, base_x, kTop + rows * kRowHeight + 8, "#333333",
             " stroke-width=\"1.5\"");
    add_text(out, base_x, height - 8, svg_number(data.base_output), "middle",
             " font-size=\"10\"");

    out += "</svg>\n";
    return out;
}

std::string render_sweep_svg(const SA1Table& table) {
    constexpr int kWidth = 720;
    constexpr int kHeight = 420;
    constexpr double kPlotLeft = 70;
    constexpr double kPlotRight = kWidth - 30;
    constexpr double kPlotTop = 46;
    constexpr double kPlotBottom = kHeight - 50;

    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool have_x = false, have_y = false;
    for (const SA1Row& row : table.rows) {
        if (!have_x) { xlo = xhi = row.parameter_value; have_x = true; }
        xlo = std::min(xlo, row.parameter_value);
        xhi = std::max(xhi, row.parameter_value);
        for (const CellValue& v : row.outputs) {
            if (!v.is_number()) continue;
            if (!have_y) { ylo = yhi = v.as_number(); have_y = true; }
            ylo = std::min(ylo, v.as_number());
            yhi = std::max(yhi, v.as_number());
        }
    }
    pad_domain(xlo, xhi);
    pad_domain(ylo, yhi);
    LinearScale x{xlo, xhi, kPlotLeft, kPlotRight};
    LinearScale y{ylo, yhi, kPlotBottom, kPlotTop}; // SVG y grows downward

    std::string out = svg_open(kWidth, kHeight);
    add_text(out, kWidth / 2.0, 20, table.parameter_label + " sensitivity", "middle",
             " font-size=\"14\" font-weight=\"bold\"");

    // frame and extremal tick labels
    add_line(out, kPlotLeft, kPlotTop, kPlotLeft, kPlotBottom, "#333333");
    add_line(out, kPlotLeft, kPlotBottom, kPlotRight, kPlotBottom, "#333333");
    add_text(out, kPlotLeft, kPlotBottom + 16, svg_number(xlo), "start", " font-size=\"10\"");
    add_text(out, kPlotRight, kPlotBottom + 16, svg_number(xhi), "end", " font-size=\"10\"");
    add_text(out, kPlotLeft - 6, kPlotBottom + 4, svg_number(ylo), "end", " font-size=\"10\"");
    add_text(out, kPlotLeft - 6, kPlotTop + 4, svg_number(yhi), "end", " font-size=\"10\"");
    add_text(out, (kPlotLeft + kPlotRight) / 2, kHeight - 12, table.parameter_label, "middle");

    size_t series_count = table.outputs.size();
    for (size_t s = 0; s < series_count; ++s) {
        const char* color = kSeriesColors[s % kSeriesColorCount];
        // polyline segments; breaks at non-numeric entries
        std::string points;
        auto flush = [&] {
            if (points.empty()) return;
            out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
            points.clear();
        };
        for (const SA1Row& row : table.rows) {
            const CellValue& v = row.outputs[s];
            if (!v.is_number()) {
                flush();
                continue;
            }
            points += attr_number(x(row.parameter_value)) + "," +
                      attr_number(y(v.as_number())) + " ";
            out += "<circle cx=\"" + attr_number(x(row.parameter_value)) + "\" cy=\"" +
                   attr_number(y(v.as_number())) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        flush();

        // legend
        double ly = kPlotTop + 6 + 16 * static_cast<double>(s);
        add_line(out, kPlotRight - 150, ly, kPlotRight - 126, ly, color, " stroke-width=\"2\"");
        std::string label = s < table.output_labels.size() ? table.output_labels[s]
                                                           : table.outputs[s].to_string();
        add_text(out, kPlotRight - 120, ly + 4, label, "start", " font-size=\"10\"");
    }

    out += "</svg>\n";
    return out;
}

} // namespace sheetlytics
