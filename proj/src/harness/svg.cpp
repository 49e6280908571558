#include "rulopt/harness/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace rulopt::harness {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
}

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 780.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 450.0;

// Muted qualitative palette, cycled per run.
constexpr const char* kColors[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                                   "#edc948", "#b07aa1", "#9c755f", "#bab0ac", "#ff9da7"};

} // namespace

std::string emit_svg_chart(const ExperimentSummary& summary) {
    auto pooled = summary.pooled_points();
    if (pooled.empty())
        throw std::invalid_argument("emit_svg_chart: no successful iterations to plot");

    double x_min = pooled.front().first, x_max = x_min;
    double y_min = pooled.front().second, y_max = y_min;
    for (const auto& [x, y] : pooled) {
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    }
    if (summary.pooled_fit) {
        for (double x : {x_min, x_max}) {
            double y = summary.pooled_fit->slope * x + summary.pooled_fit->intercept;
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (x_max == x_min) {
        x_min -= 1.0;
        x_max += 1.0;
    }
    double y_pad = (y_max - y_min) * 0.05;
    if (y_pad == 0.0)
        y_pad = 1.0;
    y_min -= y_pad;
    y_max += y_pad;

    auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); };
    auto sy = [&](double y) { return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    svg += "  <rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"white\"/>\n";

    // Axes.
    svg += "  <line class=\"axis\" x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";
    svg += "  <line class=\"axis\" x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";
    svg += "  <text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kBottom + 35.0) +
           "\" text-anchor=\"middle\" font-size=\"14\">iteration</text>\n";
    svg += "  <text x=\"18\" y=\"" + num((kTop + kBottom) / 2) + "\" text-anchor=\"middle\" font-size=\"14\" " +
           "transform=\"rotate(-90 18 " + num((kTop + kBottom) / 2) + ")\">total utility</text>\n";
    svg += "  <text x=\"" + num(kLeft) + "\" y=\"" + num(kBottom + 18.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + num(x_min) + "</text>\n";
    svg += "  <text x=\"" + num(kRight) + "\" y=\"" + num(kBottom + 18.0) +
           "\" text-anchor=\"middle\" font-size=\"12\">" + num(x_max) + "</text>\n";
    svg += "  <text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(sy(y_min) + 4.0) +
           "\" text-anchor=\"end\" font-size=\"12\">" + num(y_min) + "</text>\n";
    svg += "  <text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(sy(y_max) + 4.0) +
           "\" text-anchor=\"end\" font-size=\"12\">" + num(y_max) + "</text>\n";

    // One polyline per run with at least one successful iteration.
    for (std::size_t i = 0; i < summary.runs.size(); ++i) {
        auto points = summary.run_points(static_cast<int>(i));
        if (points.empty())
            continue;
        const char* color = kColors[i % (sizeof(kColors) / sizeof(kColors[0]))];
        std::string attr;
        for (const auto& [x, y] : points) {
            if (!attr.empty())
                attr += ' ';
            attr += num(sx(x)) + "," + num(sy(y));
        }
        svg += "  <polyline class=\"run\" fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + attr + "\"/>\n";
    }

    if (summary.pooled_fit) {
        double y1 = summary.pooled_fit->slope * x_min + summary.pooled_fit->intercept;
        double y2 = summary.pooled_fit->slope * x_max + summary.pooled_fit->intercept;
        svg += "  <line class=\"regression\" x1=\"" + num(sx(x_min)) + "\" y1=\"" + num(sy(y1)) + "\" x2=\"" +
               num(sx(x_max)) + "\" y2=\"" + num(sy(y2)) +
               "\" stroke=\"black\" stroke-width=\"2\" stroke-dasharray=\"6 4\"/>\n";
    }

    svg += "</svg>\n";
    return svg;
}

} // namespace rulopt::harness
