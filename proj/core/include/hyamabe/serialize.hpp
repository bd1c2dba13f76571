#pragma once

#include "hyamabe/certify.hpp"
#include "hyamabe/ode.hpp"
#include "hyamabe/shooting.hpp"
#include "hyamabe/yamabe.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyamabe {

/// Version tag written into every JSON document.
inline constexpr int kSchemaVersion = 1;

/// Full-precision decimal (17 significant digits).
[[nodiscard]] std::string format_double(double value);

/// CSV with header "t,phi,dphi,energy", one row per accepted sample, LF endings.
[[nodiscard]] std::string trajectory_csv(const Trajectory& trajectory);

/// CSV with header "r,q"; with `zero_row`, a first row (0, Q(0)).
[[nodiscard]] std::string q_csv(std::span<const QResult> results,
                                std::optional<double> zero_row = std::nullopt);

[[nodiscard]] std::string to_json(const QResult& result);
[[nodiscard]] std::string to_json(const CertificationTrace& trace);
[[nodiscard]] std::string shots_json(std::span<const Shot> shots);

/// Parses the output of to_json(CertificationTrace). Throws
/// std::invalid_argument on malformed input or an unknown schema.
[[nodiscard]] CertificationTrace trace_from_json(const std::string& text);

/// Markdown table of the trace (5-decimal rounding) with the verdict.
[[nodiscard]] std::string certification_report(const CertificationTrace& trace);

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
};

/// Static SVG 1.1 line chart.
[[nodiscard]] std::string svg_line_plot(std::span<const PlotSeries> series, const std::string& title,
                                        const std::string& x_label, const std::string& y_label);

}  // namespace hyamabe
