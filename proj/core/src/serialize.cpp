#include "hyamabe/serialize.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hyamabe {

using nlohmann::ordered_json;

namespace {

ordered_json controls_json(const IntegrationControls& c) {
    return {{"t_start", c.t_start}, {"t_max", c.t_max},         {"rel_tol", c.rel_tol},
            {"abs_tol", c.abs_tol}, {"max_steps", c.max_steps}, {"max_step", c.max_step}};
}

std::string fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    return buf;
}

std::string xml_escape(const std::string& in) {
    std::string out;
    for (char ch : in) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

VerdictKind verdict_from_string(const std::string& s) {
    for (auto kind : {VerdictKind::Certified, VerdictKind::Failed, VerdictKind::StepBudgetExhausted,
                      VerdictKind::ArithmeticMismatch}) {
        if (to_string(kind) == s) return kind;
    }
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

std::string trajectory_csv(const Trajectory& trajectory) {
    std::string out = "t,phi,dphi,energy\n";
    for (const Sample& s : trajectory.samples()) {
        out += format_double(s.t) + ',' + format_double(s.phi) + ',' + format_double(s.dphi) + ',' +
               format_double(s.energy) + '\n';
    }
    return out;
}

std::string q_csv(std::span<const QResult> results, std::optional<double> zero_row) {
    std::string out = "r,q\n";
    if (zero_row) out += "0," + format_double(*zero_row) + '\n';
    for (const QResult& r : results) out += format_double(r.r) + ',' + format_double(r.q_value) + '\n';
    return out;
}

std::string to_json(const QResult& result) {
    const auto& d = result.diagnostics;
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "q_result";
    j["dims"] = {{"n", result.dims.n}, {"m", result.dims.m}};
    j["r"] = result.r;
    j["lambda"] = result.lambda;
    j["alpha_lambda"] = result.alpha_lambda;
    j["q_value"] = result.q_value;
    j["uncertainty"] = result.uncertainty;
    j["norms"] = {{"lp", result.norms.lp},
                  {"l2", result.norms.l2},
                  {"grad2", result.norms.grad2},
                  {"lp_power", result.norms.lp_power},
                  {"tail_bound_p", result.norms.tail_bound_p},
                  {"truncation_t", result.norms.truncation_t},
                  {"truncation_phi", result.norms.truncation_phi}};
    j["diagnostics"] = {{"bisection_iterations", d.bisection_iterations},
                        {"normalized", d.normalized},
                        {"alpha_raw", d.alpha_raw},
                        {"bracket", {{"alpha_lo", d.bracket.alpha_lo},
                                     {"alpha_hi", d.bracket.alpha_hi},
                                     {"width_tol", d.bracket.width_tol}}},
                        {"truncation_t", d.truncation_t},
                        {"tail_bound", d.tail_bound},
                        {"tail_relative", d.tail_relative},
                        {"q_edge", d.q_edge},
                        {"rayleigh_residual", d.rayleigh_residual},
                        {"controls", controls_json(d.controls)},
                        {"width_tol", d.width_tol},
                        {"smallness", d.smallness},
                        {"truncation_floor", d.truncation_floor}};
    return j.dump(2) + '\n';
}

std::string shots_json(std::span<const Shot> shots) {
    ordered_json arr = ordered_json::array();
    for (const Shot& s : shots) {
        arr.push_back({{"alpha", s.alpha},
                       {"class", std::string(to_string(s.tag))},
                       {"witness", std::string(to_string(s.witness))},
                       {"t", s.t}});
    }
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "bisection_trace";
    j["shots"] = std::move(arr);
    return j.dump(2) + '\n';
}

std::string to_json(const CertificationTrace& trace) {
    ordered_json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "certification_trace";
    j["dims"] = {{"n", trace.dims.n}, {"m", trace.dims.m}};
    j["mu"] = trace.mu;
    j["q0"] = trace.q0;
    j["q1"] = trace.q1;
    j["exponent"] = {{"num", trace.exponent.num()}, {"den", trace.exponent.den()}};
    j["threshold"] = trace.threshold;
    j["deflated"] = trace.deflated;
    j["stall_ratio"] = trace.stall_ratio;
    ordered_json steps = ordered_json::array();
    for (const auto& s : trace.steps) {
        steps.push_back({{"i", s.i},
                         {"s", s.s},
                         {"q_computed", s.q_computed},
                         {"q_uncertainty", s.q_uncertainty},
                         {"q_used", s.q_used},
                         {"pass", s.pass}});
    }
    j["steps"] = std::move(steps);
    j["verdict"] = {{"kind", std::string(to_string(trace.verdict.kind))},
                    {"step", trace.verdict.step},
                    {"detail", trace.verdict.detail}};
    return j.dump(2) + '\n';
}

CertificationTrace trace_from_json(const std::string& text) {
    try {
        const auto j = ordered_json::parse(text);
        if (j.at("schema").get<int>() != kSchemaVersion) {
            throw std::invalid_argument("unsupported schema version");
        }
        if (j.at("kind").get<std::string>() != "certification_trace") {
            throw std::invalid_argument("not a certification trace");
        }
        CertificationTrace t;
        t.dims = {j.at("dims").at("n").get<int>(), j.at("dims").at("m").get<int>()};
        t.mu = j.at("mu").get<double>();
        t.q0 = j.at("q0").get<double>();
        t.q1 = j.at("q1").get<double>();
        t.exponent = Rational(j.at("exponent").at("num").get<std::int64_t>(),
                              j.at("exponent").at("den").get<std::int64_t>());
        t.threshold = j.at("threshold").get<double>();
        t.deflated = j.at("deflated").get<bool>();
        t.stall_ratio = j.at("stall_ratio").get<double>();
        for (const auto& s : j.at("steps")) {
            t.steps.push_back({s.at("i").get<int>(), s.at("s").get<double>(),
                               s.at("q_computed").get<double>(), s.at("q_uncertainty").get<double>(),
                               s.at("q_used").get<double>(), s.at("pass").get<bool>()});
        }
        const auto& v = j.at("verdict");
        t.verdict = {verdict_from_string(v.at("kind").get<std::string>()), v.at("step").get<int>(),
                     v.at("detail").get<std::string>()};
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("trace_from_json: ") + e.what());
    }
}

std::string certification_report(const CertificationTrace& trace) {
    std::ostringstream out;
    const auto& d = trace.dims;
    out << "# Certification of Q_{" << d.n << "," << d.m << "}(r) >= " << trace.mu
        << " Q_{" << d.n << "," << d.m << "}(0) on [0, 1]\n\n";
    out << "| quantity | value |\n|---|---|\n";
    out << "| Q(0) | " << fixed(trace.q0, 5) << " |\n";
    out << "| Q(1) = Y(S^" << d.total() << ") | " << fixed(trace.q1, 5) << " |\n";
    out << "| mu Q(0) | " << fixed(trace.mu * trace.q0, 5) << " |\n";
    out << "| recursion exponent (n+m)/m | " << trace.exponent.to_string() << " |\n";
    out << "| small-r threshold | " << format_double(trace.threshold) << " |\n";
    out << "| steps | " << trace.steps.size() << " |\n";
    out << "| verdict | " << to_string(trace.verdict.kind);
    if (trace.verdict.kind != VerdictKind::Certified) {
        out << " at step " << trace.verdict.step << " (" << trace.verdict.detail << ")";
    }
    out << " |\n\n";
    if (trace.deflated) {
        out << "Each Q(s_i) entering the recursion is the computed value minus its numerical "
               "uncertainty (bracket spread, tail bound, integrator tolerance).\n\n";
    }
    out << "| i | s_i | Q(s_i) | uncertainty | Q(s_i) > mu Q(0) |\n|---|---|---|---|---|\n";
    for (const auto& s : trace.steps) {
        char unc[32];
        std::snprintf(unc, sizeof unc, "%.1e", s.q_uncertainty);
        out << "| " << s.i << " | " << fixed(s.s, 5) << " | " << fixed(s.q_computed, 5) << " | "
            << unc << " | " << (s.pass ? "yes" : "no") << " |\n";
    }
    return out.str();
}

std::string svg_line_plot(std::span<const PlotSeries> series, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
    constexpr double width = 640.0, height = 400.0;
    constexpr double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("svg_line_plot: x/y size mismatch");
        for (double v : s.x) { x_lo = std::min(x_lo, v); x_hi = std::max(x_hi, v); }
        for (double v : s.y) { y_lo = std::min(y_lo, v); y_hi = std::max(y_hi, v); }
    }
    if (!std::isfinite(x_lo)) { x_lo = 0.0; x_hi = 1.0; y_lo = 0.0; y_hi = 1.0; }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) y_hi = y_lo + 1.0;
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (width - left - right); };
    const auto py = [&](double y) { return height - bottom - (y - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(title) << "</text>\n"
        << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x_lo + k * (x_hi - x_lo) / 4.0;
        const double yv = y_lo + k * (y_hi - y_lo) / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(xv, 3) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fixed(yv, 3) << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(x_label) << "</text>\n"
        << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (top + height - bottom) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = colors[k % std::size(colors)];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            out << (i ? " " : "") << fixed(px(s.x[i]), 2) << ',' << fixed(py(s.y[i]), 2);
        }
        out << "\"/>\n";
        if (!s.label.empty()) {
            out << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 * (k + 1)
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
                << "\">" << xml_escape(s.label) << "</text>\n";
        }
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace hyamabe
