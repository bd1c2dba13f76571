#include <doctest.h>

#include "hyamabe/serialize.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace hyamabe;

namespace {

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("format_double round-trips") {
    for (double v : {0.1, 1.0 / 3, 61.56239, -3.0 / 32, 1e-300, 6.02214076e23}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("trajectory CSV") {
    const Trajectory traj = integrate({-3.0 / 32, 2, 7.0 / 3, false}, 3.0, {});
    const std::string csv = trajectory_csv(traj);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.back() == '\n');
    const auto rows = lines(csv);
    CHECK(rows.front() == "t,phi,dphi,energy");
    REQUIRE(rows.size() == traj.samples().size() + 1);
    std::istringstream last(rows.back());
    std::string field;
    std::getline(last, field, ',');
    CHECK(std::strtod(field.c_str(), nullptr) == traj.back().t);
}

TEST_CASE("Q CSV with the boundary row") {
    const QResult q = compute_q({2, 2}, 1.0);
    const std::vector<QResult> results{q};
    const auto rows = lines(q_csv(results, 59.40481));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "r,q");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(std::strtod(rows[1].c_str() + 2, nullptr) == 59.40481);
    CHECK(rows[2] == "1," + format_double(q.q_value));
}

TEST_CASE("QResult JSON carries every field at full precision") {
    const QResult q = compute_q({2, 3}, 0.46075);
    const std::string text = to_json(q);
    CHECK(text == to_json(q));
    const auto j = nlohmann::json::parse(text);
    CHECK(j["schema"] == 1);
    CHECK(j["q_value"].get<double>() == q.q_value);
    CHECK(j["uncertainty"].get<double>() == q.uncertainty);
    CHECK(j["norms"]["lp"].get<double>() == q.norms.lp);
    CHECK(j["diagnostics"]["bracket"]["alpha_hi"].get<double>() == q.diagnostics.bracket.alpha_hi);
    CHECK(j["diagnostics"]["controls"]["rel_tol"].get<double>() == q.diagnostics.controls.rel_tol);
}

TEST_CASE("bisection trace JSON") {
    const GroundState gs = find_ground_state({0.0, 2, 3.0, false}, {}, {});
    const auto j = nlohmann::json::parse(shots_json(gs.shots));
    REQUIRE(j["shots"].size() == gs.shots.size());
    CHECK(j["shots"][0]["class"].is_string());
}

TEST_CASE("certification trace round-trips through JSON") {
    CertifyOptions o;
    o.max_steps = 6;
    const CertificationTrace t = certify({3, 2}, 0.99, o);
    const CertificationTrace back = trace_from_json(to_json(t));
    CHECK(back.dims == t.dims);
    CHECK(back.exponent == t.exponent);
    CHECK(back.threshold == t.threshold);
    CHECK(back.verdict.kind == t.verdict.kind);
    REQUIRE(back.steps.size() == t.steps.size());
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        CHECK(back.steps[i].s == t.steps[i].s);
        CHECK(back.steps[i].q_used == t.steps[i].q_used);
    }
    CHECK(to_json(back) == to_json(t));
    CHECK_THROWS_AS((void)trace_from_json("{"), std::invalid_argument);
    CHECK_THROWS_AS((void)trace_from_json(R"({"schema": 2, "kind": "certification_trace"})"), std::invalid_argument);
}

TEST_CASE("markdown report rounds to 5 decimals") {
    CertifyOptions o;
    o.max_steps = 3;
    const CertificationTrace t = certify({2, 2}, 0.99, o);
    const std::string md = certification_report(t);
    CHECK(md.find("| 1 | 1.00000 | 61.56239 |") != std::string::npos);
    CHECK(md.find("| mu Q(0) | 58.81076 |") != std::string::npos);
    CHECK(md.find("uncertainty") != std::string::npos);
}

TEST_CASE("SVG plot") {
    PlotSeries s{{0.0, 0.5, 1.0}, {59.4, 60.9, 61.5}, "Q<a&b>"};
    const std::string svg = svg_line_plot(std::span(&s, 1), "title", "r", "Q");
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("Q&lt;a&amp;b&gt;") != std::string::npos);
    PlotSeries bad{{0.0}, {1.0, 2.0}, ""};
    CHECK_THROWS_AS((void)svg_line_plot(std::span(&bad, 1), "", "", ""), std::invalid_argument);
}
