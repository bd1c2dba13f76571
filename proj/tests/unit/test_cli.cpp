#include <doctest.h>

#include "cli.hpp"
#include "hyamabe/yamabe.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using hyamabe::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hyamabe_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::pair<double, double>> two_columns(const std::string& csv) {
    std::vector<std::pair<double, double>> rows;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        char* end = nullptr;
        const double a = std::strtod(line.c_str(), &end);
        const double b = std::strtod(end + 1, nullptr);
        rows.emplace_back(a, b);
    }
    return rows;
}

}  // namespace

TEST_CASE("constants") {
    const auto r23 = cli({"constants", "--n", "2", "--m", "3"});
    CHECK(r23.code == 0);
    CHECK(r23.out.find("q                      7/3") != std::string::npos);
    const auto r22 = cli({"constants", "--n", "2", "--m", "2"});
    CHECK(r22.out.find("c                      1/2        0.5\n") != std::string::npos);
    const auto bad = cli({"constants", "--n", "1", "--m", "2"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("n >= 2") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(cli({}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({"q", "--n", "2", "--m", "2"}).code == 2);
    CHECK(cli({"q", "--n", "2", "--m", "2", "--r", "1.5"}).code == 2);
    CHECK(cli({"q", "--n", "2", "--m", "2", "--r", "1", "--rel-tol", "-1"}).code == 2);
    CHECK(cli({"solve", "--n", "2", "--m", "2"}).code == 2);
    CHECK(cli({"solve", "--n", "2", "--m", "2", "--r", "1", "--s", "2"}).code == 2);
    CHECK(cli({"q", "--n", "2", "--m", "2", "--r", "1", "--out", "/proc/forbidden/q.json"}).code == 2);
    CHECK(cli({"certify", "--n", "3", "--m", "3"}).code == 2);
    CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("solve families") {
    SUBCASE("lambda = -3/32") {
        const fs::path dir = scratch("fam_neg");
        const auto r = cli({"solve", "--n", "2", "--m", "3", "--s", "-0.5", "--family", "0.5,0.9,1.2,1.9,3",
                            "--out-dir", dir.string()});
        REQUIRE(r.code == 0);
        int csvs = 0;
        for (const auto& e : fs::directory_iterator(dir)) csvs += e.path().extension() == ".csv";
        CHECK(csvs == 5);
        const auto log = nlohmann::json::parse(slurp(dir / "solve_events.json"));
        CHECK(log["lambda"].get<double>() == doctest::Approx(-3.0 / 32));
        const auto& last = log["shots"][4];
        CHECK(last["alpha"] == 3.0);
        CHECK(last["class"] == "N");
        CHECK(last["events"][0]["kind"] == "zero_crossing");
    }
    SUBCASE("lambda = 15/8") {
        const fs::path dir = scratch("fam_pos");
        const auto r = cli({"solve", "--n", "2", "--m", "3", "--s", "10", "--family", "0.3,2.5,2.8", "--out-dir",
                            dir.string()});
        REQUIRE(r.code == 0);
        const auto log = nlohmann::json::parse(slurp(dir / "solve_events.json"));
        CHECK(log["normalized"] == true);
        const auto crosses = [&](int i) {
            for (const auto& e : log["shots"][i]["events"]) {
                if (e["kind"] == "zero_crossing") return true;
            }
            return false;
        };
        CHECK_FALSE(crosses(0));
        CHECK(crosses(2));
    }
}

TEST_CASE("solve ground state writes a decreasing profile") {
    const fs::path dir = scratch("gs");
    const auto r = cli({"solve", "--n", "2", "--m", "2", "--r", "1", "--out", (dir / "gs.csv").string()});
    REQUIRE(r.code == 0);
    const auto rows = two_columns(slurp(dir / "gs.csv"));
    REQUIRE(rows.size() > 10);
    CHECK(rows.front().second == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].second <= rows[i - 1].second);
}

TEST_CASE("q prints a QResult") {
    const auto r = cli({"q", "--n", "2", "--m", "2", "--r", "1"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["q_value"].get<double>() == doctest::Approx(61.56239).epsilon(1e-3));
    const auto r23 = cli({"q", "--n", "2", "--m", "3", "--r", "0.46075"});
    CHECK(nlohmann::json::parse(r23.out)["q_value"].get<double>() == doctest::Approx(78.79217).epsilon(1e-3));
    CHECK(cli({"q", "--n", "2", "--m", "3", "--r", "0.46075"}).out == r23.out);
}

TEST_CASE("sweep") {
    const fs::path dir = scratch("sweep");
    const auto r = cli({"sweep", "--n", "3", "--m", "2", "--r-min", "0.003", "--r-max", "1", "--steps", "50",
                        "--include-zero", "--out", (dir / "q.csv").string(), "--svg", (dir / "q.svg").string()});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const auto rows = two_columns(slurp(dir / "q.csv"));
    REQUIRE(rows.size() == 51);
    CHECK(rows[0].first == 0.0);
    CHECK(rows[0].second == 75.39687);
    CHECK(rows.back().first == 1.0);
    for (std::size_t i = 2; i < rows.size(); ++i) {
        const auto [r0, q0] = rows[i - 1];
        const auto [r1, q1] = rows[i];
        CHECK(q1 <= std::pow(r1 / r0, 0.4) * q0 * (1 + 1e-6));
    }
    CHECK(slurp(dir / "q.svg").find("<svg") != std::string::npos);

    const auto a = cli({"sweep", "--n", "2", "--m", "2", "--r-min", "0.1", "--steps", "6", "--jobs", "1"});
    const auto b = cli({"sweep", "--n", "2", "--m", "2", "--r-min", "0.1", "--steps", "6", "--jobs", "3"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("sweep honours HYAMABE_JOBS") {
    ::setenv("HYAMABE_JOBS", "2", 1);
    const auto r = cli({"sweep", "--n", "2", "--m", "2", "--r-min", "0.5", "--steps", "3"});
    ::unsetenv("HYAMABE_JOBS");
    CHECK(r.code == 0);
    CHECK(two_columns(r.out).size() == 3);
}

TEST_CASE("certify, report, and verify") {
    const fs::path dir = scratch("certify");
    const auto r = cli({"certify", "--n", "2", "--m", "2", "--out", (dir / "t.json").string(), "--report",
                        (dir / "t.md").string()});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("certified: ", 0) == 0);
    const auto trace = nlohmann::json::parse(slurp(dir / "t.json"));
    const int steps = static_cast<int>(trace["steps"].size());
    CHECK(std::abs(steps - 126) <= 12);
    CHECK(slurp(dir / "t.md").find("| 42 | 0.0905") != std::string::npos);

    CHECK(cli({"verify", "--trace", (dir / "t.json").string()}).code == 0);

    // A tampered trace is rejected.
    auto tampered = trace;
    tampered["steps"][10]["s"] = tampered["steps"][10]["s"].get<double>() * (1 + 1e-6);
    std::ofstream(dir / "bad.json") << tampered.dump();
    const auto v = cli({"verify", "--trace", (dir / "bad.json").string()});
    CHECK(v.code == 1);
    CHECK(v.out.find("arithmetic_mismatch at step 11") != std::string::npos);

    // Determinism of the written trace.
    const auto again = cli({"certify", "--n", "2", "--m", "2", "--out", (dir / "t2.json").string()});
    CHECK(slurp(dir / "t2.json") == slurp(dir / "t.json"));
    CHECK(again.code == 0);
}

TEST_CASE("certify failure exits with 1") {
    const auto r = cli({"certify", "--n", "2", "--m", "2", "--q0", "63"});
    CHECK(r.code == 1);
    CHECK(r.out.find("failed") != std::string::npos);
}

TEST_CASE("a larger mu needs more steps") {
    const auto count = [](const std::string& mu) {
        const auto r = cli({"certify", "--n", "2", "--m", "2", "--mu", mu});
        REQUIRE(r.code == 0);
        return std::stoi(r.out.substr(r.out.find(": ") + 2));
    };
    const int base = count("0.99");
    const int strict = count("0.999");
    CHECK(strict > base);
}
