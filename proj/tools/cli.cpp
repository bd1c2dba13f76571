#include "cli.hpp"

#include "hyamabe/certify.hpp"
#include "hyamabe/dimension.hpp"
#include "hyamabe/serialize.hpp"
#include "hyamabe/shooting.hpp"
#include "hyamabe/yamabe.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace hyamabe::cli {

namespace {

namespace fs = std::filesystem;

/// Output path problems are usage errors, not solver failures.
class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot open '" + path.string() + "' for writing");
    f << content;
    if (!f.flush()) throw FileError("failed writing '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FileError("cannot read '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::string short_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::size_t default_jobs() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

struct DimsOpt {
    int n = 0;
    int m = 0;

    void add(CLI::App* app) {
        app->add_option("--n", n, "dimension of the hyperbolic factor (n >= 2)")->required();
        app->add_option("--m", m, "dimension of the sphere factor (m >= 2)")->required();
    }
    [[nodiscard]] Dimensions get() const {
        Dimensions d{n, m};
        d.validate();
        return d;
    }
};

struct TolOpt {
    SolverSettings settings;

    void add(CLI::App* app) {
        auto& c = settings.controls;
        auto& s = settings.shooting;
        app->add_option("--rel-tol", c.rel_tol, "integrator relative tolerance")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--abs-tol", c.abs_tol, "integrator absolute tolerance")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--t-max", c.t_max, "integration horizon")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--width-tol", s.width_tol, "relative bisection bracket width")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--smallness", s.smallness, "decay level accepted as ground-state evidence")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--truncation-floor", s.truncation_floor, "norm truncation level")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_option("--quadrature-step", settings.quadrature_step, "quadrature panel length")
            ->check(CLI::PositiveNumber)->capture_default_str();
        app->add_flag("--allow-r-above-one", settings.allow_r_above_one,
                      "accept r > 1 (outside the validated range)");
    }
};

void check_r(double r, const SolverSettings& settings) {
    if (!(r > 0.0)) throw std::invalid_argument("r must be positive");
    if (r > 1.0 && !settings.allow_r_above_one) {
        throw std::invalid_argument("r must lie in (0, 1]; pass --allow-r-above-one to override");
    }
}

// constants ------------------------------------------------------------------

int cmd_constants(const Dimensions& dims, std::ostream& out) {
    const DerivedConstants k = derive(dims);
    const int total = dims.total();
    const auto row = [&](const std::string& name, const std::string& exact, double value) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-22s %-10s %s\n", name.c_str(), exact.c_str(),
                      short_double(value).c_str());
        out << buf;
    };
    out << "n = " << dims.n << ", m = " << dims.m << "\n";
    row("a", k.a.to_string(), k.a.to_double());
    row("p", k.p.to_string(), k.p.to_double());
    row("q", k.q.to_string(), k.q.to_double());
    row("c", k.c.to_string(), k.c.to_double());
    row("D", k.d.to_string(), k.d.to_double());
    row("V(S^" + std::to_string(dims.m) + ")", "", k.vol_sphere_m);
    row("Y(S^" + std::to_string(total) + ")", "", sphere_yamabe(total));
    try {
        row("Q(0)", "", boundary_constants(dims).q0);
    } catch (const UnknownQ0&) {
        out << "Q(0)                   not tabulated for this (n, m)\n";
    }
    const double r_star = dims.m * (dims.m - 1) / k.c.to_double();
    out << "regime boundary        s_g = c; positive and achieved for s_g > " << k.c.to_string()
        << ", i.e. sphere radius^2 r < " << short_double(r_star) << "\n";
    return kSuccess;
}

// solve ----------------------------------------------------------------------

struct SolveOpt {
    DimsOpt dims;
    TolOpt tol;
    std::optional<double> r;
    std::optional<double> s;
    std::optional<double> alpha;
    std::vector<double> family;
    std::string out_path;
    std::string out_dir = ".";
};

nlohmann::ordered_json shot_log(const Trajectory& traj, std::ostream& out) {
    nlohmann::ordered_json j;
    j["alpha"] = traj.alpha();
    j["normalized"] = traj.params().normalized;
    out << "alpha " << short_double(traj.alpha()) << ": ";
    try {
        const SolutionClass cls = classify(traj.params(), traj);
        j["class"] = std::string(to_string(cls.tag));
        j["witness"] = std::string(to_string(cls.witness));
        j["witness_t"] = cls.t;
        out << to_string(cls.tag) << " (" << to_string(cls.witness) << " at t = " << short_double(cls.t)
            << ")";
    } catch (const Indeterminate&) {
        j["class"] = "indeterminate";
        out << "indeterminate";
    }
    j["termination"] = std::string(to_string(traj.termination()));
    out << ", termination " << to_string(traj.termination()) << "\n";
    auto events = nlohmann::ordered_json::array();
    for (const Event& e : traj.events()) {
        events.push_back({{"kind", std::string(to_string(e.kind))}, {"t", e.t}, {"phi", e.phi}});
        out << "  " << to_string(e.kind) << " t = " << short_double(e.t) << " phi = " << short_double(e.phi)
            << "\n";
    }
    j["events"] = std::move(events);
    return j;
}

int cmd_solve(const SolveOpt& o, std::ostream& out, std::ostream& err) {
    const Dimensions dims = o.dims.get();
    const SolverSettings& settings = o.tol.settings;
    double lambda = 0.0;
    if (o.r) {
        check_r(*o.r, settings);
        lambda = lambda_of_r(dims, *o.r);
    } else {
        lambda = lambda_of_total_curvature(dims, *o.s);
    }
    OdeParams params{lambda, dims.n, derive(dims).q.to_double(), lambda > 0.0};
    params.validate();

    std::vector<double> alphas = o.family;
    if (o.alpha) alphas.insert(alphas.begin(), *o.alpha);

    if (alphas.empty()) {
        const GroundState gs = find_ground_state(params, settings.controls, settings.shooting);
        const Trajectory traj = params.normalized ? rescale_normalized(gs.trajectory, lambda) : gs.trajectory;
        std::ostream& log = o.out_path.empty() ? err : out;
        log << "lambda = " << short_double(lambda) << ", ground state phi(0) = "
            << format_double(traj.alpha()) << " after " << gs.iterations << " bisections\n";
        if (o.out_path.empty()) {
            out << trajectory_csv(traj);
        } else {
            write_file(o.out_path, trajectory_csv(traj));
        }
        return kSuccess;
    }

    out << "lambda = " << short_double(lambda) << ", q = " << short_double(params.q)
        << (params.normalized ? ", normalized form lambda (phi - phi^q)\n" : ", plain form lambda phi - phi^q\n");
    nlohmann::ordered_json log;
    log["schema"] = kSchemaVersion;
    log["kind"] = "shooting_family";
    log["dims"] = {{"n", dims.n}, {"m", dims.m}};
    log["lambda"] = lambda;
    log["q"] = params.q;
    log["normalized"] = params.normalized;
    log["shots"] = nlohmann::ordered_json::array();
    const bool single = alphas.size() == 1 && !o.out_path.empty();
    for (double alpha : alphas) {
        if (!(alpha > 0.0)) throw std::invalid_argument("initial values must be positive");
        const Trajectory traj = integrate(params, alpha, settings.controls);
        auto entry = shot_log(traj, out);
        const fs::path path = single ? fs::path(o.out_path)
                                     : fs::path(o.out_dir) / ("solve_alpha_" + short_double(alpha) + ".csv");
        write_file(path, trajectory_csv(traj));
        entry["csv"] = path.filename().string();
        log["shots"].push_back(std::move(entry));
    }
    if (!single) write_file(fs::path(o.out_dir) / "solve_events.json", log.dump(2) + '\n');
    return kSuccess;
}

// q / sweep ------------------------------------------------------------------

struct QOpt {
    DimsOpt dims;
    TolOpt tol;
    double r = 1.0;
    std::string out_path;
};

int cmd_q(const QOpt& o, std::ostream& out) {
    const Dimensions dims = o.dims.get();
    check_r(o.r, o.tol.settings);
    const std::string json = to_json(compute_q(dims, o.r, o.tol.settings));
    if (o.out_path.empty()) {
        out << json;
    } else {
        write_file(o.out_path, json);
    }
    return kSuccess;
}

struct SweepOpt {
    DimsOpt dims;
    TolOpt tol;
    double r_min = 0.0;
    double r_max = 1.0;
    int steps = 50;
    bool log_spacing = false;
    bool include_zero = false;
    std::string out_path;
    std::string svg_path;
    std::size_t jobs = default_jobs();
};

int cmd_sweep(const SweepOpt& o, std::ostream& out, std::ostream& err) {
    const Dimensions dims = o.dims.get();
    check_r(o.r_min, o.tol.settings);
    check_r(o.r_max, o.tol.settings);
    if (o.r_min > o.r_max) throw std::invalid_argument("--r-min must not exceed --r-max");

    std::vector<double> radii;
    for (int i = 0; i < o.steps; ++i) {
        const double f = o.steps == 1 ? 0.0 : static_cast<double>(i) / (o.steps - 1);
        radii.push_back(o.log_spacing ? o.r_min * std::pow(o.r_max / o.r_min, f)
                                      : o.r_min + f * (o.r_max - o.r_min));
    }
    if (o.steps > 1) radii.back() = o.r_max;

    std::optional<double> q0;
    if (o.include_zero) q0 = boundary_constants(dims).q0;

    const std::vector<QResult> results = sweep(dims, radii, o.tol.settings, std::max<std::size_t>(1, o.jobs));

    for (std::size_t i = 1; i < results.size(); ++i) {
        const auto& lo = results[i - 1];
        const auto& hi = results[i];
        const double bound = scaling_upper_transfer(lo.q_value, lo.r, hi.r, dims);
        if (hi.q_value > bound * (1.0 + 1e-6)) {
            err << "warning: Q(" << format_double(hi.r) << ") = " << format_double(hi.q_value)
                << " exceeds the scaling bound " << format_double(bound) << "\n";
        }
    }

    const std::string csv = q_csv(results, q0);
    if (o.out_path.empty()) {
        out << csv;
    } else {
        write_file(o.out_path, csv);
    }
    if (!o.svg_path.empty()) {
        PlotSeries series;
        series.label = "Q_{" + std::to_string(dims.n) + "," + std::to_string(dims.m) + "}(r)";
        if (q0) {
            series.x.push_back(0.0);
            series.y.push_back(*q0);
        }
        for (const auto& r : results) {
            series.x.push_back(r.r);
            series.y.push_back(r.q_value);
        }
        write_file(o.svg_path, svg_line_plot(std::span(&series, 1), "H^n-Yamabe constant of H^" +
                                                 std::to_string(dims.n) + " x S^" + std::to_string(dims.m),
                                             "r", "Q"));
    }
    return kSuccess;
}

// certify / verify -------------------------------------------------------------

struct CertifyOpt {
    DimsOpt dims;
    TolOpt tol;
    double mu = 0.99;
    std::optional<double> q0;
    int max_steps = 5000;
    bool no_deflate = false;
    bool progress = false;
    std::string out_path;
    std::string report_path;
};

int cmd_certify(const CertifyOpt& o, std::ostream& out, std::ostream& err) {
    const Dimensions dims = o.dims.get();
    if (!(o.mu > 0.0 && o.mu < 1.0)) throw std::invalid_argument("--mu must lie in (0, 1)");
    CertifyOptions options;
    options.solver = o.tol.settings;
    options.q0 = o.q0;
    options.max_steps = o.max_steps;
    options.deflate = !o.no_deflate;
    if (o.progress) {
        options.on_step = [&err](const CertificationStep& s) {
            err << "s_" << s.i << " = " << format_double(s.s) << "  Q = " << format_double(s.q_computed) << "\n";
        };
    }
    const CertificationTrace trace = certify(dims, o.mu, options);
    if (!o.out_path.empty()) write_file(o.out_path, to_json(trace));
    if (!o.report_path.empty()) write_file(o.report_path, certification_report(trace));

    const Verdict recheck = check_trace(trace, trace.q0);
    out << to_string(trace.verdict.kind) << ": " << trace.steps.size() << " steps, final s = "
        << format_double(trace.steps.back().s) << ", threshold = " << format_double(trace.threshold) << "\n";
    if (trace.verdict.kind != VerdictKind::Certified) {
        out << "step " << trace.verdict.step << ": " << trace.verdict.detail << "\n";
        return kCertificationFailed;
    }
    if (recheck.kind != VerdictKind::Certified) {
        err << "independent re-check disagrees: " << to_string(recheck.kind) << " at step " << recheck.step
            << " (" << recheck.detail << ")\n";
        return kCertificationFailed;
    }
    return kSuccess;
}

struct VerifyOpt {
    std::string trace_path;
    std::optional<double> q0;
};

int cmd_verify(const VerifyOpt& o, std::ostream& out) {
    const CertificationTrace trace = trace_from_json(read_file(o.trace_path));
    double q0 = trace.q0;
    if (o.q0) {
        q0 = *o.q0;
    } else {
        try {
            q0 = boundary_constants(trace.dims).q0;
        } catch (const UnknownQ0&) {
        }
    }
    const Verdict v = check_trace(trace, q0);
    out << to_string(v.kind) << " at step " << v.step;
    if (!v.detail.empty()) out << ": " << v.detail;
    out << "\n";
    return v.kind == VerdictKind::Certified ? kSuccess : kCertificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"H^n-Yamabe constants of H^n x S^m by shooting", "hyamabe"};
    app.require_subcommand(1);

    DimsOpt constants_opt;
    auto* constants = app.add_subcommand("constants", "print the constants attached to (n, m)");
    constants_opt.add(constants);

    SolveOpt solve_opt;
    auto* solve = app.add_subcommand("solve", "shoot the radial equation and write trajectory CSVs");
    solve_opt.dims.add(solve);
    solve_opt.tol.add(solve);
    auto* r_flag = solve->add_option("--r", solve_opt.r, "squared sphere radius");
    auto* s_flag = solve->add_option("--s", solve_opt.s, "total scalar curvature, lambda = s / a");
    r_flag->excludes(s_flag);
    solve->add_option("--alpha", solve_opt.alpha, "single initial value phi(0)");
    solve->add_option("--family", solve_opt.family, "comma-separated initial values")->delimiter(',');
    solve->add_option("--out", solve_opt.out_path, "CSV path (ground state or single --alpha)");
    solve->add_option("--out-dir", solve_opt.out_dir, "directory for --family CSVs and the event log")
        ->capture_default_str();

    QOpt q_opt;
    auto* q = app.add_subcommand("q", "compute Q_{n,m}(r) and print it as JSON");
    q_opt.dims.add(q);
    q_opt.tol.add(q);
    q->add_option("--r", q_opt.r, "squared sphere radius")->required();
    q->add_option("--out", q_opt.out_path, "JSON path (default stdout)");

    SweepOpt sweep_opt;
    if (const char* env = std::getenv("HYAMABE_JOBS")) {
        try {
            sweep_opt.jobs = std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            err << "ignoring malformed HYAMABE_JOBS='" << env << "'\n";
        }
    }
    auto* sw = app.add_subcommand("sweep", "tabulate Q_{n,m}(r) over a range of r");
    sweep_opt.dims.add(sw);
    sweep_opt.tol.add(sw);
    sw->add_option("--r-min", sweep_opt.r_min, "smallest r")->required();
    sw->add_option("--r-max", sweep_opt.r_max, "largest r")->capture_default_str();
    sw->add_option("--steps", sweep_opt.steps, "number of radii")->check(CLI::PositiveNumber)->capture_default_str();
    sw->add_flag("--log-spacing", sweep_opt.log_spacing, "geometric instead of uniform spacing");
    sw->add_flag("--include-zero", sweep_opt.include_zero, "prepend the tabulated r = 0 row");
    sw->add_option("--out", sweep_opt.out_path, "CSV path (default stdout)");
    sw->add_option("--svg", sweep_opt.svg_path, "also write a line plot of Q against r");
    sw->add_option("--jobs", sweep_opt.jobs, "worker threads (default HYAMABE_JOBS or all cores)")
        ->check(CLI::PositiveNumber);

    CertifyOpt certify_opt;
    auto* cert = app.add_subcommand("certify", "prove Q(r) >= mu Q(0) on [0, 1] by the scaling recursion");
    certify_opt.dims.add(cert);
    certify_opt.tol.add(cert);
    cert->add_option("--mu", certify_opt.mu, "fraction of Q(0) to certify")->capture_default_str();
    cert->add_option("--q0", certify_opt.q0, "Q(0) for untabulated (n, m)")->check(CLI::PositiveNumber);
    cert->add_option("--max-steps", certify_opt.max_steps, "step budget")
        ->check(CLI::PositiveNumber)->capture_default_str();
    cert->add_flag("--no-deflate", certify_opt.no_deflate, "use Q(s_i) without subtracting its uncertainty");
    cert->add_flag("--progress", certify_opt.progress, "log every step to stderr");
    cert->add_option("--out", certify_opt.out_path, "trace JSON path");
    cert->add_option("--report", certify_opt.report_path, "markdown report path");

    VerifyOpt verify_opt;
    auto* verify = app.add_subcommand("verify", "re-check a certification trace without solving");
    verify->add_option("--trace", verify_opt.trace_path, "trace JSON written by certify")->required();
    verify->add_option("--q0", verify_opt.q0, "Q(0) to check against (default: tabulated)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
        if (solve->parsed() && !solve_opt.r && !solve_opt.s) {
            throw CLI::RequiredError("solve needs one of --r or --s");
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (constants->parsed()) return cmd_constants(constants_opt.get(), out);
        if (solve->parsed()) return cmd_solve(solve_opt, out, err);
        if (q->parsed()) return cmd_q(q_opt, out);
        if (sw->parsed()) return cmd_sweep(sweep_opt, out, err);
        if (cert->parsed()) return cmd_certify(certify_opt, out, err);
        if (verify->parsed()) return cmd_verify(verify_opt, out);
    } catch (const FileError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const UnknownQ0& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kUsageError;
}

}  // namespace hyamabe::cli
