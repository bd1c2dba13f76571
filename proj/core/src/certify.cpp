#include "hyamabe/certify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hyamabe {

namespace {

constexpr double kRecursionTol = 1e-12;

double next_s(double mu, double q0, double q_used, double s, const Rational& exponent) {
    return std::pow(mu * q0 / q_used, exponent.to_double()) * s;
}

bool close(double a, double b, double rel) {
    return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

std::string_view to_string(VerdictKind kind) noexcept {
    switch (kind) {
        case VerdictKind::Certified: return "certified";
        case VerdictKind::Failed: return "failed";
        case VerdictKind::StepBudgetExhausted: return "step_budget_exhausted";
        case VerdictKind::ArithmeticMismatch: return "arithmetic_mismatch";
    }
    return "unknown";
}

double certification_threshold(const Dimensions& dims, double mu) {
    dims.validate();
    return (1.0 - mu) * dims.m * (dims.m - 1) / (dims.n * (dims.n - 1));
}

CertificationTrace certify(const Dimensions& dims, double mu, const CertifyOptions& options) {
    dims.validate();
    if (!(mu > 0.0 && mu < 1.0)) throw std::invalid_argument("certify: mu must lie in (0, 1)");

    CertificationTrace trace;
    trace.dims = dims;
    trace.mu = mu;
    trace.exponent = Rational(dims.total(), dims.m);
    trace.threshold = certification_threshold(dims, mu);
    trace.deflated = options.deflate;
    if (options.q0) {
        trace.q0 = *options.q0;
        trace.q1 = sphere_yamabe(dims.total());
    } else {
        const BoundaryConstants bc = boundary_constants(dims);
        trace.q0 = bc.q0;
        trace.q1 = bc.q1;
    }
    if (!(trace.q0 > 0.0)) throw std::invalid_argument("certify: Q(0) must be positive");

    const double target = mu * trace.q0;
    double s = 1.0;
    for (int i = 1;; ++i) {
        if (i > options.max_steps) {
            trace.verdict = {VerdictKind::StepBudgetExhausted, i - 1,
                             "step budget of " + std::to_string(options.max_steps) + " exhausted"};
            return trace;
        }
        const QResult q = compute_q(dims, s, options.solver);
        CertificationStep step;
        step.i = i;
        step.s = s;
        step.q_computed = q.q_value;
        step.q_uncertainty = q.uncertainty;
        step.q_used = options.deflate ? q.q_value - q.uncertainty : q.q_value;
        step.pass = step.q_used > target;
        trace.steps.push_back(step);
        if (options.on_step) options.on_step(step);

        if (!step.pass) {
            trace.verdict = {VerdictKind::Failed, i,
                             "Q(s_" + std::to_string(i) + ") does not exceed mu Q(0)"};
            return trace;
        }
        if (s < trace.threshold) {
            trace.verdict = {VerdictKind::Certified, i, ""};
            return trace;
        }
        const double s_next = next_s(mu, trace.q0, step.q_used, s, trace.exponent);
        trace.stall_ratio = s_next / s;
        if (trace.stall_ratio > options.max_step_ratio) {
            trace.verdict = {VerdictKind::StepBudgetExhausted, i,
                             "sequence stalled: s_{i+1}/s_i = " + std::to_string(trace.stall_ratio)};
            return trace;
        }
        s = s_next;
    }
}

Verdict check_trace(const CertificationTrace& trace, double q0) {
    const auto& steps = trace.steps;
    if (steps.empty()) return {VerdictKind::Failed, 0, "empty trace"};
    if (!(trace.mu > 0.0 && trace.mu < 1.0)) return {VerdictKind::Failed, 0, "mu outside (0, 1)"};

    const Dimensions& dims = trace.dims;
    const double threshold = certification_threshold(dims, trace.mu);
    if (!close(threshold, trace.threshold, kRecursionTol)) {
        return {VerdictKind::ArithmeticMismatch, 0, "threshold does not match (1-mu) m(m-1)/(n(n-1))"};
    }
    const Rational exponent(dims.total(), dims.m);
    if (!(trace.exponent == exponent)) {
        return {VerdictKind::ArithmeticMismatch, 0, "exponent is not (n+m)/m"};
    }
    if (steps.front().s != 1.0) return {VerdictKind::ArithmeticMismatch, 1, "s_1 must equal 1"};

    const double target = trace.mu * q0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const CertificationStep& st = steps[k];
        if (st.i != static_cast<int>(k) + 1) {
            return {VerdictKind::ArithmeticMismatch, st.i, "step indices are not consecutive"};
        }
        if (st.pass != (st.q_used > target)) {
            return {VerdictKind::ArithmeticMismatch, st.i, "pass flag disagrees with Q(s_i) > mu Q(0)"};
        }
        if (st.q_used > st.q_computed) {
            return {VerdictKind::ArithmeticMismatch, st.i, "deflated Q exceeds computed Q"};
        }
        if (!st.pass) return {VerdictKind::Failed, st.i, "Q(s_i) does not exceed mu Q(0)"};
        if (k + 1 < steps.size()) {
            const double expected = next_s(trace.mu, q0, st.q_used, st.s, exponent);
            const CertificationStep& nx = steps[k + 1];
            if (!close(expected, nx.s, kRecursionTol)) {
                return {VerdictKind::ArithmeticMismatch, nx.i, "s_{i+1} does not follow the recursion"};
            }
            if (!(nx.s < st.s)) {
                return {VerdictKind::ArithmeticMismatch, nx.i, "sequence is not strictly decreasing"};
            }
        }
    }
    if (!(steps.back().s < threshold)) {
        return {VerdictKind::Failed, steps.back().i, "final s is not below the threshold"};
    }
    return {VerdictKind::Certified, steps.back().i, ""};
}

}  // namespace hyamabe
