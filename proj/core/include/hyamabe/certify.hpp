#pragma once

#include "hyamabe/dimension.hpp"
#include "hyamabe/rational.hpp"
#include "hyamabe/yamabe.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hyamabe {

struct CertificationStep {
    int i = 0;
    double s = 0.0;
    double q_computed = 0.0;
    double q_uncertainty = 0.0;
    double q_used = 0.0;  ///< q_computed deflated by q_uncertainty; drives the recursion
    bool pass = false;    ///< q_used > mu Q(0)
};

enum class VerdictKind { Certified, Failed, StepBudgetExhausted, ArithmeticMismatch };

struct Verdict {
    VerdictKind kind = VerdictKind::Failed;
    int step = 0;  ///< offending step for Failed / ArithmeticMismatch
    std::string detail;
};

[[nodiscard]] std::string_view to_string(VerdictKind kind) noexcept;

/// Proof trace for Q_{n,m}(r) >= mu Q_{n,m}(0) on [0, 1].
///
/// s_1 = 1 and s_{i+1} = (mu Q(0) / Q(s_i))^{(n+m)/m} s_i. The scaling
/// inequality covers [s_{i+1}, s_i] whenever Q(s_i) > mu Q(0); the small-r
/// lower bound covers [0, threshold] with threshold = (1-mu) m(m-1)/(n(n-1)).
struct CertificationTrace {
    Dimensions dims;
    double mu = 0.99;
    double q0 = 0.0;
    double q1 = 0.0;
    Rational exponent;  ///< (n+m)/m
    double threshold = 0.0;
    bool deflated = true;
    std::vector<CertificationStep> steps;
    Verdict verdict;
    double stall_ratio = 0.0;  ///< last s_{i+1}/s_i
};

struct CertifyOptions {
    SolverSettings solver;
    std::optional<double> q0;  ///< required outside the tabulated (n, m)
    int max_steps = 5000;
    bool deflate = true;
    /// Abort as stalled once s_{i+1}/s_i exceeds this.
    double max_step_ratio = 1.0 - 1e-12;
    /// Called after every evaluated step (progress reporting).
    std::function<void(const CertificationStep&)> on_step;
};

/// (1 - mu) m(m-1) / (n(n-1)).
[[nodiscard]] double certification_threshold(const Dimensions& dims, double mu);

/// Runs the recursion from s_1 = 1, evaluating Q(s_i) with compute_q, until
/// some s_i drops below the threshold (Certified), a step fails, or the
/// sequence stalls. The step that lands below the threshold is evaluated and
/// recorded as well.
[[nodiscard]] CertificationTrace certify(const Dimensions& dims, double mu,
                                         const CertifyOptions& options = {});

/// Re-verifies a finished trace from its stored numbers alone: recursion
/// arithmetic (1e-12 relative), pass flags, strict decrease, threshold.
[[nodiscard]] Verdict check_trace(const CertificationTrace& trace, double q0);

}  // namespace hyamabe
