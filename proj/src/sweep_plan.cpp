#include "lossforge/sweep_plan.hpp"

#include <cmath>
#include <string>

#include "lossforge/errors.hpp"

namespace lossforge {

namespace {

void check_plan_args(double center_hz, double span_hz, int n_points, bool require_odd,
                     int min_points = 7) {
    if (!(center_hz > 0.0) || !(span_hz > 0.0))
        fail_validation("plan-bad-range", "center and span must be positive");
    if (span_hz >= 2.0 * center_hz)
        fail_validation("plan-bad-range", "span extends below zero frequency");
    if (n_points < min_points)
        fail_validation("plan-too-few-points",
                        "need at least " + std::to_string(min_points) + " points");
    if (require_odd && n_points % 2 == 0)
        fail_validation("plan-even-count", "symmetric plans need an odd point count");
}

} // namespace

SweepPlan plan_linear(double center_hz, double span_hz, int n_points) {
    check_plan_args(center_hz, span_hz, n_points, false);
    SweepPlan plan{center_hz, span_hz, 0.0, {}, SweepScheme::Linear};
    plan.points_hz.resize(n_points);
    const double f0 = center_hz - span_hz / 2.0;
    for (int i = 0; i < n_points; ++i)
        plan.points_hz[i] = f0 + span_hz * static_cast<double>(i) / (n_points - 1);
    plan.points_hz.front() = center_hz - span_hz / 2.0;
    plan.points_hz.back() = center_hz + span_hz / 2.0;
    return plan;
}

SweepPlan plan_quadratic(double center_hz, double span_hz, int n_points) {
    check_plan_args(center_hz, span_hz, n_points, true, 5);
    SweepPlan plan{center_hz, span_hz, 0.0, {}, SweepScheme::Quadratic};
    const int m = (n_points - 1) / 2;
    // offset(k) = sum_{j=1..k} j^2 = k(k+1)(2k+1)/6
    const auto offset = [](int k) {
        return static_cast<double>(k) * (k + 1) * (2 * k + 1) / 6.0;
    };
    const double norm = offset(m);
    plan.points_hz.resize(n_points);
    for (int n = -m; n <= m; ++n) {
        const double mag = offset(std::abs(n)) / norm;
        plan.points_hz[n + m] = center_hz + (n < 0 ? -1.0 : 1.0) * (span_hz / 2.0) * mag;
    }
    return plan;
}

SweepPlan plan_phase_uniform(double center_hz, double span_hz, double weight, int n_points) {
    check_plan_args(center_hz, span_hz, n_points, true);
    if (!(weight > 0.0)) fail_validation("plan-bad-weight", "weight must be positive");
    SweepPlan plan{center_hz, span_hz, weight, {}, SweepScheme::PhaseUniform};
    const int m = (n_points - 1) / 2;
    const double theta_half = std::atan(weight);
    const double norm = std::tan(theta_half);
    plan.points_hz.resize(n_points);
    for (int n = -m; n <= m; ++n) {
        const double x = theta_half * static_cast<double>(n) / m;
        plan.points_hz[n + m] = center_hz + (span_hz / 2.0) * (std::tan(x) / norm);
    }
    return plan;
}

double phase_gap_metric(const SweepPlan& plan, double q_loaded) {
    if (!(q_loaded > 0.0)) fail_validation("plan-bad-q", "loaded Q must be positive");
    if (plan.points_hz.size() < 2)
        fail_validation("plan-too-few-points", "need at least 2 points for a gap");
    double max_gap = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < plan.points_hz.size(); ++i) {
        const double psi =
            2.0 * std::atan(2.0 * q_loaded * (plan.points_hz[i] / plan.center_hz - 1.0));
        if (i > 0) max_gap = std::max(max_gap, std::abs(psi - prev));
        prev = psi;
    }
    return max_gap;
}

std::string scheme_name(SweepScheme scheme) {
    switch (scheme) {
        case SweepScheme::Linear: return "linear";
        case SweepScheme::Quadratic: return "quadratic";
        case SweepScheme::PhaseUniform: return "phase-uniform";
    }
    return "linear";
}

SweepScheme scheme_from_name(const std::string& name) {
    if (name == "linear") return SweepScheme::Linear;
    if (name == "quadratic") return SweepScheme::Quadratic;
    if (name == "phase-uniform") return SweepScheme::PhaseUniform;
    fail_validation("plan-unknown-scheme", "unknown sweep scheme '" + name + "'");
}

} // namespace lossforge
