#pragma once

#include <string>
#include <vector>

namespace lossforge {

enum class SweepScheme { Linear, Quadratic, PhaseUniform };

// An ordered frequency-point plan for measuring one resonance. The weight is
// the frequency span expressed in linewidths, W = span / (fr / Q_L); it sets
// how strongly phase-uniform points bunch toward resonance.
struct SweepPlan {
    double center_hz = 0.0;
    double span_hz = 0.0;
    double weight = 0.0;
    std::vector<double> points_hz;
    SweepScheme scheme = SweepScheme::Linear;
};

// Uniform grid over [center - span/2, center + span/2].
SweepPlan plan_linear(double center_hz, double span_hz, int n_points);

// Symmetric plan whose spacing grows quadratically away from the center: the
// k-th offset from the center is proportional to sum_{j=1..k} j^2
// = k(k+1)(2k+1)/6, rescaled so the endpoints land exactly on center +- span/2.
SweepPlan plan_quadratic(double center_hz, double span_hz, int n_points);

// Points uniform in circle phase: f_n = center + (span/2) tan(x_n)/tan(x_m)
// with x_n = (n/m) atan(W) for n = -m..m, m = (N-1)/2. The half-angle form
// atan(W) is branch-free in W (no singularity at W = 1) and the shared
// tan(x_m) normalization makes the endpoints exact. W -> 0 recovers the
// linear grid.
SweepPlan plan_phase_uniform(double center_hz, double span_hz, double weight, int n_points);

// Maximum adjacent gap, in radians, of the plan mapped through the
// frequency-phase relation psi(f) = 2 atan(2 Q_L (f/center - 1)).
double phase_gap_metric(const SweepPlan& plan, double q_loaded);

std::string scheme_name(SweepScheme scheme);
SweepScheme scheme_from_name(const std::string& name);

} // namespace lossforge
