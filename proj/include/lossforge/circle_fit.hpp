#pragma once

#include <complex>
#include <vector>

#include "lossforge/domain.hpp"

namespace lossforge {

// Fitting the asymmetric hanger response in the complex plane. The pipeline is
// delay removal -> algebraic circle fit -> phase fit -> off-resonant point ->
// one weighted nonlinear refinement of all 7 parameters.

struct CircleGeometry {
    std::complex<double> center{0.0, 0.0};
    double radius = 0.0;
};

// Taubin algebraic circle fit (eigenvalue form, Newton solve on the
// characteristic polynomial). Exact for noiseless circular data and unbiased
// to first order in noise. Throws "degenerate-circle" for collinear input.
CircleGeometry algebraic_circle_fit(const std::vector<std::complex<double>>& points);

// Electrical delay tau such that S21 * exp(+i 2 pi f tau) is maximally
// circular: coarse scan seeded by the unwrapped-phase slope, then
// golden-section refinement. Throws "no-resonance" when the corrected trace
// has no circle above the noise floor.
double estimate_delay(const FrequencyTrace& trace);

struct PhaseFitResult {
    double fr_hz = 0.0;
    double q_loaded = 0.0;
    double theta0 = 0.0; // phase of the resonance point seen from the center
};

// Fit theta(f) = theta0 + 2 atan(2 Q_L (1 - f/fr)) to the phase of the
// delay-corrected trace translated to the circle center.
PhaseFitResult phase_fit(const FrequencyTrace& delay_corrected, const CircleGeometry& geometry);

// Full pipeline. Throws "invalid-asymmetry" when |phi| >= pi/2.
HangerFit fit_hanger(const FrequencyTrace& trace);

// Q_int from 1/Q_L = 1/Q_int + cos(phi)/|Q_c|, with first-order error
// propagation. Throws "nonphysical-internal-loss" when the coupling loss
// already exceeds the loaded loss.
ValueSigma internal_q(const HangerFit& fit);

// Trace with the delay removed (S21 * exp(+i 2 pi f tau)).
FrequencyTrace remove_delay(const FrequencyTrace& trace, double tau_s);

} // namespace lossforge
