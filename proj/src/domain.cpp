#include "lossforge/domain.hpp"

#include <cmath>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"

namespace lossforge {

FrequencyTrace::FrequencyTrace(std::vector<TracePoint> points,
                               std::optional<double> drive_power_w,
                               std::string label)
    : points_(std::move(points)), drive_power_w_(drive_power_w), label_(std::move(label)) {
    if (points_.size() < 7)
        fail_validation("trace-too-short",
                        "need at least 7 points to constrain the 7-parameter hanger model, got " +
                            std::to_string(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!std::isfinite(p.frequency_hz) || !std::isfinite(p.s21.real()) ||
            !std::isfinite(p.s21.imag()))
            fail_validation("trace-not-finite", "non-finite sample at row " + std::to_string(i));
        if (std::abs(p.s21) <= 0.0)
            fail_validation("trace-zero-magnitude", "|S21| must be > 0 at row " + std::to_string(i));
        if (i > 0 && !(p.frequency_hz > points_[i - 1].frequency_hz))
            fail_validation("trace-not-increasing",
                            "frequencies must be strictly increasing at row " + std::to_string(i));
    }
    if (drive_power_w_ && !(*drive_power_w_ >= 0.0 && std::isfinite(*drive_power_w_)))
        fail_validation("trace-bad-power", "drive power must be finite and non-negative");
}

std::complex<double> hanger_s21(const HangerParams& p, double f_hz) {
    const std::complex<double> i1(0.0, 1.0);
    const std::complex<double> prefactor =
        p.amplitude_a * std::exp(i1 * (p.alpha - angular(f_hz) * p.tau_s));
    const std::complex<double> denom = 1.0 + i1 * (2.0 * p.q_loaded * (f_hz / p.fr_hz - 1.0));
    const std::complex<double> dip =
        (p.q_loaded / p.q_coupling_mag) * std::exp(i1 * p.phi) / denom;
    return prefactor * (1.0 - dip);
}

void HangerFit::validate(double fmin_hz, double fmax_hz) const {
    if (!(params.q_loaded > 0.0))
        fail_numerical("invalid-fit", "loaded Q must be positive");
    if (!(params.q_coupling_mag > 0.0))
        fail_numerical("invalid-fit", "|Qc| must be positive");
    if (!(std::abs(params.phi) < pi / 2.0))
        fail_numerical("invalid-asymmetry",
                       "|phi| >= pi/2: the Q_int decomposition of the hanger model is invalid");
    if (!(params.fr_hz >= fmin_hz && params.fr_hz <= fmax_hz))
        fail_numerical("invalid-fit", "fitted resonance lies outside the measured span");
}

void ModeRecord::validate() const {
    if (!(q_int > 0.0))
        fail_validation("mode-bad-qint", mode_id + ": q_int must be positive");
    if (!(q_int_sigma >= 0.0))
        fail_validation("mode-bad-sigma", mode_id + ": q_int_sigma must be non-negative");
    if (!(frequency_hz > 0.0))
        fail_validation("mode-bad-frequency", mode_id + ": frequency must be positive");
}

} // namespace lossforge
