#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lossforge {

struct TracePoint {
    double frequency_hz = 0.0;
    std::complex<double> s21{0.0, 0.0};
};

// A scalar with a one-standard-deviation uncertainty.
struct ValueSigma {
    double value = 0.0;
    double sigma = 0.0;
};

// One measured S21 sweep. Immutable after construction; construction
// validates so downstream code never re-checks ordering or finiteness.
class FrequencyTrace {
public:
    // Requires strictly increasing frequencies, at least 7 points (the hanger
    // model has 7 real parameters) and finite, nonzero S21 everywhere.
    explicit FrequencyTrace(std::vector<TracePoint> points,
                            std::optional<double> drive_power_w = std::nullopt,
                            std::string label = {});

    const std::vector<TracePoint>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    double frequency(std::size_t i) const { return points_[i].frequency_hz; }
    const std::complex<double>& s21(std::size_t i) const { return points_[i].s21; }

    double min_frequency() const { return points_.front().frequency_hz; }
    double max_frequency() const { return points_.back().frequency_hz; }
    double span() const { return max_frequency() - min_frequency(); }

    // Drive power at the device in watts, if calibrated (see photon module).
    const std::optional<double>& drive_power_w() const { return drive_power_w_; }
    const std::string& label() const { return label_; }

private:
    std::vector<TracePoint> points_;
    std::optional<double> drive_power_w_;
    std::string label_;
};

// The 7 real parameters of the asymmetric hanger response
//   S21(f) = a e^{i alpha} e^{-i 2 pi f tau}
//            [1 - (Q_L/|Q_c|) e^{i phi} / (1 + 2 i Q_L (f/fr - 1))].
struct HangerParams {
    double fr_hz = 0.0;          // resonance frequency
    double q_loaded = 0.0;       // loaded quality factor
    double q_coupling_mag = 0.0; // |Q_c|
    double phi = 0.0;            // coupling asymmetry angle [rad]
    double amplitude_a = 1.0;    // global attenuation
    double alpha = 0.0;          // global phase offset [rad]
    double tau_s = 0.0;          // electrical delay [s]
};

// Evaluate the hanger model at one frequency.
std::complex<double> hanger_s21(const HangerParams& p, double f_hz);

struct HangerFit {
    HangerParams params;
    HangerParams sigma; // per-parameter standard deviations, same field layout

    // Throws unless q_loaded > 0, |Q_c| > 0, |phi| < pi/2 and fr lies inside
    // [fmin, fmax]. |phi| >= pi/2 invalidates the Q_int decomposition.
    void validate(double fmin_hz, double fmax_hz) const;
};

// A fitted mode: internal quality factor at (optionally) a known photon number.
struct ModeRecord {
    std::string mode_id;
    double frequency_hz = 0.0;
    double q_int = 0.0;
    double q_int_sigma = 0.0;
    std::optional<double> photon_number;

    void validate() const;
};

} // namespace lossforge
