#pragma once

#include <utility>
#include <vector>

#include "lossforge/domain.hpp"

namespace lossforge {

// Input-line power budget: VNA output power plus the frequency-dependent line
// attenuation measured at room temperature, taken as cryogenic truth with a
// systematic dB uncertainty.
struct LineBudget {
    double vna_power_dbm = 0.0;
    std::vector<std::pair<double, double>> attenuation_table; // (Hz, dB), Hz increasing
    double uncertainty_db = 0.0;

    void validate() const;
    // Linear interpolation in dB; throws "attenuation-unknown" outside the table.
    double attenuation_db_at(double f_hz) const;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

// Power arriving at the device, with the sigma implied by the dB uncertainty
// (upward spread, sigma = P (10^{u/10} - 1)).
ValueSigma power_at_device(const LineBudget& budget, double f_hz);

// Average circulating photon number for a hanger-coupled resonator driven at
// f_drive, assuming symmetric coupling (Q_+ = 2 Q_c). On resonance this is
// nbar = (2/hbar w_r^2) (Q_L^2/Q_c) P_in.
double mean_photon_number(double p_in_w, double fr_hz, double f_drive_hz, double q_loaded,
                          double q_coupling);

// General single-port form with an explicit right-propagating coupling Q_+.
double mean_photon_number_asymmetric(double p_in_w, double fr_hz, double f_drive_hz,
                                     double q_loaded, double q_plus);

// Coupling quality factor from an in-situ qubit Rabi-rate calibration,
// Q_c = 2 P_in / (hbar Omega^2).
double qc_from_rabi(double p_in_w, double rabi_rate_rad_per_s);

} // namespace lossforge
