#include "lossforge/photon.hpp"

#include <cmath>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"

namespace lossforge {

void LineBudget::validate() const {
    if (attenuation_table.empty())
        fail_validation("budget-empty", "attenuation table must have at least one entry");
    for (std::size_t i = 0; i < attenuation_table.size(); ++i) {
        const auto& [hz, db] = attenuation_table[i];
        if (!(db >= 0.0))
            fail_validation("budget-negative-attenuation", "attenuation must be >= 0 dB");
        if (!(hz > 0.0)) fail_validation("budget-bad-frequency", "table frequencies must be positive");
        if (i > 0 && !(hz > attenuation_table[i - 1].first))
            fail_validation("budget-not-increasing", "table frequencies must be increasing");
    }
    if (!(uncertainty_db >= 0.0))
        fail_validation("budget-bad-uncertainty", "uncertainty must be >= 0 dB");
}

double LineBudget::attenuation_db_at(double f_hz) const {
    validate();
    if (f_hz < attenuation_table.front().first || f_hz > attenuation_table.back().first)
        fail_validation("attenuation-unknown",
                        "frequency outside the characterized attenuation table");
    if (attenuation_table.size() == 1) return attenuation_table.front().second;
    for (std::size_t i = 1; i < attenuation_table.size(); ++i) {
        const auto& [f1, a1] = attenuation_table[i - 1];
        const auto& [f2, a2] = attenuation_table[i];
        if (f_hz <= f2) {
            const double t = (f_hz - f1) / (f2 - f1);
            return a1 + t * (a2 - a1);
        }
    }
    return attenuation_table.back().second;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

ValueSigma power_at_device(const LineBudget& budget, double f_hz) {
    const double attenuation = budget.attenuation_db_at(f_hz);
    const double p = dbm_to_watts(budget.vna_power_dbm - attenuation);
    const double sigma = p * (std::pow(10.0, budget.uncertainty_db / 10.0) - 1.0);
    return {p, sigma};
}

double mean_photon_number_asymmetric(double p_in_w, double fr_hz, double f_drive_hz,
                                     double q_loaded, double q_plus) {
    if (!(q_loaded > 0.0) || !(q_plus > 0.0))
        fail_validation("photon-bad-q", "quality factors must be positive");
    if (!(p_in_w >= 0.0)) fail_validation("photon-bad-power", "drive power must be >= 0");
    const double w_r = angular(fr_hz);
    const double w = angular(f_drive_hz);
    const double detuning = 2.0 * q_loaded * (w / w_r - 1.0);
    const double lorentzian =
        (4.0 * q_loaded * q_loaded / (w_r * q_plus)) / (1.0 + detuning * detuning);
    return lorentzian * p_in_w / (codata.hbar * w);
}

double mean_photon_number(double p_in_w, double fr_hz, double f_drive_hz, double q_loaded,
                          double q_coupling) {
    return mean_photon_number_asymmetric(p_in_w, fr_hz, f_drive_hz, q_loaded, 2.0 * q_coupling);
}

double qc_from_rabi(double p_in_w, double rabi_rate_rad_per_s) {
    if (!(rabi_rate_rad_per_s > 0.0))
        fail_validation("photon-bad-rabi", "Rabi rate must be positive");
    return 2.0 * p_in_w / (codata.hbar * rabi_rate_rad_per_s * rabi_rate_rad_per_s);
}

} // namespace lossforge
