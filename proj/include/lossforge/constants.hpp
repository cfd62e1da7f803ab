#pragma once

namespace lossforge {

// CODATA 2018 values. Immutable; every formula pulls from here so that unit
// tests and golden numbers agree bit-for-bit across modules.
struct PhysicalConstants {
    double hbar; // reduced Planck constant [J s]
    double mu0;  // vacuum permeability [H/m]
};

inline constexpr PhysicalConstants codata{1.054571817e-34, 1.25663706212e-6};

inline constexpr double pi = 3.141592653589793238462643383279502884;

// All file formats and public interfaces carry frequencies in Hz; the
// conversion to angular frequency happens inside formulas, here.
inline constexpr double angular(double f_hz) { return 2.0 * pi * f_hz; }

} // namespace lossforge
