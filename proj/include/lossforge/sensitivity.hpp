#pragma once

#include <map>
#include <string>
#include <vector>

#include "lossforge/participation.hpp"

namespace lossforge {

// Measurement-sensitivity map of a loss characterization design: the smallest
// loss factors whose extraction would carry a fractional error below one,
// given a fractional measurement error on every mode's internal loss.

struct SensitivityGrid {
    std::string channel_x;
    std::string channel_y;
    double x_min = 0.0, x_max = 0.0; // log-spaced grid bounds, inclusive
    double y_min = 0.0, y_max = 0.0;
    int nx = 64, ny = 64;
};

struct SensitivityMap {
    SensitivityGrid grid;
    std::vector<double> x_values;
    std::vector<double> y_values;
    // sigma_Gamma / Gamma of each axis channel at grid point (ix, iy).
    std::vector<std::vector<double>> fractional_error_x; // [ix][iy]
    std::vector<std::vector<double>> fractional_error_y;
    double meas_fractional_sigma = 0.0;

    bool resolvable(std::size_t ix, std::size_t iy) const {
        return fractional_error_x[ix][iy] < 1.0 && fractional_error_y[ix][iy] < 1.0;
    }
    // Smallest axis value that is resolvable anywhere on the map (+inf when
    // the channel is never resolved).
    double floor_x() const;
    double floor_y() const;
};

// At every grid point: forward-compute kappa_j from the two axis factors plus
// the fixed channels, take sigma_kappa = meas_fractional_sigma * kappa, and
// evaluate the weighted-least-squares covariance of the two free channels.
// `fixed` must cover every non-axis channel of the matrix.
SensitivityMap sensitivity_map(const ParticipationMatrix& matrix,
                               const std::map<std::string, ChannelLoss>& fixed,
                               const SensitivityGrid& grid,
                               double meas_fractional_sigma = 0.10);

} // namespace lossforge
