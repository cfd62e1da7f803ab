#include "lossforge/sensitivity.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "lossforge/errors.hpp"

namespace lossforge {

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out(n);
    const double l0 = std::log10(lo);
    const double l1 = std::log10(hi);
    for (int i = 0; i < n; ++i)
        out[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / (n - 1));
    return out;
}

} // namespace

double SensitivityMap::floor_x() const {
    for (std::size_t ix = 0; ix < x_values.size(); ++ix)
        for (std::size_t iy = 0; iy < y_values.size(); ++iy)
            if (fractional_error_x[ix][iy] < 1.0) return x_values[ix];
    return std::numeric_limits<double>::infinity();
}

double SensitivityMap::floor_y() const {
    for (std::size_t iy = 0; iy < y_values.size(); ++iy)
        for (std::size_t ix = 0; ix < x_values.size(); ++ix)
            if (fractional_error_y[ix][iy] < 1.0) return y_values[iy];
    return std::numeric_limits<double>::infinity();
}

SensitivityMap sensitivity_map(const ParticipationMatrix& matrix,
                               const std::map<std::string, ChannelLoss>& fixed,
                               const SensitivityGrid& grid, double meas_fractional_sigma) {
    const auto ix_opt = matrix.channel_index(grid.channel_x);
    const auto iy_opt = matrix.channel_index(grid.channel_y);
    if (!ix_opt || !iy_opt || grid.channel_x == grid.channel_y)
        fail_validation("sensitivity-bad-axes",
                        "axes must name two distinct channels of the matrix");
    if (!(grid.x_min > 0.0) || !(grid.x_max > grid.x_min) || !(grid.y_min > 0.0) ||
        !(grid.y_max > grid.y_min) || grid.nx < 2 || grid.ny < 2)
        fail_validation("sensitivity-degenerate-grid",
                        "grids must be positive ranges with at least 2 points per axis");
    if (!(meas_fractional_sigma > 0.0))
        fail_validation("sensitivity-bad-sigma", "measurement fractional error must be positive");
    for (const auto& c : matrix.channels()) {
        if (c.id == grid.channel_x || c.id == grid.channel_y) continue;
        if (!fixed.count(c.id))
            fail_validation("channel-mismatch",
                            "non-axis channel '" + c.id + "' needs a fixed loss factor");
    }
    if (matrix.mode_count() < 2)
        fail_validation("mode-mismatch", "need at least two modes to separate two channels");

    const std::size_t cx = *ix_opt;
    const std::size_t cy = *iy_opt;
    const std::size_t n_modes = matrix.mode_count();

    SensitivityMap map;
    map.grid = grid;
    map.meas_fractional_sigma = meas_fractional_sigma;
    map.x_values = log_grid(grid.x_min, grid.x_max, grid.nx);
    map.y_values = log_grid(grid.y_min, grid.y_max, grid.ny);
    map.fractional_error_x.assign(grid.nx, std::vector<double>(grid.ny, 0.0));
    map.fractional_error_y.assign(grid.nx, std::vector<double>(grid.ny, 0.0));

    // Per-mode fixed contribution to kappa; axis contributions add per point.
    std::vector<double> kappa_fixed(n_modes, 0.0);
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            if (i == cx || i == cy) continue;
            kappa_fixed[j] += matrix.value(j, i) *
                              channel_loss_factor(matrix.channels()[i],
                                                  fixed.at(matrix.channels()[i].id), f_j);
        }
    }

    for (int a = 0; a < grid.nx; ++a) {
        for (int b = 0; b < grid.ny; ++b) {
            const double gx = map.x_values[a];
            const double gy = map.y_values[b];
            Eigen::MatrixXd p_w(n_modes, 2);
            for (std::size_t j = 0; j < n_modes; ++j) {
                const double kappa =
                    kappa_fixed[j] + matrix.value(j, cx) * gx + matrix.value(j, cy) * gy;
                const double sigma = meas_fractional_sigma * kappa;
                p_w(j, 0) = matrix.value(j, cx) / sigma;
                p_w(j, 1) = matrix.value(j, cy) / sigma;
            }
            const Eigen::Matrix2d jtj = p_w.transpose() * p_w;
            const double det = jtj(0, 0) * jtj(1, 1) - jtj(0, 1) * jtj(1, 0);
            if (!(det > 0.0)) {
                map.fractional_error_x[a][b] = std::numeric_limits<double>::infinity();
                map.fractional_error_y[a][b] = std::numeric_limits<double>::infinity();
                continue;
            }
            map.fractional_error_x[a][b] = std::sqrt(jtj(1, 1) / det) / gx;
            map.fractional_error_y[a][b] = std::sqrt(jtj(0, 0) / det) / gy;
        }
    }
    return map;
}

} // namespace lossforge
