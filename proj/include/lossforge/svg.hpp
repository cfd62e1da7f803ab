#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

namespace lossforge::svg {

// Just-enough SVG output for the optional --plot artifacts. Numeric results
// always exist as machine-readable tables; these are diagnostics.

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool line = true;
    bool markers = false;
};

struct ChartSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool logx = false;
    bool logy = false;
};

void write_chart(const std::filesystem::path& path, const ChartSpec& spec,
                 const std::vector<Series>& series);

// z[ix][iy] rendered over log-spaced axes; values are clipped to [0, z_max]
// for the color scale (used for fractional-error maps, z_max = 1).
void write_heatmap(const std::filesystem::path& path, const ChartSpec& spec,
                   const std::vector<double>& xs, const std::vector<double>& ys,
                   const std::vector<std::vector<double>>& z, double z_max);

// Complex-plane diagnostic: measured samples plus the fitted model curve.
void write_complex_plane(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::complex<double>>& data,
                         const std::vector<std::complex<double>>& model);

} // namespace lossforge::svg
