#pragma once

#include <array>
#include <vector>

#include "lossforge/domain.hpp"

namespace lossforge {

// Saturable two-level-system loss:
//   1/Q_int(nbar) = 1/Q0 + A / sqrt(1 + (nbar/n_c)^beta),
// where A is the product surface-participation x TLS loss tangent, fitted as
// one amplitude. Splitting off the participation happens downstream where the
// participation matrix is known.

struct TlsParams {
    double q0_inv = 0.0;       // power-independent loss 1/Q0
    double tls_amplitude = 0.0; // A = p_surf tan(delta_TLS)
    double n_critical = 1.0;   // saturation photon number
    double beta = 1.0;         // saturation exponent
};

struct TlsFit {
    TlsParams params;
    TlsParams sigma;
    std::array<std::array<double, 4>, 4> covariance{}; // (q0_inv, A, n_c, beta) order
    bool beta_in_usual_range = true;                   // beta in (0, 2]; flagged, not rejected
};

struct TlsDataPoint {
    double nbar = 0.0;
    double q_int = 0.0;
    double q_int_sigma = 0.0;
    double nbar_sigma = 0.0; // photon-number calibration uncertainty
};

double tls_inverse_q(const TlsParams& params, double nbar);

// Weighted nonlinear least squares in 1/Q space (inverse-variance weights,
// sigma_{1/Q} = sigma_Q / Q^2). A nonzero nbar_sigma enters by the effective
// variance method: the model slope maps abscissa noise onto 1/Q. With given
// uncertainties the parameter covariance is the formal weighted-least-squares
// one; for bare points it is scaled by the residual variance. Requires >= 5
// points spanning at least two decades in nbar.
TlsFit fit_tls(const std::vector<TlsDataPoint>& points);

// Interpolated Q_int at any photon number with first-order error propagation
// through the full parameter covariance.
ValueSigma q_int_at(const TlsFit& fit, double nbar);

} // namespace lossforge
