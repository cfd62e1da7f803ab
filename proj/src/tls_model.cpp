#include "lossforge/tls_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lossforge/errors.hpp"
#include "lossforge/levmar.hpp"

namespace lossforge {

double tls_inverse_q(const TlsParams& p, double nbar) {
    const double saturation = std::sqrt(1.0 + std::pow(nbar / p.n_critical, p.beta));
    return p.q0_inv + p.tls_amplitude / saturation;
}

namespace {

// Gradient of 1/Q with respect to (q0_inv, A, n_c, beta).
std::array<double, 4> tls_gradient(const TlsParams& p, double nbar) {
    const double t = std::pow(nbar / p.n_critical, p.beta);
    const double s = std::sqrt(1.0 + t);
    const double s3 = s * s * s;
    std::array<double, 4> g{};
    g[0] = 1.0;
    g[1] = 1.0 / s;
    g[2] = p.tls_amplitude * p.beta * t / (2.0 * s3 * p.n_critical);
    g[3] = (t > 0.0) ? -p.tls_amplitude * t * std::log(nbar / p.n_critical) / (2.0 * s3) : 0.0;
    return g;
}

} // namespace

TlsFit fit_tls(const std::vector<TlsDataPoint>& points) {
    if (points.size() < 5)
        fail_validation("insufficient-power-range",
                        "need at least 5 (nbar, Q) points, got " + std::to_string(points.size()));
    double n_min = std::numeric_limits<double>::infinity();
    double n_max = 0.0;
    for (const auto& p : points) {
        if (!(p.nbar > 0.0) || !(p.q_int > 0.0) || !(p.q_int_sigma >= 0.0))
            fail_validation("tls-bad-point", "nbar and Q must be positive, sigma non-negative");
        n_min = std::min(n_min, p.nbar);
        n_max = std::max(n_max, p.nbar);
    }
    if (n_max / n_min < 100.0)
        fail_validation("insufficient-power-range",
                        "power sweep must span at least two decades in photon number");

    // Work in 1/Q space where the model is linear in the amplitude.
    const std::size_t n = points.size();
    std::vector<double> y(n), sigma_y(n), w(n);
    double sigma_floor = std::numeric_limits<double>::infinity();
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = 1.0 / points[i].q_int;
        const double s = points[i].q_int_sigma / (points[i].q_int * points[i].q_int);
        sigma_y[i] = s;
        if (s > 0.0) {
            all_zero = false;
            sigma_floor = std::min(sigma_floor, s);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (all_zero)
            w[i] = 1.0;
        else
            w[i] = 1.0 / std::max(sigma_y[i], sigma_floor);
    }

    // Initial guesses: saturated loss from the highest powers, amplitude from
    // the low-high difference, n_c at the geometric mid-decade, beta = 1.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return points[a].nbar < points[b].nbar; });
    const double q0_inv0 =
        (y[order[n - 1]] + y[order[n - 2]] + y[order[n - 3]]) / 3.0;
    const double amp0 = std::max(y[order[0]] - y[order[n - 1]], 0.01 * q0_inv0);
    const double nc0 = std::sqrt(n_min * n_max);

    // Parameters fitted as (q0_inv, A, log n_c, beta); the log keeps n_c
    // positive and conditions the decades-wide search.
    Eigen::VectorXd x0(4);
    x0 << q0_inv0, amp0, std::log(nc0), 1.0;

    const auto unpack = [](const Eigen::VectorXd& x) {
        TlsParams p;
        p.q0_inv = x[0];
        p.tls_amplitude = x[1];
        p.n_critical = std::exp(x[2]);
        p.beta = x[3];
        return p;
    };
    const auto residual = [&](const Eigen::VectorXd& x) {
        const TlsParams p = unpack(x);
        Eigen::VectorXd r(n);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = w[i] * (tls_inverse_q(p, points[i].nbar) - y[i]);
        return r;
    };
    const auto jacobian = [&](const Eigen::VectorXd& x) {
        const TlsParams p = unpack(x);
        Eigen::MatrixXd jac(n, 4);
        for (std::size_t i = 0; i < n; ++i) {
            const auto g = tls_gradient(p, points[i].nbar);
            jac(i, 0) = w[i] * g[0];
            jac(i, 1) = w[i] * g[1];
            jac(i, 2) = w[i] * g[2] * p.n_critical; // d/d(log n_c)
            jac(i, 3) = w[i] * g[3];
        }
        return jac;
    };

    LevMarOptions opts;
    Eigen::VectorXd scale(4);
    scale << q0_inv0, std::max(amp0, 0.1 * q0_inv0), 1.0, 1.0;
    opts.x_scale = scale;
    opts.covariance_scaling =
        all_zero ? CovarianceScaling::ResidualVariance : CovarianceScaling::Formal;
    LevMarResult res = levmar(residual, x0, jacobian, opts);
    if (!res.converged)
        fail_numerical("non-convergence",
                       "TLS fit did not converge (weighted rms residual " +
                           std::to_string(std::sqrt(res.chi2 / static_cast<double>(n))) + ")");

    // Effective-variance pass: fold the photon-number uncertainty through the
    // fitted model slope and re-solve with the widened weights.
    bool any_nbar_sigma = false;
    for (const auto& p : points) any_nbar_sigma = any_nbar_sigma || p.nbar_sigma > 0.0;
    if (any_nbar_sigma && !all_zero) {
        const TlsParams pass1 = unpack(res.x);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = std::pow(points[i].nbar / pass1.n_critical, pass1.beta);
            const double s = std::sqrt(1.0 + t);
            const double slope = points[i].nbar > 0.0
                                     ? pass1.tls_amplitude * pass1.beta * t /
                                           (2.0 * s * s * s * points[i].nbar)
                                     : 0.0;
            const double var_eff = sigma_y[i] * sigma_y[i] +
                                   std::pow(slope * points[i].nbar_sigma, 2);
            w[i] = 1.0 / std::max(std::sqrt(var_eff), sigma_floor);
        }
        res = levmar(residual, res.x, jacobian, opts);
        if (!res.converged)
            fail_numerical("non-convergence", "TLS fit did not converge (effective-variance pass)");
    }

    TlsFit fit;
    fit.params = unpack(res.x);
    if (!(fit.params.q0_inv > 0.0))
        fail_numerical("non-convergence", "TLS fit produced non-positive saturated loss");
    if (fit.params.tls_amplitude < 0.0) fit.params.tls_amplitude = 0.0;
    fit.beta_in_usual_range = fit.params.beta > 0.0 && fit.params.beta <= 2.0;

    // Covariance back in (q0_inv, A, n_c, beta) coordinates: the log-n_c
    // row/column scales by n_c.
    Eigen::Matrix4d cov = res.covariance;
    cov.row(2) *= fit.params.n_critical;
    cov.col(2) *= fit.params.n_critical;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) fit.covariance[i][j] = cov(i, j);
    fit.sigma.q0_inv = std::sqrt(std::max(0.0, cov(0, 0)));
    fit.sigma.tls_amplitude = std::sqrt(std::max(0.0, cov(1, 1)));
    fit.sigma.n_critical = std::sqrt(std::max(0.0, cov(2, 2)));
    fit.sigma.beta = std::sqrt(std::max(0.0, cov(3, 3)));
    return fit;
}

ValueSigma q_int_at(const TlsFit& fit, double nbar) {
    if (!(nbar > 0.0)) fail_validation("tls-bad-nbar", "photon number must be positive");
    const double inv_q = tls_inverse_q(fit.params, nbar);
    const auto g = tls_gradient(fit.params, nbar);
    double var = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) var += g[i] * fit.covariance[i][j] * g[j];
    const double q = 1.0 / inv_q;
    const double sigma = std::sqrt(std::max(0.0, var)) * q * q;
    return {q, sigma};
}

} // namespace lossforge
