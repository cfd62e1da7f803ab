#include "lossforge/circle_fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"
#include "lossforge/levmar.hpp"

namespace lossforge {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::vector<std::complex<double>> corrected_points(const FrequencyTrace& trace, double tau_s) {
    std::vector<std::complex<double>> out(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k)
        out[k] = trace.s21(k) * std::exp(kI * (angular(trace.frequency(k)) * tau_s));
    return out;
}

// RMS radial scatter of a circle fit, normalized by the spread of the data
// (not the fitted radius: an almost-straight trace is matched arbitrarily
// well by an enormous circle, which must not score well). +inf when the
// points do not define a circle, or when the arc winds past a full turn: a
// miscorrected delay can roll the trace into a tight multi-turn spiral that
// looks perfectly circular, but a physical resonance arc never exceeds 2 pi.
double circle_misfit(const std::vector<std::complex<double>>& pts) {
    try {
        const CircleGeometry geo = algebraic_circle_fit(pts);
        std::complex<double> centroid{0.0, 0.0};
        for (const auto& z : pts) centroid += z;
        centroid /= static_cast<double>(pts.size());
        double ss = 0.0;
        double spread = 0.0;
        for (const auto& z : pts) {
            const double d = std::abs(z - geo.center) - geo.radius;
            ss += d * d;
            spread += std::norm(z - centroid);
        }
        double net_arc = 0.0;
        double prev = std::arg(pts.front() - geo.center);
        for (std::size_t k = 1; k < pts.size(); ++k) {
            const double cur = std::arg(pts[k] - geo.center);
            double d = cur - prev;
            while (d > pi) d -= 2.0 * pi;
            while (d < -pi) d += 2.0 * pi;
            net_arc += d;
            prev = cur;
        }
        if (std::abs(net_arc) >= 2.0 * pi)
            return std::numeric_limits<double>::infinity();
        return std::sqrt(ss / spread);
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

// A resonance must modulate |S21|; the electrical delay cannot (it is a pure
// phase). Compares the magnitude structure against a noise estimate from
// adjacent-sample differences.
bool has_magnitude_structure(const FrequencyTrace& trace) {
    const std::size_t n = trace.size();
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(trace.s21(k));
    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    const double med = sorted[n / 2];
    double ss = 0.0;
    for (const double m : mag) ss += (m - med) * (m - med);
    double dd = 0.0;
    for (std::size_t k = 1; k < n; ++k) dd += (mag[k] - mag[k - 1]) * (mag[k] - mag[k - 1]);
    const double noise_var = dd / (2.0 * static_cast<double>(n - 1));
    const double floor = std::pow(1e-9 * med, 2) * static_cast<double>(n);
    return ss > 9.0 * static_cast<double>(n) * noise_var + floor;
}

std::vector<double> unwrapped_phase(const std::vector<std::complex<double>>& pts) {
    std::vector<double> theta(pts.size());
    theta[0] = std::arg(pts[0]);
    for (std::size_t k = 1; k < pts.size(); ++k) {
        double d = std::arg(pts[k]) - std::arg(pts[k - 1]);
        while (d > pi) d -= 2.0 * pi;
        while (d < -pi) d += 2.0 * pi;
        theta[k] = theta[k - 1] + d;
    }
    return theta;
}

double wrap_angle(double a) {
    const double w = std::remainder(a, 2.0 * pi);
    return w <= -pi ? w + 2.0 * pi : w;
}

} // namespace

CircleGeometry algebraic_circle_fit(const std::vector<std::complex<double>>& points) {
    const std::size_t n = points.size();
    if (n < 3) fail_validation("circle-too-few-points", "need at least 3 points");

    double mx = 0.0, my = 0.0;
    for (const auto& z : points) {
        mx += z.real();
        my += z.imag();
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double mxx = 0, myy = 0, mxy = 0, mxz = 0, myz = 0, mzz = 0;
    for (const auto& p : points) {
        const double u = p.real() - mx;
        const double v = p.imag() - my;
        const double z = u * u + v * v;
        mxx += u * u;
        myy += v * v;
        mxy += u * v;
        mxz += u * z;
        myz += v * z;
        mzz += z * z;
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    mxx *= inv_n;
    myy *= inv_n;
    mxy *= inv_n;
    mxz *= inv_n;
    myz *= inv_n;
    mzz *= inv_n;

    const double mz = mxx + myy;
    const double cov_xy = mxx * myy - mxy * mxy;
    // The centered second-moment matrix is singular iff the points are
    // collinear, in which case no circle exists.
    if (!(cov_xy > 1e-24 * mz * mz))
        fail_numerical("degenerate-circle", "input points are collinear");

    const double var_z = mzz - mz * mz;
    const double a3 = 4.0 * mz;
    const double a2 = -3.0 * mz * mz - mzz;
    const double a1 = var_z * mz + 4.0 * cov_xy * mz - mxz * mxz - myz * myz;
    const double a0 =
        mxz * (mxz * myy - myz * mxy) + myz * (myz * mxx - mxz * mxy) - var_z * cov_xy;

    // Newton iteration from 0 toward the smallest positive root.
    double x = 0.0, y = a0;
    for (int iter = 0; iter < 99; ++iter) {
        const double dy = a1 + x * (2.0 * a2 + 3.0 * a3 * x);
        const double x_new = x - y / dy;
        if (!std::isfinite(x_new) || x_new == x) break;
        const double y_new = a0 + x_new * (a1 + x_new * (a2 + x_new * a3));
        if (std::abs(y_new) >= std::abs(y)) break;
        x = x_new;
        y = y_new;
    }

    const double det = x * x - x * mz + cov_xy;
    const double xc = (mxz * (myy - x) - myz * mxy) / det / 2.0;
    const double yc = (myz * (mxx - x) - mxz * mxy) / det / 2.0;
    CircleGeometry geo;
    geo.center = {xc + mx, yc + my};
    geo.radius = std::sqrt(xc * xc + yc * yc + mz);
    if (!std::isfinite(geo.radius) || !(geo.radius > 0.0) || !std::isfinite(xc) ||
        !std::isfinite(yc))
        fail_numerical("degenerate-circle", "circle fit did not produce a finite circle");
    return geo;
}

FrequencyTrace remove_delay(const FrequencyTrace& trace, double tau_s) {
    std::vector<TracePoint> pts(trace.size());
    const auto corrected = corrected_points(trace, tau_s);
    for (std::size_t k = 0; k < trace.size(); ++k)
        pts[k] = {trace.frequency(k), corrected[k]};
    return FrequencyTrace(std::move(pts), trace.drive_power_w(), trace.label());
}

double estimate_delay(const FrequencyTrace& trace) {
    if (!has_magnitude_structure(trace))
        fail_numerical("no-resonance", "no resonance signature in trace");

    // Seed from the slope of the unwrapped phase: away from resonance the
    // model phase is alpha - 2 pi f tau, and the resonance loop biases the
    // slope by at most one turn over the span.
    const auto raw = [&] {
        std::vector<std::complex<double>> p(trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) p[k] = trace.s21(k);
        return p;
    }();
    const auto theta = unwrapped_phase(raw);
    const std::size_t n = trace.size();
    double sf = 0, st = 0, sff = 0, sft = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = trace.frequency(k) - trace.frequency(0);
        sf += f;
        st += theta[k];
        sff += f * f;
        sft += f * theta[k];
    }
    const double dn = static_cast<double>(n);
    const double slope = (dn * sft - sf * st) / (dn * sff - sf * sf);
    const double tau_seed = -slope / (2.0 * pi);

    const double window = 1.5 / trace.span();
    const auto misfit_at = [&](double tau) { return circle_misfit(corrected_points(trace, tau)); };

    // Coarse scan, then golden-section refinement of every local minimum:
    // the landscape has shallow side basins and one sharp true basin whose
    // floor only reveals itself after refinement.
    const int coarse = 161;
    const double cell = 2.0 * window / (coarse - 1);
    std::vector<double> samples(coarse);
    for (int i = 0; i < coarse; ++i)
        samples[i] = misfit_at(tau_seed - window + cell * i);

    std::vector<int> candidates;
    for (int i = 0; i < coarse; ++i) {
        if (!std::isfinite(samples[i])) continue;
        const double left = i > 0 ? samples[i - 1] : std::numeric_limits<double>::infinity();
        const double right =
            i + 1 < coarse ? samples[i + 1] : std::numeric_limits<double>::infinity();
        if (samples[i] <= left && samples[i] <= right) candidates.push_back(i);
    }
    if (candidates.empty())
        fail_numerical("no-resonance", "delay-corrected trace never resembles a circle");
    std::sort(candidates.begin(), candidates.end(),
              [&](int a, int b) { return samples[a] < samples[b]; });
    if (candidates.size() > 6) candidates.resize(6);

    double tau = tau_seed;
    double best = std::numeric_limits<double>::infinity();
    for (const int i : candidates) {
        const double center = tau_seed - window + cell * i;
        const double refined =
            minimize_scalar(misfit_at, center - cell, center + cell, 1e-9 / trace.span());
        const double m = misfit_at(refined);
        if (m < best) {
            best = m;
            tau = refined;
        }
    }
    if (!std::isfinite(best))
        fail_numerical("no-resonance", "delay-corrected trace never resembles a circle");

    // Noise-floor check: a resonance must stand clear of the radial scatter.
    const auto pts = corrected_points(trace, tau);
    try {
        const CircleGeometry geo = algebraic_circle_fit(pts);
        double ss = 0.0;
        for (const auto& z : pts) {
            const double d = std::abs(z - geo.center) - geo.radius;
            ss += d * d;
        }
        const double scatter = std::sqrt(ss / static_cast<double>(pts.size()));
        if (geo.radius < 3.0 * scatter)
            fail_numerical("no-resonance", "circle radius is below the noise floor");
    } catch (const Error& e) {
        if (e.code() == "degenerate-circle")
            fail_numerical("no-resonance", "no resonance signature in trace");
        throw;
    }
    return tau;
}

PhaseFitResult phase_fit(const FrequencyTrace& delay_corrected, const CircleGeometry& geometry) {
    const std::size_t n = delay_corrected.size();
    std::vector<std::complex<double>> centered(n);
    for (std::size_t k = 0; k < n; ++k)
        centered[k] = delay_corrected.s21(k) - geometry.center;
    const auto theta = unwrapped_phase(centered);

    // theta(f) decreases monotonically through the resonance; seed fr at the
    // crossing of the midpoint phase and Q from the half-width between the
    // +-pi/2 crossings when they are inside the span.
    const double mid = 0.5 * (theta.front() + theta.back());
    auto crossing = [&](double level) -> double {
        for (std::size_t k = 1; k < n; ++k) {
            const bool between = (theta[k - 1] - level) * (theta[k] - level) <= 0.0;
            if (between) {
                const double t = (level - theta[k - 1]) / (theta[k] - theta[k - 1]);
                return delay_corrected.frequency(k - 1) +
                       t * (delay_corrected.frequency(k) - delay_corrected.frequency(k - 1));
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    double fr0 = crossing(mid);
    if (!std::isfinite(fr0)) fr0 = 0.5 * (delay_corrected.min_frequency() + delay_corrected.max_frequency());
    const double f_lo = crossing(mid + pi / 2.0);
    const double f_hi = crossing(mid - pi / 2.0);
    double q0 = fr0 / delay_corrected.span();
    if (std::isfinite(f_lo) && std::isfinite(f_hi) && f_hi > f_lo) q0 = fr0 / (f_hi - f_lo);

    Eigen::VectorXd x0(3);
    x0 << fr0, q0, mid;
    const auto residual = [&](const Eigen::VectorXd& x) {
        Eigen::VectorXd r(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double u = 2.0 * x[1] * (1.0 - delay_corrected.frequency(k) / x[0]);
            r[k] = x[2] + 2.0 * std::atan(u) - theta[k];
        }
        return r;
    };
    const auto jacobian = [&](const Eigen::VectorXd& x) {
        Eigen::MatrixXd jac(n, 3);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = delay_corrected.frequency(k);
            const double u = 2.0 * x[1] * (1.0 - f / x[0]);
            const double g = 2.0 / (1.0 + u * u);
            jac(k, 0) = g * 2.0 * x[1] * f / (x[0] * x[0]);
            jac(k, 1) = g * 2.0 * (1.0 - f / x[0]);
            jac(k, 2) = 1.0;
        }
        return jac;
    };
    LevMarOptions opts;
    opts.x_scale = Eigen::Vector3d(fr0, std::max(q0, 1.0), 1.0);
    const LevMarResult res = levmar(residual, x0, jacobian, opts);
    if (!res.converged || !(res.x[1] > 0.0) || !std::isfinite(res.x[0]))
        fail_numerical("non-convergence",
                       "phase fit did not converge (rms residual " +
                           std::to_string(std::sqrt(res.chi2 / static_cast<double>(n))) + " rad)");
    return {res.x[0], res.x[1], res.x[2]};
}

namespace {

// Analytic Jacobian of the full hanger model, complex residuals stacked as
// [Re; Im]. Parameter order: fr, Q_L, |Qc|, phi, a, alpha', tau, where
// alpha' = alpha - 2 pi f_ref tau. The raw (alpha, tau) pair is nearly
// degenerate (a delay shift is almost a constant phase over a narrow span);
// referencing the delay phase to the span center makes the two columns
// orthogonal and the refinement well conditioned.
struct HangerModel {
    const FrequencyTrace& trace;
    double f_ref;

    std::complex<double> eval(const Eigen::VectorXd& x, double f) const {
        const std::complex<double> pre =
            x[4] * std::exp(kI * (x[5] - 2.0 * pi * (f - f_ref) * x[6]));
        const std::complex<double> lor = 1.0 / (1.0 + kI * (2.0 * x[1] * (f / x[0] - 1.0)));
        return pre * (1.0 - (x[1] / x[2]) * std::exp(kI * x[3]) * lor);
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const std::size_t n = trace.size();
        Eigen::VectorXd r(2 * n);
        for (std::size_t k = 0; k < n; ++k) {
            const std::complex<double> d = eval(x, trace.frequency(k)) - trace.s21(k);
            r[2 * k] = d.real();
            r[2 * k + 1] = d.imag();
        }
        return r;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const {
        const std::size_t n = trace.size();
        Eigen::MatrixXd jac(2 * n, 7);
        for (std::size_t k = 0; k < n; ++k) {
            const double f = trace.frequency(k);
            const std::complex<double> pre =
                x[4] * std::exp(kI * (x[5] - 2.0 * pi * (f - f_ref) * x[6]));
            const std::complex<double> lor =
                1.0 / (1.0 + kI * (2.0 * x[1] * (f / x[0] - 1.0)));
            const std::complex<double> tphi = (x[1] / x[2]) * std::exp(kI * x[3]);
            const std::complex<double> model = pre * (1.0 - tphi * lor);

            const std::complex<double> d_fr =
                pre * (-tphi * lor * lor * kI * 2.0 * x[1] * f / (x[0] * x[0]));
            const std::complex<double> d_ql =
                pre * (-(std::exp(kI * x[3]) / x[2]) * lor +
                       tphi * lor * lor * kI * 2.0 * (f / x[0] - 1.0));
            const std::complex<double> d_qc = pre * (tphi * lor / x[2]);
            const std::complex<double> d_phi = pre * (-kI * tphi * lor);
            const std::complex<double> d_a = model / x[4];
            const std::complex<double> d_alpha = kI * model;
            const std::complex<double> d_tau = -kI * 2.0 * pi * (f - f_ref) * model;

            const std::complex<double> cols[7] = {d_fr, d_ql, d_qc, d_phi, d_a, d_alpha, d_tau};
            for (int c = 0; c < 7; ++c) {
                jac(2 * k, c) = cols[c].real();
                jac(2 * k + 1, c) = cols[c].imag();
            }
        }
        return jac;
    }

    // Back to the public convention alpha = alpha' + 2 pi f_ref tau.
    HangerParams unpack(const Eigen::VectorXd& x) const {
        HangerParams p;
        p.fr_hz = x[0];
        p.q_loaded = x[1];
        p.q_coupling_mag = x[2];
        p.phi = x[3];
        p.amplitude_a = x[4];
        p.alpha = x[5] + 2.0 * pi * f_ref * x[6];
        p.tau_s = x[6];
        return p;
    }
};

} // namespace

HangerFit fit_hanger(const FrequencyTrace& trace) {
    const double tau0 = estimate_delay(trace);
    const FrequencyTrace corrected = remove_delay(trace, tau0);
    std::vector<std::complex<double>> pts(corrected.size());
    for (std::size_t k = 0; k < corrected.size(); ++k) pts[k] = corrected.s21(k);
    const CircleGeometry geo = algebraic_circle_fit(pts);
    const PhaseFitResult ph = phase_fit(corrected, geo);

    // The off-resonant point sits diametrically opposite the resonance point
    // and carries the global prefactor a e^{i alpha}.
    const std::complex<double> p_off = geo.center - geo.radius * std::exp(kI * ph.theta0);
    const double a0 = std::abs(p_off);
    const double alpha0 = std::arg(p_off);
    const double phi0 = std::arg(1.0 - geo.center / p_off);
    const double qc0 = ph.q_loaded * a0 / (2.0 * geo.radius);

    const double f_ref = 0.5 * (trace.min_frequency() + trace.max_frequency());
    Eigen::VectorXd x0(7);
    x0 << ph.fr_hz, ph.q_loaded, qc0, phi0, a0,
        wrap_angle(alpha0 - 2.0 * pi * f_ref * tau0), tau0;
    HangerModel model{trace, f_ref};
    LevMarOptions opts;
    Eigen::VectorXd scale(7);
    scale << ph.fr_hz, ph.q_loaded, qc0, 1.0, a0, 1.0, std::max(std::abs(tau0), 0.1 / trace.span());
    opts.x_scale = scale;
    const LevMarResult res = levmar([&](const Eigen::VectorXd& x) { return model.residual(x); },
                                    x0,
                                    [&](const Eigen::VectorXd& x) { return model.jacobian(x); },
                                    opts);
    if (!res.converged)
        fail_numerical("non-convergence", "hanger refinement did not converge");

    HangerFit fit;
    fit.params = model.unpack(res.x);
    // Canonical branch: a > 0, angles in (-pi, pi].
    if (fit.params.amplitude_a < 0.0) {
        fit.params.amplitude_a = -fit.params.amplitude_a;
        fit.params.alpha += pi;
    }
    if (fit.params.q_loaded < 0.0 || fit.params.q_coupling_mag < 0.0)
        fail_numerical("non-convergence", "refinement produced a negative quality factor");
    fit.params.alpha = wrap_angle(fit.params.alpha);
    fit.params.phi = wrap_angle(fit.params.phi);

    fit.sigma.fr_hz = std::sqrt(std::max(0.0, res.covariance(0, 0)));
    fit.sigma.q_loaded = std::sqrt(std::max(0.0, res.covariance(1, 1)));
    fit.sigma.q_coupling_mag = std::sqrt(std::max(0.0, res.covariance(2, 2)));
    fit.sigma.phi = std::sqrt(std::max(0.0, res.covariance(3, 3)));
    fit.sigma.amplitude_a = std::sqrt(std::max(0.0, res.covariance(4, 4)));
    // alpha = alpha' + 2 pi f_ref tau: propagate the (alpha', tau) block.
    const double c_at = 2.0 * pi * f_ref;
    fit.sigma.alpha = std::sqrt(std::max(
        0.0, res.covariance(5, 5) + c_at * c_at * res.covariance(6, 6) +
                 2.0 * c_at * res.covariance(5, 6)));
    fit.sigma.tau_s = std::sqrt(std::max(0.0, res.covariance(6, 6)));

    fit.validate(trace.min_frequency(), trace.max_frequency());
    return fit;
}

ValueSigma internal_q(const HangerFit& fit) {
    const auto& p = fit.params;
    const double kappa = 1.0 / p.q_loaded - std::cos(p.phi) / p.q_coupling_mag;
    if (!(kappa > 0.0))
        fail_numerical("nonphysical-internal-loss",
                       "coupling loss exceeds the loaded loss; measurement inconsistent");
    const double q_int = 1.0 / kappa;

    const double d_ql = fit.sigma.q_loaded / (p.q_loaded * p.q_loaded);
    const double d_qc =
        std::cos(p.phi) * fit.sigma.q_coupling_mag / (p.q_coupling_mag * p.q_coupling_mag);
    const double d_phi = std::sin(p.phi) * fit.sigma.phi / p.q_coupling_mag;
    const double sigma_kappa = std::sqrt(d_ql * d_ql + d_qc * d_qc + d_phi * d_phi);
    return {q_int, sigma_kappa * q_int * q_int};
}

} // namespace lossforge
