#include "lossforge/levmar.hpp"

#include <cmath>
#include <limits>

#include "lossforge/errors.hpp"

namespace lossforge {

namespace {

Eigen::MatrixXd forward_difference_jacobian(const ResidualFn& residual, const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& r0,
                                            const Eigen::VectorXd& scale) {
    const auto n = x.size();
    const auto m = r0.size();
    Eigen::MatrixXd jac(m, n);
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    for (Eigen::Index j = 0; j < n; ++j) {
        const double h = root_eps * std::max(std::abs(x[j]), scale[j]);
        Eigen::VectorXd xh = x;
        xh[j] += h;
        jac.col(j) = (residual(xh) - r0) / h;
    }
    return jac;
}

} // namespace

LevMarResult levmar(const ResidualFn& residual, const Eigen::VectorXd& x0,
                    const JacobianFn& jacobian, const LevMarOptions& options) {
    const auto n = x0.size();
    Eigen::VectorXd scale = options.x_scale;
    if (scale.size() != n) {
        scale = x0.cwiseAbs().cwiseMax(1.0);
    }

    LevMarResult result;
    result.x = x0;
    Eigen::VectorXd r = residual(result.x);
    const auto m = r.size();
    double chi2 = r.squaredNorm();
    if (!std::isfinite(chi2))
        fail_numerical("non-convergence", "residuals not finite at the initial guess");

    double lambda = options.lambda0;
    Eigen::MatrixXd jac;
    bool jac_fresh = false;
    int slow_steps = 0;

    int iter = 0;
    for (; iter < options.max_iterations; ++iter) {
        if (!jac_fresh) {
            jac = jacobian ? jacobian(result.x)
                           : forward_difference_jacobian(residual, result.x, r, scale);
            jac_fresh = true;
        }
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd jtr = jac.transpose() * r;

        // Scaled-gradient stationarity test: the directional derivative over
        // a typical parameter change is negligible against the cost.
        const double gradient_scale = (jtr.cwiseAbs().cwiseProduct(scale)).maxCoeff();
        if (gradient_scale <= 1e-12 * std::max(chi2, 1e-300)) {
            result.converged = true;
            break;
        }

        // Marquardt scaling; floor the diagonal so all-zero columns (a
        // parameter the data does not constrain) stay harmlessly damped.
        Eigen::VectorXd diag = jtj.diagonal();
        const double diag_floor = 1e-30 * std::max(1.0, diag.maxCoeff());
        diag = diag.cwiseMax(diag_floor);

        bool stepped = false;
        for (int attempt = 0; attempt < 20; ++attempt) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * diag;
            Eigen::VectorXd delta = a.ldlt().solve(-jtr);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd x_new = result.x + delta;
            Eigen::VectorXd r_new = residual(x_new);
            const double chi2_new = r_new.squaredNorm();
            if (std::isfinite(chi2_new) && chi2_new < chi2) {
                const double rel_step =
                    (delta.cwiseAbs().cwiseQuotient(result.x.cwiseAbs().cwiseMax(scale)))
                        .maxCoeff();
                const double rel_drop = (chi2 - chi2_new) / std::max(chi2, 1e-300);
                result.x = x_new;
                r = r_new;
                chi2 = chi2_new;
                lambda = std::max(lambda * 0.3, 1e-14);
                jac_fresh = false;
                stepped = true;
                if (rel_drop < options.ftol || rel_step < options.xtol) {
                    result.converged = true;
                } else if (rel_drop < 1e-10) {
                    // Progress has stalled to rounding-level gains.
                    if (++slow_steps >= 4) result.converged = true;
                } else {
                    slow_steps = 0;
                }
                break;
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (!stepped) {
            // No downhill step found: we are at (numerical) convergence.
            result.converged = true;
            break;
        }
        if (result.converged) break;
    }
    result.iterations = iter + 1;
    result.chi2 = chi2;

    // Parameter covariance from the curvature at the solution, evaluated in
    // scaled variables so the pseudo-inverse tolerance is meaningful across
    // parameters of wildly different magnitudes.
    if (!jac_fresh) {
        jac = jacobian ? jacobian(result.x)
                       : forward_difference_jacobian(residual, result.x, r, scale);
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::MatrixXd jtj_scaled =
        scale.asDiagonal() * jtj * scale.asDiagonal();
    const double dof = static_cast<double>(m) - static_cast<double>(n);
    const double s2 = options.covariance_scaling == CovarianceScaling::Formal
                          ? 1.0
                          : (dof > 0 ? chi2 / dof : 0.0);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jtj_scaled,
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double tol = 1e-14 * svd.singularValues().maxCoeff();
    Eigen::VectorXd inv_sv = svd.singularValues();
    for (Eigen::Index i = 0; i < inv_sv.size(); ++i)
        inv_sv[i] = inv_sv[i] > tol ? 1.0 / inv_sv[i] : 0.0;
    const Eigen::MatrixXd pinv_scaled =
        svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
    result.covariance =
        s2 * (scale.asDiagonal() * pinv_scaled * scale.asDiagonal());
    return result;
}

double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double tolerance, int max_iterations) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int i = 0; i < max_iterations && (b - a) > tolerance; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace lossforge
