#pragma once

#include <Eigen/Dense>
#include <functional>

namespace lossforge {

// Small dense Levenberg-Marquardt for the handful-of-parameter fits in this
// project (phase fit, full hanger refinement, TLS saturation model).
//
// Minimizes sum r_i(x)^2. The residual vector may be any length; weights are
// the caller's business (fold them into r).

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// With trusted inverse-variance weights folded into the residual, the
// parameter covariance is the formal (J^T J)^+; for unweighted residuals it
// must be scaled by the residual variance s^2 = SSR/(m - n).
enum class CovarianceScaling { ResidualVariance, Formal };

struct LevMarOptions {
    int max_iterations = 400;
    double ftol = 1e-15;       // relative decrease of the cost
    double xtol = 1e-14;       // relative step size
    double lambda0 = 1e-3;     // initial damping
    Eigen::VectorXd x_scale;   // typical magnitudes; default max(|x0|, 1)
    CovarianceScaling covariance_scaling = CovarianceScaling::ResidualVariance;
};

struct LevMarResult {
    Eigen::VectorXd x;
    Eigen::MatrixXd covariance; // see CovarianceScaling
    double chi2 = 0.0;          // final SSR
    int iterations = 0;
    bool converged = false;
};

// jacobian may be empty; forward differences are used then.
LevMarResult levmar(const ResidualFn& residual, const Eigen::VectorXd& x0,
                    const JacobianFn& jacobian = nullptr, const LevMarOptions& options = {});

// Golden-section minimization of a 1-d function on [a, b].
double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                       double tolerance, int max_iterations = 200);

} // namespace lossforge
