#include <cmath>
#include <random>

#include "doctest.h"
#include "lossforge/errors.hpp"
#include "lossforge/tls_model.hpp"

using namespace lossforge;

namespace {

std::vector<TlsDataPoint> sample_curve(const TlsParams& truth, int n, double n_lo, double n_hi,
                                       double rel_sigma = 0.0, std::uint64_t seed = 0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<TlsDataPoint> pts;
    for (int i = 0; i < n; ++i) {
        const double nbar =
            std::pow(10.0, std::log10(n_lo) +
                               (std::log10(n_hi) - std::log10(n_lo)) * i / (n - 1.0));
        double q = 1.0 / tls_inverse_q(truth, nbar);
        const double sigma = rel_sigma * q;
        if (rel_sigma > 0.0) q += sigma * gauss(rng);
        pts.push_back({nbar, q, sigma});
    }
    return pts;
}

} // namespace

TEST_CASE("noiseless roundtrip recovers all four parameters within 0.1%") {
    TlsParams truth{3e-8, 4e-7, 50.0, 0.8};
    const auto fit = fit_tls(sample_curve(truth, 20, 0.1, 1e6));
    CHECK(fit.params.q0_inv == doctest::Approx(truth.q0_inv).epsilon(1e-3));
    CHECK(fit.params.tls_amplitude == doctest::Approx(truth.tls_amplitude).epsilon(1e-3));
    CHECK(fit.params.n_critical == doctest::Approx(truth.n_critical).epsilon(1e-3));
    CHECK(fit.params.beta == doctest::Approx(truth.beta).epsilon(1e-3));
}

TEST_CASE("flat data yields amplitude consistent with zero") {
    TlsParams truth{5e-8, 0.0, 50.0, 1.0};
    const auto fit = fit_tls(sample_curve(truth, 12, 0.5, 1e5));
    CHECK(std::abs(fit.params.tls_amplitude) <=
          std::max(2.0 * fit.sigma.tls_amplitude, 1e-12 * truth.q0_inv));
    CHECK(fit.params.q0_inv == doctest::Approx(truth.q0_inv).epsilon(1e-6));
}

TEST_CASE("power-dependence over an order of magnitude is captured") {
    // A strongly saturating surface-dominated mode: Q rises from ~2.4e6 at one
    // photon to >2.4e7 at a million photons. The fitted curve must pass within
    // the error bars of at least 90% of the noisy points.
    TlsParams truth{2.5e-8, 4.0e-7, 30.0, 0.9};
    const auto points = sample_curve(truth, 24, 1.0, 1e6, 0.03, 11);
    const double q_low = 1.0 / tls_inverse_q(truth, 1.0);
    const double q_high = 1.0 / tls_inverse_q(truth, 1e6);
    CHECK(q_high / q_low > 10.0);

    const auto fit = fit_tls(points);
    int within = 0;
    for (const auto& p : points) {
        const double model_q = q_int_at(fit, p.nbar).value;
        if (std::abs(model_q - p.q_int) <= 2.0 * p.q_int_sigma) ++within;
    }
    CHECK(within >= static_cast<int>(0.9 * points.size()));
}

TEST_CASE("interpolation limits") {
    TlsFit fit;
    fit.params = {3e-8, 4e-7, 50.0, 0.8};

    SUBCASE("saturation limit") {
        CHECK(1.0 / q_int_at(fit, 1e14).value ==
              doctest::Approx(fit.params.q0_inv).epsilon(1e-4));
    }
    SUBCASE("single-photon limit") {
        CHECK(1.0 / q_int_at(fit, 1e-9).value ==
              doctest::Approx(fit.params.q0_inv + fit.params.tls_amplitude).epsilon(1e-6));
    }
    SUBCASE("TLS term drops by sqrt(2) at the critical photon number") {
        const double tls_term = 1.0 / q_int_at(fit, 50.0).value - fit.params.q0_inv;
        CHECK(tls_term == doctest::Approx(fit.params.tls_amplitude / std::sqrt(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("fitted model is non-increasing in photon number") {
    TlsParams truth{3e-8, 4e-7, 50.0, 0.8};
    const auto fit = fit_tls(sample_curve(truth, 20, 0.1, 1e6, 0.02, 5));
    double prev = std::numeric_limits<double>::infinity();
    for (double nbar = 0.01; nbar < 1e8; nbar *= 1.5) {
        const double inv_q = tls_inverse_q(fit.params, nbar);
        CHECK(inv_q <= prev + 1e-18);
        prev = inv_q;
    }
}

TEST_CASE("interpolation consistency: residuals match at the fit points") {
    TlsParams truth{3e-8, 4e-7, 50.0, 0.8};
    const auto points = sample_curve(truth, 16, 0.5, 1e5, 0.05, 9);
    const auto fit = fit_tls(points);
    for (const auto& p : points) {
        const double via_interp = q_int_at(fit, p.nbar).value;
        const double via_model = 1.0 / tls_inverse_q(fit.params, p.nbar);
        CHECK(via_interp == doctest::Approx(via_model).epsilon(1e-14));
    }
}

TEST_CASE("input validation") {
    TlsParams truth{3e-8, 4e-7, 50.0, 0.8};
    CHECK_THROWS_WITH_AS(fit_tls(sample_curve(truth, 4, 0.1, 1e4)),
                         doctest::Contains("insufficient-power-range"), Error);
    CHECK_THROWS_WITH_AS(fit_tls(sample_curve(truth, 8, 10.0, 500.0)),
                         doctest::Contains("insufficient-power-range"), Error);
    CHECK_THROWS_AS(q_int_at(TlsFit{}, -1.0), Error);
}
