#include "doctest.h"
#include "lossforge/constants.hpp"
#include "lossforge/domain.hpp"
#include "lossforge/errors.hpp"

using namespace lossforge;

namespace {

std::vector<TracePoint> flat_points(int n) {
    std::vector<TracePoint> pts;
    for (int i = 0; i < n; ++i) pts.push_back({5e9 + 1e3 * i, {1.0, 0.0}});
    return pts;
}

} // namespace

TEST_CASE("trace validation enforces the domain invariants") {
    CHECK_NOTHROW(FrequencyTrace(flat_points(7)));
    CHECK_THROWS_WITH_AS(FrequencyTrace(flat_points(6)), doctest::Contains("trace-too-short"),
                         Error);

    auto pts = flat_points(8);
    std::swap(pts[2], pts[3]);
    CHECK_THROWS_WITH_AS(FrequencyTrace{pts}, doctest::Contains("trace-not-increasing"), Error);

    pts = flat_points(8);
    pts[4].s21 = {0.0, 0.0};
    CHECK_THROWS_WITH_AS(FrequencyTrace{pts}, doctest::Contains("trace-zero-magnitude"), Error);

    pts = flat_points(8);
    pts[5].s21 = {std::nan(""), 0.0};
    CHECK_THROWS_WITH_AS(FrequencyTrace{pts}, doctest::Contains("trace-not-finite"), Error);
}

TEST_CASE("hanger model limits") {
    HangerParams p;
    p.fr_hz = 5e9;
    p.q_loaded = 1e6;
    p.q_coupling_mag = 2e6;
    p.phi = 0.0;
    p.amplitude_a = 0.8;
    p.alpha = 0.3;
    p.tau_s = 0.0;

    // Far off resonance the response approaches the bare prefactor.
    const auto far = hanger_s21(p, 5.5e9);
    CHECK(std::abs(far - 0.8 * std::exp(std::complex<double>(0, 0.3))) < 1e-3);

    // On resonance the dip depth is Q_L/|Qc|.
    const auto dip = hanger_s21(p, 5e9);
    CHECK(std::abs(dip / (0.8 * std::exp(std::complex<double>(0, 0.3))) -
                   std::complex<double>(0.5, 0.0)) < 1e-12);
}

TEST_CASE("hanger fit validation flags bad asymmetry") {
    HangerFit fit;
    fit.params = {5e9, 1e6, 2e6, 1.7, 1.0, 0.0, 0.0};
    CHECK_THROWS_WITH_AS(fit.validate(4.9e9, 5.1e9), doctest::Contains("invalid-asymmetry"),
                         Error);
    fit.params.phi = 0.5;
    CHECK_NOTHROW(fit.validate(4.9e9, 5.1e9));
    CHECK_THROWS_AS(fit.validate(5.05e9, 5.1e9), Error);
}

TEST_CASE("mode record validation") {
    ModeRecord rec{"D1", 5e9, 1e6, 1e4, std::nullopt};
    CHECK_NOTHROW(rec.validate());
    rec.q_int = -1.0;
    CHECK_THROWS_AS(rec.validate(), Error);
}
