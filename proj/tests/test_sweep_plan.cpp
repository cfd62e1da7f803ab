#include <cmath>

#include "doctest.h"
#include "lossforge/errors.hpp"
#include "lossforge/sweep_plan.hpp"

using namespace lossforge;

TEST_CASE("phase-uniform plan geometry") {
    const double center = 5e9;
    const double span = 2e6;

    SUBCASE("center point and exact endpoints for any weight") {
        for (const double w : {0.3, 1.0, 5.0, 40.0}) { // includes the W = 1 branch point
            const auto plan = plan_phase_uniform(center, span, w, 101);
            CHECK(plan.points_hz[50] == center);
            CHECK(plan.points_hz.front() == center - span / 2);
            CHECK(plan.points_hz.back() == center + span / 2);
            for (std::size_t i = 1; i < plan.points_hz.size(); ++i)
                CHECK(plan.points_hz[i] > plan.points_hz[i - 1]);
        }
    }
    SUBCASE("symmetry about the center") {
        const auto plan = plan_phase_uniform(center, span, 5.0, 101);
        for (int n = 0; n <= 50; ++n)
            CHECK(plan.points_hz[50 + n] - center ==
                  doctest::Approx(-(plan.points_hz[50 - n] - center)).epsilon(1e-15));
    }
    SUBCASE("W -> 0 converges to the linear grid at O(W^2)") {
        const auto linear = plan_linear(center, span, 101);
        double previous = 0.0;
        for (const double w : {1e-3, 1e-2, 1e-1}) {
            const auto plan = plan_phase_uniform(center, span, w, 101);
            double max_disp = 0.0;
            for (std::size_t i = 0; i < plan.points_hz.size(); ++i)
                max_disp = std::max(max_disp, std::abs(plan.points_hz[i] - linear.points_hz[i]));
            if (previous > 0.0) {
                const double ratio = max_disp / previous;
                CHECK(ratio == doctest::Approx(100.0).epsilon(0.05));
            }
            previous = max_disp;
        }
    }
    SUBCASE("larger weight bunches points near the center") {
        const auto narrow = plan_phase_uniform(center, span, 2.0, 101);
        const auto wide = plan_phase_uniform(center, span, 8.0, 101);
        const double spacing_narrow = narrow.points_hz[51] - narrow.points_hz[50];
        const double spacing_wide = wide.points_hz[51] - wide.points_hz[50];
        CHECK(spacing_wide < spacing_narrow);
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(plan_phase_uniform(center, span, 0.0, 101), Error);
        CHECK_THROWS_AS(plan_phase_uniform(center, span, -1.0, 101), Error);
        CHECK_THROWS_AS(plan_phase_uniform(center, span, 5.0, 100), Error);
        CHECK_THROWS_AS(plan_phase_uniform(center, span, 5.0, 5), Error);
    }
}

TEST_CASE("quadratic plan geometry") {
    const auto plan = plan_quadratic(4e9, 1e6, 5);
    // Offsets follow k(k+1)(2k+1)/6 -> {0, 1, 5}, normalized to {0, 0.2, 1}.
    CHECK(plan.points_hz[2] == 4e9);
    CHECK(plan.points_hz[3] - 4e9 == doctest::Approx(0.2 * 5e5).epsilon(1e-12));
    CHECK(plan.points_hz[4] - 4e9 == doctest::Approx(5e5).epsilon(1e-15));
    CHECK(plan.points_hz[1] - 4e9 == doctest::Approx(-0.2 * 5e5).epsilon(1e-12));
    CHECK(plan.points_hz[0] - 4e9 == doctest::Approx(-5e5).epsilon(1e-15));

    const auto plan9 = plan_quadratic(4e9, 1e6, 9);
    double prev_spacing = 0.0;
    for (std::size_t i = 4; i + 1 < plan9.points_hz.size(); ++i) {
        const double spacing = plan9.points_hz[i + 1] - plan9.points_hz[i];
        CHECK(spacing > prev_spacing);
        prev_spacing = spacing;
    }
}

TEST_CASE("phase gap metric") {
    const double center = 5e9;
    const double ql = 1e6;
    const double w = 5.0;
    const double span = w * center / ql;

    SUBCASE("phase-uniform plan with matching weight has equal gaps") {
        const auto plan = plan_phase_uniform(center, span, w, 101);
        const double expected = 4.0 * std::atan(w) / 100.0;
        CHECK(phase_gap_metric(plan, ql) == doctest::Approx(expected).epsilon(1e-9));
        // equal gaps: the max equals the mean
        double total = 0.0;
        for (std::size_t i = 1; i < plan.points_hz.size(); ++i) {
            const double a =
                2.0 * std::atan(2.0 * ql * (plan.points_hz[i] / center - 1.0));
            const double b =
                2.0 * std::atan(2.0 * ql * (plan.points_hz[i - 1] / center - 1.0));
            total += a - b;
        }
        CHECK(phase_gap_metric(plan, ql) == doctest::Approx(total / 100.0).epsilon(1e-9));
    }
    SUBCASE("linear plan has a strictly larger max gap") {
        const auto uniform = plan_phase_uniform(center, span, w, 101);
        const auto linear = plan_linear(center, span, 101);
        CHECK(phase_gap_metric(linear, ql) > phase_gap_metric(uniform, ql));
    }
    SUBCASE("large-N limit approaches arctan-span / (N-1)") {
        const auto plan = plan_phase_uniform(center, span, w, 2001);
        const double expected = 4.0 * std::atan(w) / 2000.0;
        CHECK(phase_gap_metric(plan, ql) == doctest::Approx(expected).epsilon(1e-6));
    }
}
