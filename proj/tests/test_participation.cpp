#include <cmath>

#include "doctest.h"
#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"
#include "lossforge/io.hpp"
#include "lossforge/participation.hpp"
#include "test_support.hpp"

using namespace lossforge;

TEST_CASE("matrix validation") {
    std::vector<ModeInfo> modes{{"D1", 5e9}};
    std::vector<LossChannel> channels{{"surf", ChannelKind::DielectricParticipation},
                                      {"seam", ChannelKind::SeamAdmittance}};

    CHECK_NOTHROW(ParticipationMatrix(modes, channels, {{1e-3, 1e4}}));
    CHECK_THROWS_WITH_AS(ParticipationMatrix(modes, channels, {{-1e-3, 1e4}}),
                         doctest::Contains("matrix-negative"), Error);
    CHECK_THROWS_WITH_AS(ParticipationMatrix(modes, channels, {{1.5, 1e4}}),
                         doctest::Contains("matrix-participation-above-one"), Error);
    // Seam admittances are not participations and may exceed 1.
    CHECK_NOTHROW(ParticipationMatrix(modes, channels, {{0.9, 9.4e4}}));

    std::vector<LossChannel> dup{{"surf", ChannelKind::DielectricParticipation},
                                 {"surf", ChannelKind::DielectricParticipation}};
    CHECK_THROWS_WITH_AS(ParticipationMatrix(modes, dup, {{0.1, 0.1}}),
                         doctest::Contains("matrix-duplicate-channel"), Error);
}

TEST_CASE("conductor loss factor") {
    SUBCASE("magnitude at the common-mode frequency") {
        CHECK(conductor_loss_factor(0.61e-6, 7.13e9, 50e-9) ==
              doctest::Approx(2.17e-4).epsilon(0.005));
    }
    SUBCASE("scales as 1/frequency") {
        const double g1 = conductor_loss_factor(0.61e-6, 4e9, 50e-9);
        const double g2 = conductor_loss_factor(0.61e-6, 8e9, 50e-9);
        CHECK(g2 == doctest::Approx(g1 / 2.0).epsilon(1e-12));
    }
    SUBCASE("zero resistance, zero loss") {
        CHECK(conductor_loss_factor(0.0, 5e9, 50e-9) == 0.0);
    }
}

TEST_CASE("segmented seam admittance") {
    const double w = 10e-6;
    const double length = 12.5e-3;

    SUBCASE("uniformly spaced contacts average sin^2 to one half") {
        const int n = 625;
        std::vector<double> z(n);
        for (int i = 0; i < n; ++i) z[i] = length * (i + 1.0) / (n + 1.0);
        // Z0 chosen so the measured design value 9.4e4 is reproduced.
        const double z0 = 211.6;
        const double y = segmented_seam_admittance(length, w, z0, z);
        CHECK(y == doctest::Approx(9.4e4).epsilon(0.05));
        // sum of sin^2 over the interior grid points is exactly (n+1)/2
        const double expected = (2.0 / pi) * ((n + 1) / 2.0) / (w * z0);
        CHECK(y == doctest::Approx(expected).epsilon(1e-3));
    }
    SUBCASE("a contact at the end contributes nothing") {
        const double lone = segmented_seam_admittance(length, w, 211.6, {length / 2.0});
        const double with_end = segmented_seam_admittance(length, w, 211.6, {length / 2.0, 0.0});
        CHECK(lone == doctest::Approx(with_end).epsilon(1e-15));
    }
}

TEST_CASE("lumped contact admittance and the transmon contact limit") {
    // The design value 737.86 (Ohm m)^-1 at w = 10 um implies Z0 ~ 271 Ohm.
    const double y = 737.86;
    const double w = 10e-6;
    const double z0 = 2.0 / (y * w);
    CHECK(z0 == doctest::Approx(271.0).epsilon(0.005));
    CHECK(lumped_contact_admittance(z0, w) == doctest::Approx(y).epsilon(1e-12));

    // Contact resistance 260 nOhm limits Q to Z0/(2R) > 5e8.
    const double r = 260e-9;
    const double inverse_g = r * w;
    const double q_limit = 1.0 / (y * inverse_g);
    CHECK(q_limit == doctest::Approx(z0 / (2.0 * r)).epsilon(1e-9));
    CHECK(q_limit > 5e8);

    SUBCASE("doubling Z0 halves the admittance") {
        CHECK(lumped_contact_admittance(2.0 * z0, w) == doctest::Approx(y / 2.0).epsilon(1e-12));
    }
}

TEST_CASE("surface composition rescaling") {
    SurfaceComposition comp;
    comp.weights = {0.2, 0.5, 0.3};

    SUBCASE("identity rescale returns the common loss tangent") {
        const double d = 2.3e-3;
        const double got = compose_surface_factor(comp, {d, d, d}, {3e-9, 3e-9, 3e-9}, 10.0);
        CHECK(got == doctest::Approx(d).epsilon(1e-12));
    }
    SUBCASE("single active interface") {
        comp.weights = {1.0, 0.0, 0.0};
        const double got =
            compose_surface_factor(comp, {1e-3, 9e9, 9e9}, {6e-9, 3e-9, 3e-9}, 5.0);
        CHECK(got == doctest::Approx(1e-3 * 2.0 * 0.5).epsilon(1e-12));
    }
    SUBCASE("doubling all thicknesses doubles the factor") {
        const double base =
            compose_surface_factor(comp, {1e-3, 2e-3, 3e-3}, {3e-9, 3e-9, 3e-9}, 10.0);
        const double doubled =
            compose_surface_factor(comp, {1e-3, 2e-3, 3e-3}, {6e-9, 6e-9, 6e-9}, 10.0);
        CHECK(doubled == doctest::Approx(2.0 * base).epsilon(1e-12));
    }
    SUBCASE("weights must be a convex combination") {
        comp.weights = {0.5, 0.2, 0.2};
        CHECK_THROWS_AS(compose_surface_factor(comp, {1e-3, 1e-3, 1e-3}, {3e-9, 3e-9, 3e-9}, 10.0),
                        Error);
    }
}

TEST_CASE("package limits of the survey device reproduce the quoted bounds") {
    // Conductor + MA package loss for the three modes of the HEMEX-annealed
    // tantalum device: 1/(17e9), 1/(4.7e8), 1/(1.3e8).
    const auto matrix = io::read_participation(testsupport::fixture("participations/tsl_v2_bf22.json"));
    const auto fixed = testsupport::package_fixed();
    const double expected[3] = {1.0 / 17e9, 1.0 / 4.7e8, 1.0 / 1.3e8};
    for (std::size_t j = 0; j < 3; ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        double loss = 0.0;
        for (const auto& [id, cl] : fixed) {
            const auto idx = matrix.channel_index(id);
            REQUIRE(idx);
            loss += matrix.value(j, *idx) *
                    channel_loss_factor(matrix.channels()[*idx], cl, f_j);
        }
        CHECK(loss == doctest::Approx(expected[j]).epsilon(0.15));
    }
}
