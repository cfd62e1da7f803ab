#include <cmath>
#include <random>

#include "doctest.h"
#include "lossforge/errors.hpp"
#include "lossforge/io.hpp"
#include "lossforge/loss_extraction.hpp"
#include "test_support.hpp"

using namespace lossforge;

namespace {

ParticipationMatrix diagonal_matrix() {
    return ParticipationMatrix({{"m0", 4e9}, {"m1", 5e9}, {"m2", 6e9}},
                               {{"surf", ChannelKind::DielectricParticipation},
                                {"bulk", ChannelKind::DielectricParticipation},
                                {"seam", ChannelKind::SeamAdmittance}},
                               {{2e-3, 0.0, 0.0}, {0.0, 0.8, 0.0}, {0.0, 0.0, 1e-5}});
}

ParticipationMatrix bf22() {
    return io::read_participation(testsupport::fixture("participations/tsl_v2_bf22.json"));
}

std::vector<ModeRecord> records_from_q(const ParticipationMatrix& matrix,
                                       const std::vector<double>& qs, double rel_sigma) {
    std::vector<ModeRecord> out;
    for (std::size_t j = 0; j < qs.size(); ++j)
        out.push_back({matrix.modes()[j].id, matrix.modes()[j].frequency_hz, qs[j],
                       rel_sigma * qs[j], std::nullopt});
    return out;
}

} // namespace

TEST_CASE("decoupled system extracts channel by channel") {
    const auto matrix = diagonal_matrix();
    const std::vector<double> gamma{3e-4, 2e-8, 5e-3};
    std::vector<double> qs;
    for (std::size_t j = 0; j < 3; ++j)
        qs.push_back(1.0 / (matrix.value(j, j) * gamma[j]));
    const auto set = extract(matrix, records_from_q(matrix, qs, 0.1));

    for (std::size_t c = 0; c < 3; ++c) {
        const auto& est = set.at(matrix.channels()[c].id);
        CHECK(est.loss.value == doctest::Approx(gamma[c]).epsilon(1e-10));
        // sigma_Gamma = sigma_kappa / P for a decoupled channel
        const double kappa = 1.0 / qs[c];
        CHECK(est.loss.sigma ==
              doctest::Approx(0.1 * kappa / matrix.value(c, c)).epsilon(1e-9));
    }
}

TEST_CASE("survey-device golden extraction") {
    const auto matrix = bf22();
    // Single-photon Qs of the HEMEX-annealed tantalum device (row TSL3).
    const std::vector<double> qs{2.38e6, 41.23e6, 10.80e6};
    const auto set = extract(matrix, records_from_q(matrix, qs, 0.1), testsupport::package_fixed());

    CHECK(std::abs(set.at("surf").loss.value - 3.40e-4) < 0.3e-4);
    CHECK(std::abs(set.at("bulk").loss.value - 1.25e-8) < 0.2e-8);
    CHECK(std::abs(set.at("seam").loss.value - 5.18e-3) < 0.2e-3);
    CHECK(set.at("pkg_cond").fixed);
    CHECK_FALSE(set.at("surf").fixed);

    // sigma_i = sqrt(C_ii) exactly
    for (std::size_t c = 0; c < set.free_channels.size(); ++c)
        CHECK(set.at(set.free_channels[c]).loss.sigma ==
              doctest::Approx(std::sqrt(set.covariance[c][c])).epsilon(1e-14));
}

TEST_CASE("exact recovery of a forward model") {
    const auto matrix = bf22();
    std::map<std::string, double> truth{
        {"surf", 3.3e-4}, {"bulk", 2.5e-8}, {"pkg_cond", 0.61e-6}, {"pkg_ma", 4.1e-2},
        {"seam", 4.9e-3}};
    std::vector<double> qs;
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        double kappa = 0.0;
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            ChannelLoss loss{truth.at(matrix.channels()[i].id), 0.0,
                             matrix.channels()[i].id == "pkg_cond" ? 50e-9 : 0.0, ""};
            kappa += matrix.value(j, i) *
                     channel_loss_factor(matrix.channels()[i], loss, matrix.modes()[j].frequency_hz);
        }
        qs.push_back(1.0 / kappa);
    }
    const auto set = extract(matrix, records_from_q(matrix, qs, 0.05), testsupport::package_fixed());
    CHECK(set.at("surf").loss.value == doctest::Approx(truth["surf"]).epsilon(1e-10));
    CHECK(set.at("bulk").loss.value == doctest::Approx(truth["bulk"]).epsilon(1e-10));
    CHECK(set.at("seam").loss.value == doctest::Approx(truth["seam"]).epsilon(1e-10));
}

TEST_CASE("weighting invariance: the weighted formulation is scale-free per row") {
    SUBCASE("square system: weights cannot move the solution at all") {
        const auto matrix = bf22();
        std::vector<ModeRecord> base = records_from_q(matrix, {2.38e6, 41.23e6, 10.80e6}, 0.1);
        auto scaled = base;
        scaled[1].q_int_sigma *= 7.5;
        const auto a = extract(matrix, base, testsupport::package_fixed());
        const auto b = extract(matrix, scaled, testsupport::package_fixed());
        for (const auto& id : a.free_channels)
            CHECK(a.at(id).loss.value == doctest::Approx(b.at(id).loss.value).epsilon(1e-12));
    }
    SUBCASE("overdetermined system: scaling one row's (P, kappa, sigma) jointly") {
        const std::vector<ModeInfo> modes{{"m0", 4e9}, {"m1", 5e9}, {"m2", 6e9}, {"m3", 7e9}};
        const std::vector<LossChannel> channels{{"surf", ChannelKind::DielectricParticipation},
                                                {"bulk", ChannelKind::DielectricParticipation}};
        std::vector<std::vector<double>> rows{
            {1.2e-3, 0.90}, {3.5e-5, 0.80}, {2.2e-5, 0.45}, {4.0e-4, 0.70}};
        const std::vector<double> qs{2.4e6, 3.9e7, 6.1e7, 7.3e6};

        const auto base_set =
            extract(ParticipationMatrix(modes, channels, rows),
                    records_from_q(ParticipationMatrix(modes, channels, rows), qs, 0.1));

        // Scale row 2 of the equation by c: P -> cP, kappa -> c kappa
        // (q -> q/c), sigma_kappa -> c sigma_kappa (sigma_q -> sigma_q/c).
        const double c = 1.8;
        auto scaled_rows = rows;
        for (auto& v : scaled_rows[2]) v *= c;
        ParticipationMatrix scaled_matrix(modes, channels, scaled_rows);
        auto records = records_from_q(scaled_matrix, qs, 0.1);
        records[2].q_int /= c;
        records[2].q_int_sigma /= c;
        const auto scaled_set = extract(scaled_matrix, records);

        for (const auto& id : base_set.free_channels) {
            CHECK(scaled_set.at(id).loss.value ==
                  doctest::Approx(base_set.at(id).loss.value).epsilon(1e-12));
            CHECK(scaled_set.at(id).loss.sigma ==
                  doctest::Approx(base_set.at(id).loss.sigma).epsilon(1e-12));
        }
    }
}

TEST_CASE("rank-deficient matrices name the collinear channels") {
    ParticipationMatrix matrix({{"m0", 4e9}, {"m1", 5e9}, {"m2", 6e9}},
                               {{"surf", ChannelKind::DielectricParticipation},
                                {"twin", ChannelKind::DielectricParticipation}},
                               {{1e-3, 1e-3}, {2e-4, 2e-4}, {5e-5, 5e-5}});
    try {
        extract(matrix, records_from_q(matrix, {1e6, 5e6, 8e6}, 0.1));
        FAIL("expected unidentifiable-channels");
    } catch (const Error& e) {
        CHECK(e.code() == "unidentifiable-channels");
        CHECK(std::string(e.what()).find("surf") != std::string::npos);
        CHECK(std::string(e.what()).find("twin") != std::string::npos);
        CHECK(e.kind() == ErrorKind::Numerical);
    }
}

TEST_CASE("mode/channel mismatches are validation errors") {
    const auto matrix = diagonal_matrix();
    auto records = records_from_q(matrix, {1e6, 1e6, 1e6}, 0.1);
    records.pop_back();
    CHECK_THROWS_WITH_AS(extract(matrix, records), doctest::Contains("mode-mismatch"), Error);

    auto renamed = records_from_q(matrix, {1e6, 1e6, 1e6}, 0.1);
    renamed[0].mode_id = "nope";
    CHECK_THROWS_WITH_AS(extract(matrix, renamed), doctest::Contains("mode-mismatch"), Error);

    CHECK_THROWS_WITH_AS(extract(matrix, records_from_q(matrix, {1e6, 1e6, 1e6}, 0.1),
                                 {{"ghost", ChannelLoss{1.0, 0.0, 0.0, ""}}}),
                         doctest::Contains("channel-mismatch"), Error);
}

TEST_CASE("covariance law against a noise ensemble") {
    const auto matrix = bf22();
    const std::vector<double> gamma_truth{3.4e-4, 1.25e-8, 5.18e-3};
    const std::vector<std::string> free{"surf", "bulk", "seam"};
    // Forward kappas without fixed channels (package left out for clarity).
    std::vector<double> kappa0(3, 0.0);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t c = 0; c < 3; ++c)
            kappa0[j] += matrix.value(j, *matrix.channel_index(free[c])) * gamma_truth[c];

    // Reduced matrix with only the free columns.
    ParticipationMatrix reduced(
        matrix.modes(),
        {{"surf", ChannelKind::DielectricParticipation},
         {"bulk", ChannelKind::DielectricParticipation},
         {"seam", ChannelKind::SeamAdmittance}},
        [&] {
            std::vector<std::vector<double>> rows;
            for (std::size_t j = 0; j < 3; ++j)
                rows.push_back({matrix.value(j, *matrix.channel_index("surf")),
                                matrix.value(j, *matrix.channel_index("bulk")),
                                matrix.value(j, *matrix.channel_index("seam"))});
            return rows;
        }());

    std::mt19937_64 rng(42);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double rel = 0.05;
    const int n_trials = 600;
    std::vector<std::array<double, 3>> draws;
    std::vector<std::vector<double>> reported_cov;
    for (int t = 0; t < n_trials; ++t) {
        std::vector<ModeRecord> records;
        for (std::size_t j = 0; j < 3; ++j) {
            const double sigma_kappa = rel * kappa0[j];
            const double kappa = kappa0[j] + sigma_kappa * gauss(rng);
            const double q = 1.0 / kappa;
            // sigma_q consistent with the generated sigma_kappa
            records.push_back({reduced.modes()[j].id, reduced.modes()[j].frequency_hz, q,
                               sigma_kappa * q * q, std::nullopt});
        }
        const auto set = extract(reduced, records);
        draws.push_back({set.at("surf").loss.value, set.at("bulk").loss.value,
                         set.at("seam").loss.value});
        reported_cov = set.covariance;
    }
    // Empirical covariance of the draws vs the reported C, per entry.
    std::array<double, 3> mean{};
    for (const auto& d : draws)
        for (int c = 0; c < 3; ++c) mean[c] += d[c];
    for (int c = 0; c < 3; ++c) mean[c] /= n_trials;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            double cov = 0.0;
            for (const auto& d : draws) cov += (d[a] - mean[a]) * (d[b] - mean[b]);
            cov /= n_trials - 1;
            CHECK(cov == doctest::Approx(reported_cov[a][b]).epsilon(0.20));
        }
    }
}

TEST_CASE("budget fractions") {
    const auto matrix = bf22();
    const std::vector<double> qs{2.44e6, 29.47e6, 16.54e6}; // device row TSL4
    const auto set = extract(matrix, records_from_q(matrix, qs, 0.1), testsupport::package_fixed());
    const auto bud = budget(matrix, set);

    SUBCASE("fractions sum to one per mode") {
        for (std::size_t m = 0; m < bud.mode_ids.size(); ++m) {
            double sum = 0.0;
            for (const double f : bud.fraction[m]) sum += f;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("each mode is dominated by its design channel") {
        const auto channel = [&](const std::string& id) {
            return *bf22().channel_index(id);
        };
        CHECK(bud.fraction[0][channel("surf")] > 0.80); // D1 surface-dominated
        CHECK(bud.fraction[1][channel("bulk")] > 0.60); // D2 bulk-dominated
        CHECK(bud.fraction[2][channel("seam")] > 0.50); // C seam-dominated
    }
    SUBCASE("single channel budget is trivially 1") {
        ParticipationMatrix single({{"m", 5e9}}, {{"surf", ChannelKind::DielectricParticipation}},
                                   {{1e-3}});
        std::map<std::string, ChannelLoss> factors{{"surf", {1e-4, 0.0, 0.0, ""}}};
        const auto b = budget(single, factors);
        CHECK(b.fraction[0][0] == doctest::Approx(1.0));
    }
    SUBCASE("two equal contributions split evenly") {
        ParticipationMatrix two({{"m", 5e9}},
                                {{"a", ChannelKind::DielectricParticipation},
                                 {"b", ChannelKind::DielectricParticipation}},
                                {{1e-3, 1e-3}});
        std::map<std::string, ChannelLoss> factors{{"a", {1e-4, 0, 0, ""}},
                                                   {"b", {1e-4, 0, 0, ""}}};
        const auto b = budget(two, factors);
        CHECK(b.fraction[0][0] == doctest::Approx(0.5));
        CHECK(b.fraction[0][1] == doctest::Approx(0.5));
    }
}

TEST_CASE("median relative deviation filter") {
    SUBCASE("survey fixture reproduces the quoted average") {
        const auto entries = [&] {
            std::vector<double> v;
            // values in Ohm m from the seam survey fixture
            const double raw[] = {13.4, 51.6, 22.4, 81.2, 13.1, 1.95, 1.56, 0.87, 1.26,
                                  186.0, 331.0, 1.08, 11.9, 3.92, 2.38, 2.81, 5.18, 2.45};
            for (const double x : raw) v.push_back(x * 1e-3);
            return v;
        }();
        const auto res = mrd_filter(entries);
        int flagged = 0;
        for (const bool f : res.flagged) flagged += f;
        CHECK(flagged == 5);
        CHECK(res.kept.size() == 13);
        CHECK(std::abs(res.mean - 4.75e-3) <= 0.01e-3);
        CHECK(std::abs(res.stddev - 4.5e-3) <= 0.1e-3);
    }
    SUBCASE("all equal values") {
        const auto res = mrd_filter({2.0, 2.0, 2.0, 2.0});
        for (const bool f : res.flagged) CHECK_FALSE(f);
        CHECK(res.mean == doctest::Approx(2.0));
        CHECK(res.stddev == doctest::Approx(0.0));
    }
    SUBCASE("an isolated outlier is flagged") {
        const auto res = mrd_filter({1.0, 1.0, 1.0, 10.0});
        CHECK(res.mrd[3] == doctest::Approx(9.0));
        CHECK(res.flagged[3]);
        CHECK_FALSE(res.flagged[0]);
        CHECK(res.kept.size() == 3);
    }
    SUBCASE("too few values") {
        CHECK_THROWS_AS(mrd_filter({1.0, 2.0}), Error);
    }
}

TEST_CASE("extraction across a photon-number grid") {
    const auto matrix = bf22();
    // Build per-mode TLS fits from synthetic saturation curves where only the
    // surface factor is power-dependent.
    const double gamma_surf_sat = 2.0e-4;
    const double tls_amp = 3.0e-4; // surface tan delta, saturable part
    const double gamma_bulk = 2.0e-8;
    const double gamma_seam = 4.0e-3;
    std::map<std::string, TlsFit> fits;
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        const double p_surf = matrix.value(j, *matrix.channel_index("surf"));
        const double fixed_loss =
            p_surf * gamma_surf_sat +
            matrix.value(j, *matrix.channel_index("bulk")) * gamma_bulk +
            matrix.value(j, *matrix.channel_index("seam")) * gamma_seam;
        std::vector<TlsDataPoint> pts;
        TlsParams truth{fixed_loss, p_surf * tls_amp, 40.0, 0.9};
        for (int i = 0; i < 18; ++i) {
            const double nbar = std::pow(10.0, -1.0 + 6.0 * i / 17.0);
            const double q = 1.0 / tls_inverse_q(truth, nbar);
            pts.push_back({nbar, q, 0.02 * q});
        }
        fits[matrix.modes()[j].id] = fit_tls(pts);
    }

    // Reduced matrix without the package channels (their truth here is zero).
    ParticipationMatrix reduced(
        matrix.modes(),
        {{"surf", ChannelKind::DielectricParticipation},
         {"bulk", ChannelKind::DielectricParticipation},
         {"seam", ChannelKind::SeamAdmittance}},
        [&] {
            std::vector<std::vector<double>> rows;
            for (std::size_t j = 0; j < 3; ++j)
                rows.push_back({matrix.value(j, *matrix.channel_index("surf")),
                                matrix.value(j, *matrix.channel_index("bulk")),
                                matrix.value(j, *matrix.channel_index("seam"))});
            return rows;
        }());

    const std::vector<double> grid{1.0, 10.0, 100.0, 1e3, 1e4};
    const auto sets = extract_vs_power(reduced, fits, grid);
    REQUIRE(sets.size() == grid.size());

    SUBCASE("a single grid point matches a plain extraction") {
        const auto single = extract_vs_power(reduced, fits, {1.0});
        std::vector<ModeRecord> records;
        for (const auto& m : reduced.modes()) {
            const auto q = q_int_at(fits.at(m.id), 1.0);
            records.push_back({m.id, m.frequency_hz, q.value, q.sigma, 1.0});
        }
        const auto direct = extract(reduced, records);
        for (const auto& id : direct.free_channels)
            CHECK(single[0].at(id).loss.value ==
                  doctest::Approx(direct.at(id).loss.value).epsilon(1e-12));
        CHECK(single[0].photon_number == doctest::Approx(1.0));
    }
    SUBCASE("only the surface factor moves with power") {
        for (const auto& set : sets) {
            CHECK(std::abs(set.at("bulk").loss.value - gamma_bulk) <
                  2.0 * set.at("bulk").loss.sigma + 0.03 * gamma_bulk);
            CHECK(std::abs(set.at("seam").loss.value - gamma_seam) <
                  2.0 * set.at("seam").loss.sigma + 0.03 * gamma_seam);
        }
        // Surface factor decreases monotonically across the grid.
        for (std::size_t i = 1; i < sets.size(); ++i)
            CHECK(sets[i].at("surf").loss.value < sets[i - 1].at("surf").loss.value);
        // And matches the analytic saturation at the grid points.
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double expected =
                gamma_surf_sat + tls_amp / std::sqrt(1.0 + std::pow(grid[i] / 40.0, 0.9));
            CHECK(sets[i].at("surf").loss.value == doctest::Approx(expected).epsilon(0.02));
        }
    }
}
