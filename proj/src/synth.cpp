#include "lossforge/synth.hpp"

#include <cmath>
#include <random>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"
#include "lossforge/photon.hpp"

namespace lossforge::synth {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (a + 1) + 0xbf58476d1ce4e5b9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

FrequencyTrace generate_trace(const HangerParams& params, const SweepPlan& plan,
                              double noise_sigma, std::uint64_t seed,
                              std::optional<double> power_w, const std::string& label) {
    if (!(noise_sigma >= 0.0)) fail_validation("synth-bad-noise", "noise sigma must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<TracePoint> pts;
    pts.reserve(plan.points_hz.size());
    for (const double f : plan.points_hz) {
        std::complex<double> s = hanger_s21(params, f);
        if (noise_sigma > 0.0)
            s += std::complex<double>(noise_sigma * gauss(rng), noise_sigma * gauss(rng));
        pts.push_back({f, s});
    }
    return FrequencyTrace(std::move(pts), power_w, label);
}

FrequencyTrace generate_trace(const GroundTruth& truth, const SweepPlan& plan) {
    if (truth.modes.empty()) fail_validation("synth-no-modes", "ground truth has no modes");
    return generate_trace(truth.modes.front().hanger, plan, truth.noise_sigma, truth.seed,
                          std::nullopt, truth.modes.front().id);
}

PhotonFixedPoint self_consistent_photon_number(const TlsParams& tls, double fr_hz,
                                               double q_coupling_mag, double phi,
                                               double power_w) {
    if (!(q_coupling_mag > 0.0)) fail_validation("synth-bad-qc", "|Qc| must be positive");
    const double kappa_coupling = std::cos(phi) / q_coupling_mag;
    const double qc_real = q_coupling_mag / std::cos(phi);

    const auto loaded_q = [&](double nbar) {
        return 1.0 / (tls_inverse_q(tls, nbar) + kappa_coupling);
    };
    PhotonFixedPoint fp;
    double nbar = 0.0;
    for (int iter = 1; iter <= 100; ++iter) {
        const double target =
            mean_photon_number(power_w, fr_hz, fr_hz, loaded_q(nbar), qc_real);
        const double next = 0.5 * nbar + 0.5 * target;
        const bool done = std::abs(next - nbar) <= 1e-9 * std::max(1.0, std::abs(next));
        nbar = next;
        fp.iterations = iter;
        if (done) {
            fp.nbar = nbar;
            fp.q_loaded = loaded_q(nbar);
            return fp;
        }
    }
    fail_numerical("photon-fixed-point",
                   "photon-number self-consistency did not converge in 100 iterations");
}

TlsParams mode_tls_curve(const GroundTruth& truth, const ParticipationMatrix& matrix,
                         std::size_t mode_index) {
    const double f_j = matrix.modes()[mode_index].frequency_hz;
    TlsParams curve;
    curve.q0_inv = 0.0;
    for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
        const auto& channel = matrix.channels()[i];
        const auto it = truth.channel_factors.find(channel.id);
        if (it == truth.channel_factors.end())
            fail_validation("channel-mismatch",
                            "ground truth has no factor for channel '" + channel.id + "'");
        curve.q0_inv += matrix.value(mode_index, i) * channel_loss_factor(channel, it->second, f_j);
    }
    curve.tls_amplitude = 0.0;
    curve.n_critical = 1.0;
    curve.beta = 1.0;
    if (truth.surface_tls) {
        const auto surf = matrix.channel_index("surf");
        if (!surf)
            fail_validation("channel-mismatch",
                            "surface TLS specified but matrix has no 'surf' channel");
        curve.tls_amplitude = matrix.value(mode_index, *surf) * truth.surface_tls->tan_delta_tls;
        curve.n_critical = truth.surface_tls->n_critical;
        curve.beta = truth.surface_tls->beta;
    }
    return curve;
}

std::vector<DatasetEntry> generate_dataset(const GroundTruth& truth,
                                           const std::vector<double>& powers_dbm_at_device,
                                           const ParticipationMatrix& matrix) {
    if (truth.modes.size() != matrix.mode_count())
        fail_validation("mode-mismatch", "ground truth modes do not match the matrix");
    std::vector<DatasetEntry> out;
    out.reserve(truth.modes.size() * powers_dbm_at_device.size());
    for (std::size_t j = 0; j < truth.modes.size(); ++j) {
        const auto& mode = truth.modes[j];
        if (!matrix.mode_index(mode.id) || matrix.modes()[j].id != mode.id)
            fail_validation("mode-mismatch",
                            "ground truth mode order must match the matrix ('" + mode.id + "')");
        const TlsParams curve = mode_tls_curve(truth, matrix, j);
        const double fr = mode.hanger.fr_hz;
        for (std::size_t k = 0; k < powers_dbm_at_device.size(); ++k) {
            const double p_w = dbm_to_watts(powers_dbm_at_device[k]);
            const PhotonFixedPoint fp = self_consistent_photon_number(
                curve, fr, mode.hanger.q_coupling_mag, mode.hanger.phi, p_w);

            HangerParams params = mode.hanger;
            params.q_loaded = fp.q_loaded;
            const double linewidth = fr / fp.q_loaded;
            const SweepPlan plan =
                plan_phase_uniform(fr, truth.span_linewidths * linewidth, truth.span_linewidths,
                                   truth.points_per_trace);
            DatasetEntry entry{mode.id,
                               powers_dbm_at_device[k],
                               p_w,
                               fp.nbar,
                               1.0 / tls_inverse_q(curve, fp.nbar),
                               fp.q_loaded,
                               generate_trace(params, plan, truth.noise_sigma,
                                              derive_seed(truth.seed, j, k), p_w,
                                              mode.id)};
            out.push_back(std::move(entry));
        }
    }
    return out;
}

} // namespace lossforge::synth
