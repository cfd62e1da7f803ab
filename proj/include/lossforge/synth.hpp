#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lossforge/domain.hpp"
#include "lossforge/participation.hpp"
#include "lossforge/sweep_plan.hpp"
#include "lossforge/tls_model.hpp"

namespace lossforge::synth {

// Forward model: hanger traces and whole multi-device power sweeps generated
// from known ground truth, for roundtrip and Monte-Carlo testing. Everything
// is deterministic under the seed.

struct ModeTruth {
    std::string id;
    HangerParams hanger; // q_loaded is recomputed per power during dataset generation
    TlsParams tls;       // per-mode saturation curve for 1/Q_int(nbar)
};

// Power-dependent part of the surface channel: Gamma_surf(nbar) =
// Gamma_surf(sat) + tan_delta_tls / sqrt(1 + (nbar/n_c)^beta).
struct SurfaceTls {
    double tan_delta_tls = 0.0;
    double n_critical = 1.0;
    double beta = 1.0;
};

struct GroundTruth {
    std::vector<ModeTruth> modes;
    std::map<std::string, ChannelLoss> channel_factors; // saturated loss per channel id
    std::optional<SurfaceTls> surface_tls;         // layered on the "surf" channel
    double noise_sigma = 0.0;                      // additive Gaussian per quadrature
    std::uint64_t seed = 0;
    int points_per_trace = 201;
    double span_linewidths = 8.0;
};

// Evaluate the hanger model on the plan and add complex Gaussian noise.
FrequencyTrace generate_trace(const HangerParams& params, const SweepPlan& plan,
                              double noise_sigma, std::uint64_t seed,
                              std::optional<double> power_w = std::nullopt,
                              const std::string& label = {});

// Convenience overload: the first mode of the ground truth.
FrequencyTrace generate_trace(const GroundTruth& truth, const SweepPlan& plan);

// The circulating photon number depends on Q_L which depends on the photon
// number; solve the fixed point with damping 0.5. The coupling Q entering the
// photon formula is the real part convention |Qc|/cos(phi).
struct PhotonFixedPoint {
    double nbar = 0.0;
    double q_loaded = 0.0;
    int iterations = 0;
};
PhotonFixedPoint self_consistent_photon_number(const TlsParams& tls, double fr_hz,
                                               double q_coupling_mag, double phi,
                                               double power_w);

// The per-mode saturation curve implied by the channel factors:
// 1/Q0 = sum_i P_ji Gamma_i(sat), amplitude = P_j,surf * tan_delta_tls.
TlsParams mode_tls_curve(const GroundTruth& truth, const ParticipationMatrix& matrix,
                         std::size_t mode_index);

struct DatasetEntry {
    std::string mode_id;
    double power_dbm = 0.0; // at device
    double power_w = 0.0;
    double nbar = 0.0;   // self-consistent
    double q_int = 0.0;  // true internal Q at nbar
    double q_loaded = 0.0;
    FrequencyTrace trace;
};

// One trace per mode per drive power, each internally consistent with the
// participation model and the TLS saturation of the surface channel.
std::vector<DatasetEntry> generate_dataset(const GroundTruth& truth,
                                           const std::vector<double>& powers_dbm_at_device,
                                           const ParticipationMatrix& matrix);

// Stable per-task seed derivation (splitmix64 over the master seed and task
// indices) so parallel generation stays reproducible.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

} // namespace lossforge::synth
