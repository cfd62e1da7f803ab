#include "lossforge/participation.hpp"

#include <cmath>
#include <set>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"

namespace lossforge {

ParticipationMatrix::ParticipationMatrix(std::vector<ModeInfo> modes,
                                         std::vector<LossChannel> channels,
                                         std::vector<std::vector<double>> values)
    : modes_(std::move(modes)), channels_(std::move(channels)), values_(std::move(values)) {
    if (modes_.empty() || channels_.empty())
        fail_validation("matrix-empty", "participation matrix needs modes and channels");
    std::set<std::string> ids;
    for (const auto& c : channels_)
        if (!ids.insert(c.id).second)
            fail_validation("matrix-duplicate-channel", "duplicate channel id '" + c.id + "'");
    ids.clear();
    for (const auto& m : modes_) {
        if (!ids.insert(m.id).second)
            fail_validation("matrix-duplicate-mode", "duplicate mode id '" + m.id + "'");
        if (!(m.frequency_hz > 0.0))
            fail_validation("matrix-bad-frequency", m.id + ": mode frequency must be positive");
    }
    if (values_.size() != modes_.size())
        fail_validation("matrix-shape", "row count does not match mode count");
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (values_[j].size() != channels_.size())
            fail_validation("matrix-shape", "column count does not match channel count");
        for (std::size_t i = 0; i < channels_.size(); ++i) {
            const double v = values_[j][i];
            if (!std::isfinite(v) || v < 0.0)
                fail_validation("matrix-negative",
                                "participation values must be finite and >= 0 (" + modes_[j].id +
                                    ", " + channels_[i].id + ")");
            if (channels_[i].kind == ChannelKind::DielectricParticipation && v > 1.0)
                fail_validation("matrix-participation-above-one",
                                "dielectric participation exceeds 1 (" + modes_[j].id + ", " +
                                    channels_[i].id + ")");
        }
    }
}

std::optional<std::size_t> ParticipationMatrix::channel_index(const std::string& id) const {
    for (std::size_t i = 0; i < channels_.size(); ++i)
        if (channels_[i].id == id) return i;
    return std::nullopt;
}

std::optional<std::size_t> ParticipationMatrix::mode_index(const std::string& id) const {
    for (std::size_t j = 0; j < modes_.size(); ++j)
        if (modes_[j].id == id) return j;
    return std::nullopt;
}

double channel_loss_factor(const LossChannel& channel, const ChannelLoss& loss, double f_hz) {
    if (channel.kind == ChannelKind::ConductorParticipation)
        return conductor_loss_factor(loss.value, f_hz, loss.penetration_depth_m);
    return loss.value;
}

double channel_loss_sigma(const LossChannel& channel, const ChannelLoss& loss, double f_hz) {
    if (channel.kind == ChannelKind::ConductorParticipation) {
        if (!(loss.value > 0.0)) return 0.0;
        return conductor_loss_factor(loss.value, f_hz, loss.penetration_depth_m) * loss.sigma /
               loss.value;
    }
    return loss.sigma;
}

double conductor_loss_factor(double surface_resistance_ohm, double f_hz,
                             double penetration_depth_m) {
    if (!(f_hz > 0.0) || !(penetration_depth_m > 0.0))
        fail_validation("conductor-bad-args", "frequency and penetration depth must be positive");
    if (surface_resistance_ohm < 0.0)
        fail_validation("conductor-bad-args", "surface resistance must be >= 0");
    return surface_resistance_ohm / (codata.mu0 * angular(f_hz) * penetration_depth_m);
}

double segmented_seam_admittance(double length_m, double width_m, double z0_ohm,
                                 const std::vector<double>& contact_positions_m) {
    if (!(length_m > 0.0) || !(width_m > 0.0) || !(z0_ohm > 0.0))
        fail_validation("seam-bad-args", "length, width and Z0 must be positive");
    double sum = 0.0;
    for (const double z : contact_positions_m) {
        if (z < 0.0 || z > length_m)
            fail_validation("seam-bad-position", "contact position outside the stripline");
        const double s = std::sin(pi * z / length_m);
        sum += s * s;
    }
    return (2.0 / pi) * sum / (width_m * z0_ohm);
}

double lumped_contact_admittance(double z0_ohm, double seam_width_m) {
    if (!(z0_ohm > 0.0) || !(seam_width_m > 0.0))
        fail_validation("seam-bad-args", "Z0 and seam width must be positive");
    return 2.0 / (z0_ohm * seam_width_m);
}

void SurfaceComposition::validate() const {
    double sum = 0.0;
    for (const double w : weights) {
        if (w < 0.0) fail_validation("composition-negative-weight", "weights must be >= 0");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        fail_validation("composition-weights-sum", "weights must sum to 1");
    if (!(assumed_thickness_m > 0.0) || !(assumed_eps_r > 0.0))
        fail_validation("composition-bad-assumptions",
                        "assumed thickness and permittivity must be positive");
}

double compose_surface_factor(const SurfaceComposition& composition,
                              const std::array<double, 3>& tan_deltas,
                              const std::array<double, 3>& true_thicknesses_m,
                              double true_eps_r) {
    composition.validate();
    if (!(true_eps_r > 0.0))
        fail_validation("composition-bad-assumptions", "true permittivity must be positive");
    double gamma = 0.0;
    for (int k = 0; k < 3; ++k) {
        gamma += composition.weights[k] *
                 (true_thicknesses_m[k] / composition.assumed_thickness_m) *
                 (true_eps_r / composition.assumed_eps_r) * tan_deltas[k];
    }
    return gamma;
}

std::string channel_kind_name(ChannelKind kind) {
    switch (kind) {
        case ChannelKind::DielectricParticipation: return "dielectric-participation";
        case ChannelKind::ConductorParticipation: return "conductor-participation";
        case ChannelKind::SeamAdmittance: return "seam-admittance";
    }
    return "dielectric-participation";
}

ChannelKind channel_kind_from_name(const std::string& name) {
    if (name == "dielectric-participation") return ChannelKind::DielectricParticipation;
    if (name == "conductor-participation") return ChannelKind::ConductorParticipation;
    if (name == "seam-admittance") return ChannelKind::SeamAdmittance;
    fail_validation("matrix-unknown-kind", "unknown channel kind '" + name + "'");
}

} // namespace lossforge
