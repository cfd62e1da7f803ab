#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lossforge {

// Loss channels pair a geometric quantity (participation ratio or seam
// admittance per length) with an intrinsic loss factor:
//   dielectric:  p (dimensionless)      x loss tangent (dimensionless)
//   conductor:   p (dimensionless)      x R_s/(mu0 w lambda) (dimensionless)
//   seam:        y [(Ohm m)^-1]         x 1/g [Ohm m]
// so every product is a dimensionless contribution to 1/Q.
enum class ChannelKind { DielectricParticipation, ConductorParticipation, SeamAdmittance };

struct LossChannel {
    std::string id; // surf, surf_ta, surf_al, bulk, pkg_cond, pkg_ma, seam, seam_ta_al, ...
    ChannelKind kind = ChannelKind::DielectricParticipation;
};

struct ModeInfo {
    std::string id;
    double frequency_hz = 0.0;
};

// Modes x channels matrix of participations / seam admittances. External
// input produced by field simulation; validated and immutable here.
class ParticipationMatrix {
public:
    ParticipationMatrix(std::vector<ModeInfo> modes, std::vector<LossChannel> channels,
                        std::vector<std::vector<double>> values);

    const std::vector<ModeInfo>& modes() const { return modes_; }
    const std::vector<LossChannel>& channels() const { return channels_; }
    std::size_t mode_count() const { return modes_.size(); }
    std::size_t channel_count() const { return channels_.size(); }
    double value(std::size_t mode, std::size_t channel) const { return values_[mode][channel]; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    std::optional<std::size_t> channel_index(const std::string& id) const;
    std::optional<std::size_t> mode_index(const std::string& id) const;

private:
    std::vector<ModeInfo> modes_;
    std::vector<LossChannel> channels_;
    std::vector<std::vector<double>> values_;
};

// Intrinsic loss of one channel. `value` is the loss tangent (dielectric),
// the inverse seam conductance 1/g in Ohm m (seam), or the surface
// resistance R_s in Ohm (conductor; the 1/omega scaling is evaluated per mode
// frequency via penetration_depth_m).
struct ChannelLoss {
    double value = 0.0;
    double sigma = 0.0;
    double penetration_depth_m = 0.0;
    std::string provenance;
};

// Loss factor of a channel at a given mode frequency.
double channel_loss_factor(const LossChannel& channel, const ChannelLoss& loss, double f_hz);
double channel_loss_sigma(const LossChannel& channel, const ChannelLoss& loss, double f_hz);

// Conductor loss factor Gamma = R_s / (mu0 w lambda).
double conductor_loss_factor(double surface_resistance_ohm, double f_hz,
                             double penetration_depth_m);

// Seam admittance per length of a segmented stripline with contacts at the
// given axial positions, assuming a sinusoidal current distribution:
//   y = (2/pi) sum_i sin^2(pi z_i / l) / (w Z0).
double segmented_seam_admittance(double length_m, double width_m, double z0_ohm,
                                 const std::vector<double>& contact_positions_m);

// Lumped contact model for a junction-mode contact pair: y = 2 / (Z0 w).
double lumped_contact_admittance(double z0_ohm, double seam_width_m);

// Relative weights of the substrate-air / metal-substrate / metal-air surface
// regions within the combined surface participation, plus the thickness and
// permittivity assumed when the participations were simulated.
struct SurfaceComposition {
    std::array<double, 3> weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; // SA, MS, MA
    double assumed_thickness_m = 3e-9;
    double assumed_eps_r = 10.0;

    void validate() const;
};

// Combined surface loss factor: re-scales each interface loss tangent by the
// true-over-assumed thickness and permittivity ratios and sums with the
// composition weights.
double compose_surface_factor(const SurfaceComposition& composition,
                              const std::array<double, 3>& tan_deltas,
                              const std::array<double, 3>& true_thicknesses_m,
                              double true_eps_r);

std::string channel_kind_name(ChannelKind kind);
ChannelKind channel_kind_from_name(const std::string& name);

} // namespace lossforge
