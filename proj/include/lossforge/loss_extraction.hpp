#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "lossforge/domain.hpp"
#include "lossforge/participation.hpp"
#include "lossforge/tls_model.hpp"

namespace lossforge {

struct FactorEstimate {
    ChannelLoss loss;                  // value/sigma (and provenance for fixed inputs)
    bool fixed = false;                // supplied as a residual loss, not extracted
    bool consistent_with_zero = false; // |value| < 2 sigma
};

// Intrinsic loss factors for every channel of a participation matrix: the
// free channels solved by error-weighted least squares plus the fixed
// residual channels that were subtracted first. For free channels
// sigma_i = sqrt(C_ii) exactly.
struct LossFactorSet {
    std::vector<std::string> free_channels;        // order of the covariance
    std::vector<std::vector<double>> covariance;   // free x free
    std::map<std::string, FactorEstimate> factors; // every channel
    double photon_number = std::numeric_limits<double>::quiet_NaN();

    const FactorEstimate& at(const std::string& channel) const;
};

// Solve kappa_j = sum_i P_ji Gamma_i for the channels not listed in `fixed`.
// Fixed channels are subtracted from kappa first with their sigmas added in
// quadrature; the remaining system is solved with rows weighted by
// 1/sigma_kappa and covariance C = (Pt P)^-1 of the weighted matrix.
// Negative extracted factors are reported, not clamped, and flagged when
// consistent with zero.
LossFactorSet extract(const ParticipationMatrix& matrix, const std::vector<ModeRecord>& modes,
                      const std::map<std::string, ChannelLoss>& fixed = {});

// Fractional loss contribution p_i Gamma_i / sum_i p_i Gamma_i per mode, plus
// the absolute per-channel 1/Q_i.
struct LossBudget {
    std::vector<std::string> mode_ids;
    std::vector<std::string> channel_ids;
    std::vector<std::vector<double>> fraction; // [mode][channel]
    std::vector<std::vector<double>> absolute; // [mode][channel] contribution to 1/Q
    std::vector<double> total_inverse_q;       // [mode]
};

LossBudget budget(const ParticipationMatrix& matrix, const LossFactorSet& factors);
LossBudget budget(const ParticipationMatrix& matrix,
                  const std::map<std::string, ChannelLoss>& factors);

// Median-relative-deviation outlier filter: flags entries with
// |x - median| / median > 3 and reports mean +- (population) standard
// deviation of the survivors.
struct MrdResult {
    std::vector<double> mrd;       // per input value
    std::vector<bool> flagged;     // MRD > 3
    std::vector<double> kept;      // surviving values, input order
    double median = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
};

MrdResult mrd_filter(const std::vector<double>& values);

// Evaluate each mode's TLS interpolation at every photon number on the grid
// and run one extraction per grid point.
std::vector<LossFactorSet> extract_vs_power(const ParticipationMatrix& matrix,
                                            const std::map<std::string, TlsFit>& mode_fits,
                                            const std::vector<double>& nbar_grid,
                                            const std::map<std::string, ChannelLoss>& fixed = {});

} // namespace lossforge
