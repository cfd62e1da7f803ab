#pragma once

#include <map>
#include <string>
#include <vector>

#include "lossforge/domain.hpp"
#include "lossforge/loss_extraction.hpp"
#include "lossforge/participation.hpp"

namespace lossforge {

// Forward prediction: 1/Q_int = sum_i p_i Gamma_i per mode, T1 = Q/(2 pi f),
// with uncertainty from the loss-factor library.

struct ModePrediction {
    std::string mode_id;
    double frequency_hz = 0.0;
    double q_int = 0.0;
    double sigma_q = 0.0;
    double t1_s = 0.0;
    double sigma_t1 = 0.0;
};

struct Prediction {
    std::vector<ModePrediction> modes;
    LossBudget budget;
};

// Library factors are treated as independent across channels:
// sigma^2_{1/Q} = sum_i p_i^2 sigma_i^2. Throws "no-loss-model" when the
// library predicts zero total loss for a mode.
Prediction predict(const ParticipationMatrix& matrix,
                   const std::map<std::string, ChannelLoss>& library);

// When the factors come from one extraction, use the full covariance
// p^T C p for the free channels (fixed channels still add in quadrature).
Prediction predict(const ParticipationMatrix& matrix, const LossFactorSet& factors);

struct CompareReport {
    double q_loaded_measured = 0.0;
    double q_int_inferred = 0.0; // coupling loss removed
    double sigma_inferred = 0.0;
    double q_int_predicted = 0.0;
    double sigma_predicted = 0.0;
    double z_score = 0.0;                // (inferred - predicted) / combined sigma
    double coupling_loss_fraction = 0.0; // (1/Qc) / (1/QL)
};

// `measured` carries the loaded quality factor obtained from an energy-decay
// measurement (Q_L = 2 pi f T1) in its q_int field; the coupling loss is
// removed here. Throws "nonphysical" when coupling loss alone exceeds the
// measured loaded loss.
CompareReport compare_measured(const ModePrediction& prediction, const ModeRecord& measured,
                               double q_coupling);

} // namespace lossforge
