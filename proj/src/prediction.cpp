#include "lossforge/prediction.hpp"

#include <cmath>
#include <limits>

#include "lossforge/constants.hpp"
#include "lossforge/errors.hpp"

namespace lossforge {

namespace {

Prediction predict_impl(const ParticipationMatrix& matrix, const LossBudget& bud,
                        const std::vector<double>& variance_per_mode) {
    Prediction out;
    out.budget = bud;
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        ModePrediction mp;
        mp.mode_id = matrix.modes()[j].id;
        mp.frequency_hz = matrix.modes()[j].frequency_hz;
        const double kappa = bud.total_inverse_q[j];
        mp.q_int = 1.0 / kappa;
        mp.sigma_q = std::sqrt(variance_per_mode[j]) * mp.q_int * mp.q_int;
        const double omega = angular(mp.frequency_hz);
        mp.t1_s = mp.q_int / omega;
        mp.sigma_t1 = mp.sigma_q / omega;
        out.modes.push_back(mp);
    }
    return out;
}

} // namespace

Prediction predict(const ParticipationMatrix& matrix,
                   const std::map<std::string, ChannelLoss>& library) {
    for (const auto& c : matrix.channels())
        if (!library.count(c.id))
            fail_validation("channel-mismatch", "library is missing channel '" + c.id + "'");
    const LossBudget bud = budget(matrix, library); // throws no-loss-model on zero loss
    std::vector<double> variance(matrix.mode_count(), 0.0);
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            const double p = matrix.value(j, i);
            const double s =
                channel_loss_sigma(matrix.channels()[i], library.at(matrix.channels()[i].id), f_j);
            variance[j] += p * p * s * s;
        }
    }
    return predict_impl(matrix, bud, variance);
}

Prediction predict(const ParticipationMatrix& matrix, const LossFactorSet& factors) {
    const LossBudget bud = budget(matrix, factors);
    std::vector<double> variance(matrix.mode_count(), 0.0);
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        // Free channels: full quadratic form p^T C p over the extraction
        // covariance. Fixed channels: independent, in quadrature.
        const auto& free = factors.free_channels;
        std::vector<double> p_free(free.size(), 0.0);
        for (std::size_t a = 0; a < free.size(); ++a) {
            const auto idx = matrix.channel_index(free[a]);
            if (idx) p_free[a] = matrix.value(j, *idx);
        }
        for (std::size_t a = 0; a < free.size(); ++a)
            for (std::size_t b = 0; b < free.size(); ++b)
                variance[j] += p_free[a] * factors.covariance[a][b] * p_free[b];
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            const auto& est = factors.at(matrix.channels()[i].id);
            if (!est.fixed) continue;
            const double s = channel_loss_sigma(matrix.channels()[i], est.loss, f_j);
            variance[j] += matrix.value(j, i) * matrix.value(j, i) * s * s;
        }
    }
    return predict_impl(matrix, bud, variance);
}

CompareReport compare_measured(const ModePrediction& prediction, const ModeRecord& measured,
                               double q_coupling) {
    if (!(q_coupling > 0.0))
        fail_validation("compare-bad-qc", "coupling Q must be positive");
    measured.validate();

    CompareReport rep;
    rep.q_loaded_measured = measured.q_int;
    const double kappa_loaded = 1.0 / measured.q_int;
    const double kappa_coupling = std::isinf(q_coupling) ? 0.0 : 1.0 / q_coupling;
    const double kappa_int = kappa_loaded - kappa_coupling;
    if (!(kappa_int > 0.0))
        fail_numerical("nonphysical",
                       "measured loaded loss does not exceed the coupling loss");
    rep.q_int_inferred = 1.0 / kappa_int;
    rep.coupling_loss_fraction = kappa_coupling / kappa_loaded;

    const double sigma_kappa =
        measured.q_int_sigma / (measured.q_int * measured.q_int);
    rep.sigma_inferred = sigma_kappa * rep.q_int_inferred * rep.q_int_inferred;
    rep.q_int_predicted = prediction.q_int;
    rep.sigma_predicted = prediction.sigma_q;

    const double diff = rep.q_int_inferred - rep.q_int_predicted;
    const double sigma_tot = std::sqrt(rep.sigma_inferred * rep.sigma_inferred +
                                       rep.sigma_predicted * rep.sigma_predicted);
    if (sigma_tot > 0.0)
        rep.z_score = diff / sigma_tot;
    else
        rep.z_score = diff == 0.0 ? 0.0
                                  : std::copysign(std::numeric_limits<double>::infinity(), diff);
    return rep;
}

} // namespace lossforge
