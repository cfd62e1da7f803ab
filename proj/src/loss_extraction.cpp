#include "lossforge/loss_extraction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "lossforge/errors.hpp"

namespace lossforge {

const FactorEstimate& LossFactorSet::at(const std::string& channel) const {
    const auto it = factors.find(channel);
    if (it == factors.end())
        fail_validation("channel-mismatch", "no loss factor for channel '" + channel + "'");
    return it->second;
}

LossFactorSet extract(const ParticipationMatrix& matrix, const std::vector<ModeRecord>& modes,
                      const std::map<std::string, ChannelLoss>& fixed) {
    const std::size_t n_modes = matrix.mode_count();
    if (modes.size() != n_modes)
        fail_validation("mode-mismatch",
                        "got " + std::to_string(modes.size()) + " mode records for a " +
                            std::to_string(n_modes) + "-mode matrix");

    // Align measured records with matrix rows by mode id.
    std::vector<const ModeRecord*> row(n_modes, nullptr);
    for (const auto& m : modes) {
        m.validate();
        const auto j = matrix.mode_index(m.mode_id);
        if (!j) fail_validation("mode-mismatch", "matrix has no mode '" + m.mode_id + "'");
        row[*j] = &m;
    }
    for (std::size_t j = 0; j < n_modes; ++j)
        if (!row[j])
            fail_validation("mode-mismatch", "missing record for mode '" + matrix.modes()[j].id + "'");

    for (const auto& [id, loss] : fixed) {
        (void)loss;
        if (!matrix.channel_index(id))
            fail_validation("channel-mismatch", "fixed channel '" + id + "' not in matrix");
    }

    std::vector<std::size_t> free_idx;
    for (std::size_t i = 0; i < matrix.channel_count(); ++i)
        if (!fixed.count(matrix.channels()[i].id)) free_idx.push_back(i);
    if (free_idx.empty()) fail_validation("channel-mismatch", "no free channels to extract");
    if (n_modes < free_idx.size())
        fail_validation("mode-mismatch", "fewer modes than free channels; system underdetermined");

    // kappa = 1/Q with fixed residual losses subtracted; their uncertainties
    // enter sigma_kappa in quadrature.
    Eigen::VectorXd kappa(n_modes), sigma(n_modes);
    bool all_sigma_zero = true;
    for (std::size_t j = 0; j < n_modes; ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        double k = 1.0 / row[j]->q_int;
        double var = std::pow(row[j]->q_int_sigma / (row[j]->q_int * row[j]->q_int), 2);
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            const auto it = fixed.find(matrix.channels()[i].id);
            if (it == fixed.end()) continue;
            const double p = matrix.value(j, i);
            k -= p * channel_loss_factor(matrix.channels()[i], it->second, f_j);
            var += std::pow(p * channel_loss_sigma(matrix.channels()[i], it->second, f_j), 2);
        }
        kappa[j] = k;
        sigma[j] = std::sqrt(var);
        if (sigma[j] > 0.0) all_sigma_zero = false;
    }
    if (all_sigma_zero) {
        sigma.setOnes(); // unweighted solve; covariance then reflects unit errors
    } else {
        for (std::size_t j = 0; j < n_modes; ++j)
            if (!(sigma[j] > 0.0))
                fail_validation("mode-bad-sigma",
                                "mode '" + matrix.modes()[j].id +
                                    "' has zero uncertainty while others do not");
    }

    Eigen::MatrixXd p_w(n_modes, free_idx.size());
    Eigen::VectorXd k_w(n_modes);
    for (std::size_t j = 0; j < n_modes; ++j) {
        for (std::size_t c = 0; c < free_idx.size(); ++c)
            p_w(j, c) = matrix.value(j, free_idx[c]) / sigma[j];
        k_w[j] = kappa[j] / sigma[j];
    }

    // Rank check on the column-equilibrated matrix: a channel with a tiny but
    // independent participation is identifiable (it just carries a large
    // uncertainty); only true collinearity is an error. On failure, name the
    // channels tangled in the null space.
    Eigen::VectorXd col_norm(free_idx.size());
    for (std::size_t c = 0; c < free_idx.size(); ++c) {
        col_norm[c] = p_w.col(c).norm();
        if (!(col_norm[c] > 0.0))
            fail_numerical("unidentifiable-channels",
                           "channel '" + matrix.channels()[free_idx[c]].id +
                               "' has zero participation in every mode");
    }
    const Eigen::MatrixXd p_eq = p_w * col_norm.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p_eq, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (!(sv[sv.size() - 1] > 1e-10 * sv[0])) {
        const Eigen::VectorXd null_vec = svd.matrixV().col(sv.size() - 1);
        std::string names;
        const double vmax = null_vec.cwiseAbs().maxCoeff();
        for (Eigen::Index c = 0; c < null_vec.size(); ++c) {
            if (std::abs(null_vec[c]) > 0.3 * vmax) {
                if (!names.empty()) names += ", ";
                names += matrix.channels()[free_idx[c]].id;
            }
        }
        fail_numerical("unidentifiable-channels",
                       "participation matrix cannot separate channels: " + names);
    }

    // C = (Pt P)^-1 computed through the equilibrated inverse.
    const Eigen::MatrixXd jtj_eq = p_eq.transpose() * p_eq;
    const Eigen::MatrixXd cov = col_norm.cwiseInverse().asDiagonal() * jtj_eq.inverse() *
                                col_norm.cwiseInverse().asDiagonal();
    const Eigen::VectorXd gamma = cov * (p_w.transpose() * k_w);

    LossFactorSet out;
    for (std::size_t c = 0; c < free_idx.size(); ++c)
        out.free_channels.push_back(matrix.channels()[free_idx[c]].id);
    out.covariance.assign(free_idx.size(), std::vector<double>(free_idx.size(), 0.0));
    for (std::size_t a = 0; a < free_idx.size(); ++a)
        for (std::size_t b = 0; b < free_idx.size(); ++b) out.covariance[a][b] = cov(a, b);

    for (std::size_t c = 0; c < free_idx.size(); ++c) {
        FactorEstimate est;
        est.loss.value = gamma[c];
        est.loss.sigma = std::sqrt(cov(c, c));
        est.fixed = false;
        est.consistent_with_zero = std::abs(est.loss.value) < 2.0 * est.loss.sigma;
        out.factors[matrix.channels()[free_idx[c]].id] = est;
    }
    for (const auto& [id, loss] : fixed) {
        FactorEstimate est;
        est.loss = loss;
        est.fixed = true;
        est.consistent_with_zero = std::abs(loss.value) < 2.0 * loss.sigma;
        out.factors[id] = est;
    }

    // Stamp the photon number when all records agree on one.
    bool have = true;
    double nbar = 0.0;
    for (std::size_t j = 0; j < n_modes; ++j) {
        if (!row[j]->photon_number) {
            have = false;
            break;
        }
        if (j == 0)
            nbar = *row[j]->photon_number;
        else if (*row[j]->photon_number != nbar)
            have = false;
    }
    if (have && n_modes > 0) out.photon_number = nbar;
    return out;
}

namespace {

LossBudget budget_impl(const ParticipationMatrix& matrix,
                       const std::function<ChannelLoss(const std::string&)>& lookup) {
    LossBudget out;
    for (const auto& c : matrix.channels()) out.channel_ids.push_back(c.id);
    for (const auto& m : matrix.modes()) out.mode_ids.push_back(m.id);
    out.fraction.assign(matrix.mode_count(), std::vector<double>(matrix.channel_count(), 0.0));
    out.absolute.assign(matrix.mode_count(), std::vector<double>(matrix.channel_count(), 0.0));
    out.total_inverse_q.assign(matrix.mode_count(), 0.0);
    for (std::size_t j = 0; j < matrix.mode_count(); ++j) {
        const double f_j = matrix.modes()[j].frequency_hz;
        double total = 0.0;
        for (std::size_t i = 0; i < matrix.channel_count(); ++i) {
            const ChannelLoss loss = lookup(matrix.channels()[i].id);
            const double contribution =
                matrix.value(j, i) * channel_loss_factor(matrix.channels()[i], loss, f_j);
            out.absolute[j][i] = contribution;
            total += contribution;
        }
        out.total_inverse_q[j] = total;
        if (total == 0.0)
            fail_validation("no-loss-model",
                            "mode '" + matrix.modes()[j].id + "' has zero total loss");
        for (std::size_t i = 0; i < matrix.channel_count(); ++i)
            out.fraction[j][i] = out.absolute[j][i] / total;
    }
    return out;
}

} // namespace

LossBudget budget(const ParticipationMatrix& matrix, const LossFactorSet& factors) {
    return budget_impl(matrix,
                       [&](const std::string& id) { return factors.at(id).loss; });
}

LossBudget budget(const ParticipationMatrix& matrix,
                  const std::map<std::string, ChannelLoss>& factors) {
    return budget_impl(matrix, [&](const std::string& id) {
        const auto it = factors.find(id);
        if (it == factors.end())
            fail_validation("channel-mismatch", "no loss factor for channel '" + id + "'");
        return it->second;
    });
}

MrdResult mrd_filter(const std::vector<double>& values) {
    if (values.size() < 3)
        fail_validation("mrd-too-few", "need at least 3 values, got " +
                                           std::to_string(values.size()));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    MrdResult out;
    out.median = median;
    out.mrd.resize(values.size());
    out.flagged.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (median != 0.0)
            out.mrd[i] = std::abs(values[i] - median) / std::abs(median);
        else
            out.mrd[i] = values[i] == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        out.flagged[i] = out.mrd[i] > 3.0;
        if (!out.flagged[i]) out.kept.push_back(values[i]);
    }
    double mean = 0.0;
    for (const double v : out.kept) mean += v;
    mean /= static_cast<double>(out.kept.size());
    double ss = 0.0;
    for (const double v : out.kept) ss += (v - mean) * (v - mean);
    out.mean = mean;
    out.stddev = std::sqrt(ss / static_cast<double>(out.kept.size()));
    return out;
}

std::vector<LossFactorSet> extract_vs_power(const ParticipationMatrix& matrix,
                                            const std::map<std::string, TlsFit>& mode_fits,
                                            const std::vector<double>& nbar_grid,
                                            const std::map<std::string, ChannelLoss>& fixed) {
    for (const auto& m : matrix.modes())
        if (!mode_fits.count(m.id))
            fail_validation("mode-mismatch", "no TLS fit for mode '" + m.id + "'");

    std::vector<LossFactorSet> out;
    out.reserve(nbar_grid.size());
    for (const double nbar : nbar_grid) {
        std::vector<ModeRecord> records;
        records.reserve(matrix.mode_count());
        for (const auto& m : matrix.modes()) {
            const ValueSigma q = q_int_at(mode_fits.at(m.id), nbar);
            records.push_back({m.id, m.frequency_hz, q.value, q.sigma, nbar});
        }
        LossFactorSet set = extract(matrix, records, fixed);
        set.photon_number = nbar;
        out.push_back(std::move(set));
    }
    return out;
}

} // namespace lossforge
