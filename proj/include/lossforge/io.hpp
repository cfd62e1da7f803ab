#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lossforge/domain.hpp"
#include "lossforge/loss_extraction.hpp"
#include "lossforge/participation.hpp"
#include "lossforge/photon.hpp"
#include "lossforge/prediction.hpp"
#include "lossforge/sensitivity.hpp"
#include "lossforge/sweep_plan.hpp"
#include "lossforge/synth.hpp"
#include "lossforge/tls_model.hpp"

namespace lossforge::io {

namespace fs = std::filesystem;

// --- trace data ------------------------------------------------------------
// CSV with header `frequency_hz,s21_real,s21_imag`; comment lines start '#'.
FrequencyTrace read_trace_csv(const fs::path& path);
void write_trace_csv(const fs::path& path, const FrequencyTrace& trace);

// Sidecar document next to each trace: `<stem>.meta.json`.
struct TraceMeta {
    std::string label;
    std::optional<double> power_dbm_at_vna;
    std::optional<double> line_attenuation_db;
};
TraceMeta read_trace_sidecar(const fs::path& path);
void write_trace_sidecar(const fs::path& path, const TraceMeta& meta);
fs::path sidecar_path_for(const fs::path& trace_csv);

// Trace + sidecar, with dBm -> W conversion and attenuation subtraction done
// here at the boundary. The budget, when given, overrides the sidecar's flat
// line_attenuation_db.
FrequencyTrace read_trace_with_meta(const fs::path& path, const LineBudget* budget = nullptr);

// --- structured-text documents ----------------------------------------------
LineBudget read_line_budget(const fs::path& path);
void write_line_budget(const fs::path& path, const LineBudget& budget);

ParticipationMatrix read_participation(const fs::path& path);
void write_participation(const fs::path& path, const ParticipationMatrix& matrix);

// Loss-factor library / fixed-channel files: a list of channel entries.
std::map<std::string, ChannelLoss> read_channel_losses(const fs::path& path);
void write_channel_losses(const fs::path& path, const std::map<std::string, ChannelLoss>& losses);

// Mode records: CSV `mode_id,q_int,q_int_sigma[,photon_number]`; frequencies
// come from the participation matrix.
std::vector<ModeRecord> read_modes_csv(const fs::path& path, const ParticipationMatrix& matrix);
void write_modes_csv(const fs::path& path, const std::vector<ModeRecord>& modes);

synth::GroundTruth read_ground_truth(const fs::path& path);
void write_ground_truth(const fs::path& path, const synth::GroundTruth& truth);

// --- reports (machine-readable outputs of the CLI) --------------------------
void write_fit_report(const fs::path& path, const HangerFit& fit, const ValueSigma& q_int,
                      const FrequencyTrace& trace);
void write_loss_report(const fs::path& path, const LossFactorSet& factors,
                       const LossBudget* bud = nullptr);
void write_tls_report(const fs::path& path,
                      const std::map<std::string, TlsFit>& fits,
                      const std::map<std::string, std::vector<TlsDataPoint>>& points);
void write_sensitivity_report(const fs::path& path, const SensitivityMap& map);
void write_prediction_report(const fs::path& path, const Prediction& prediction);
void write_plan_csv(const fs::path& path, const SweepPlan& plan);
// VNA segment-table export: one line per adjacent point pair,
// `segment,start_hz,stop_hz,points`.
void write_vna_segments(const fs::path& path, const SweepPlan& plan);

} // namespace lossforge::io
