#include "lossforge/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lossforge/errors.hpp"

namespace lossforge::io {

using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_validation("file-missing", "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_validation("file-unwritable", "cannot write '" + path.string() + "'");
    out << contents;
}

json parse_json(const fs::path& path) {
    try {
        return json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail_validation("file-bad-json", path.string() + ": " + e.what());
    }
}

void dump_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, sep)) out.push_back(field);
    return out;
}

double to_double(const std::string& s, const fs::path& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        return v;
    } catch (const std::exception&) {
        fail_validation("file-bad-number", path.string() + ": cannot parse '" + s + "'");
    }
}

} // namespace

FrequencyTrace read_trace_csv(const fs::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<TracePoint> pts;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.find("frequency_hz") != std::string::npos) continue; // header row
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            fail_validation("file-bad-row", path.string() + ": expected 3 columns, got line '" +
                                                line + "'");
        pts.push_back({to_double(fields[0], path),
                       {to_double(fields[1], path), to_double(fields[2], path)}});
    }
    return FrequencyTrace(std::move(pts));
}

void write_trace_csv(const fs::path& path, const FrequencyTrace& trace) {
    std::ostringstream out;
    out << "frequency_hz,s21_real,s21_imag\n";
    for (const auto& p : trace.points())
        out << fmt(p.frequency_hz) << ',' << fmt(p.s21.real()) << ',' << fmt(p.s21.imag())
            << '\n';
    write_file(path, out.str());
}

fs::path sidecar_path_for(const fs::path& trace_csv) {
    fs::path p = trace_csv;
    p.replace_extension(".meta.json");
    return p;
}

TraceMeta read_trace_sidecar(const fs::path& path) {
    const json j = parse_json(path);
    TraceMeta meta;
    meta.label = j.value("label", std::string{});
    if (j.contains("power_dbm_at_vna")) meta.power_dbm_at_vna = j["power_dbm_at_vna"].get<double>();
    if (j.contains("line_attenuation_db"))
        meta.line_attenuation_db = j["line_attenuation_db"].get<double>();
    return meta;
}

void write_trace_sidecar(const fs::path& path, const TraceMeta& meta) {
    json j;
    j["label"] = meta.label;
    if (meta.power_dbm_at_vna) j["power_dbm_at_vna"] = *meta.power_dbm_at_vna;
    if (meta.line_attenuation_db) j["line_attenuation_db"] = *meta.line_attenuation_db;
    dump_json(path, j);
}

FrequencyTrace read_trace_with_meta(const fs::path& path, const LineBudget* budget) {
    FrequencyTrace bare = read_trace_csv(path);
    const fs::path side = sidecar_path_for(path);
    if (!fs::exists(side)) return bare;
    const TraceMeta meta = read_trace_sidecar(side);
    std::optional<double> power_w;
    if (meta.power_dbm_at_vna) {
        const double center = 0.5 * (bare.min_frequency() + bare.max_frequency());
        double attenuation = 0.0;
        if (budget)
            attenuation = budget->attenuation_db_at(center);
        else if (meta.line_attenuation_db)
            attenuation = *meta.line_attenuation_db;
        power_w = dbm_to_watts(*meta.power_dbm_at_vna - attenuation);
    }
    std::vector<TracePoint> pts = bare.points();
    return FrequencyTrace(std::move(pts), power_w, meta.label);
}

LineBudget read_line_budget(const fs::path& path) {
    const json j = parse_json(path);
    LineBudget budget;
    budget.vna_power_dbm = j.at("vna_power_dbm").get<double>();
    for (const auto& row : j.at("attenuation_table"))
        budget.attenuation_table.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
    budget.uncertainty_db = j.value("uncertainty_db", 0.0);
    budget.validate();
    return budget;
}

void write_line_budget(const fs::path& path, const LineBudget& budget) {
    json j;
    j["vna_power_dbm"] = budget.vna_power_dbm;
    j["attenuation_table"] = json::array();
    for (const auto& [hz, db] : budget.attenuation_table)
        j["attenuation_table"].push_back({hz, db});
    j["uncertainty_db"] = budget.uncertainty_db;
    dump_json(path, j);
}

ParticipationMatrix read_participation(const fs::path& path) {
    const json j = parse_json(path);
    std::vector<ModeInfo> modes;
    for (const auto& m : j.at("modes"))
        modes.push_back({m.at("id").get<std::string>(), m.at("freq_hz").get<double>()});
    std::vector<LossChannel> channels;
    for (const auto& c : j.at("channels"))
        channels.push_back({c.at("id").get<std::string>(),
                            channel_kind_from_name(c.at("kind").get<std::string>())});
    std::vector<std::vector<double>> values;
    for (const auto& row : j.at("values")) values.push_back(row.get<std::vector<double>>());
    return ParticipationMatrix(std::move(modes), std::move(channels), std::move(values));
}

void write_participation(const fs::path& path, const ParticipationMatrix& matrix) {
    json j;
    j["modes"] = json::array();
    for (const auto& m : matrix.modes())
        j["modes"].push_back({{"id", m.id}, {"freq_hz", m.frequency_hz}});
    j["channels"] = json::array();
    for (const auto& c : matrix.channels())
        j["channels"].push_back({{"id", c.id}, {"kind", channel_kind_name(c.kind)}});
    j["values"] = matrix.values();
    dump_json(path, j);
}

std::map<std::string, ChannelLoss> read_channel_losses(const fs::path& path) {
    const json j = parse_json(path);
    const json& entries = j.is_array() ? j : j.at("factors");
    std::map<std::string, ChannelLoss> out;
    for (const auto& e : entries) {
        ChannelLoss loss;
        loss.value = e.at("value").get<double>();
        loss.sigma = e.value("sigma", 0.0);
        loss.penetration_depth_m = e.value("penetration_depth_m", 0.0);
        loss.provenance = e.value("provenance", std::string{});
        out[e.at("channel").get<std::string>()] = loss;
    }
    return out;
}

void write_channel_losses(const fs::path& path,
                          const std::map<std::string, ChannelLoss>& losses) {
    json entries = json::array();
    for (const auto& [id, loss] : losses) {
        json e;
        e["channel"] = id;
        e["value"] = loss.value;
        e["sigma"] = loss.sigma;
        if (loss.penetration_depth_m > 0.0) e["penetration_depth_m"] = loss.penetration_depth_m;
        if (!loss.provenance.empty()) e["provenance"] = loss.provenance;
        entries.push_back(e);
    }
    dump_json(path, json{{"factors", entries}});
}

std::vector<ModeRecord> read_modes_csv(const fs::path& path, const ParticipationMatrix& matrix) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<ModeRecord> out;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            if (line.find("mode_id") != std::string::npos) continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() < 3)
            fail_validation("file-bad-row",
                            path.string() + ": expected mode_id,q_int,q_int_sigma");
        ModeRecord rec;
        rec.mode_id = fields[0];
        const auto idx = matrix.mode_index(rec.mode_id);
        if (!idx)
            fail_validation("mode-mismatch",
                            path.string() + ": matrix has no mode '" + rec.mode_id + "'");
        rec.frequency_hz = matrix.modes()[*idx].frequency_hz;
        rec.q_int = to_double(fields[1], path);
        rec.q_int_sigma = to_double(fields[2], path);
        if (fields.size() > 3 && !fields[3].empty())
            rec.photon_number = to_double(fields[3], path);
        out.push_back(rec);
    }
    return out;
}

void write_modes_csv(const fs::path& path, const std::vector<ModeRecord>& modes) {
    std::ostringstream out;
    out << "mode_id,q_int,q_int_sigma,photon_number\n";
    for (const auto& m : modes) {
        out << m.mode_id << ',' << fmt(m.q_int) << ',' << fmt(m.q_int_sigma) << ',';
        if (m.photon_number) out << fmt(*m.photon_number);
        out << '\n';
    }
    write_file(path, out.str());
}

synth::GroundTruth read_ground_truth(const fs::path& path) {
    const json j = parse_json(path);
    synth::GroundTruth truth;
    for (const auto& m : j.at("modes")) {
        synth::ModeTruth mode;
        mode.id = m.at("id").get<std::string>();
        const auto& h = m.at("hanger");
        mode.hanger.fr_hz = h.at("fr_hz").get<double>();
        mode.hanger.q_loaded = h.value("q_loaded", 0.0);
        mode.hanger.q_coupling_mag = h.at("q_coupling_mag").get<double>();
        mode.hanger.phi = h.value("phi", 0.0);
        mode.hanger.amplitude_a = h.value("amplitude_a", 1.0);
        mode.hanger.alpha = h.value("alpha", 0.0);
        mode.hanger.tau_s = h.value("tau_s", 0.0);
        if (m.contains("tls")) {
            const auto& t = m["tls"];
            mode.tls.q0_inv = t.at("q0_inv").get<double>();
            mode.tls.tls_amplitude = t.value("tls_amplitude", 0.0);
            mode.tls.n_critical = t.value("n_critical", 1.0);
            mode.tls.beta = t.value("beta", 1.0);
        }
        truth.modes.push_back(mode);
    }
    if (j.contains("channel_factors")) {
        for (const auto& [id, v] : j["channel_factors"].items()) {
            ChannelLoss loss;
            if (v.is_number()) {
                loss.value = v.get<double>();
            } else {
                loss.value = v.at("value").get<double>();
                loss.penetration_depth_m = v.value("penetration_depth_m", 0.0);
            }
            truth.channel_factors[id] = loss;
        }
    }
    if (j.contains("surface_tls")) {
        const auto& s = j["surface_tls"];
        truth.surface_tls = synth::SurfaceTls{s.at("tan_delta_tls").get<double>(),
                                              s.at("n_critical").get<double>(),
                                              s.at("beta").get<double>()};
    }
    truth.noise_sigma = j.value("noise_sigma", 0.0);
    truth.seed = j.value("seed", 0ull);
    truth.points_per_trace = j.value("points_per_trace", 201);
    truth.span_linewidths = j.value("span_linewidths", 8.0);
    return truth;
}

void write_ground_truth(const fs::path& path, const synth::GroundTruth& truth) {
    json j;
    j["modes"] = json::array();
    for (const auto& m : truth.modes) {
        json h{{"fr_hz", m.hanger.fr_hz},
               {"q_loaded", m.hanger.q_loaded},
               {"q_coupling_mag", m.hanger.q_coupling_mag},
               {"phi", m.hanger.phi},
               {"amplitude_a", m.hanger.amplitude_a},
               {"alpha", m.hanger.alpha},
               {"tau_s", m.hanger.tau_s}};
        json t{{"q0_inv", m.tls.q0_inv},
               {"tls_amplitude", m.tls.tls_amplitude},
               {"n_critical", m.tls.n_critical},
               {"beta", m.tls.beta}};
        j["modes"].push_back({{"id", m.id}, {"hanger", h}, {"tls", t}});
    }
    if (!truth.channel_factors.empty()) {
        json cf;
        for (const auto& [id, v] : truth.channel_factors) {
            if (v.penetration_depth_m > 0.0)
                cf[id] = {{"value", v.value}, {"penetration_depth_m", v.penetration_depth_m}};
            else
                cf[id] = v.value;
        }
        j["channel_factors"] = cf;
    }
    if (truth.surface_tls)
        j["surface_tls"] = {{"tan_delta_tls", truth.surface_tls->tan_delta_tls},
                            {"n_critical", truth.surface_tls->n_critical},
                            {"beta", truth.surface_tls->beta}};
    j["noise_sigma"] = truth.noise_sigma;
    j["seed"] = truth.seed;
    j["points_per_trace"] = truth.points_per_trace;
    j["span_linewidths"] = truth.span_linewidths;
    dump_json(path, j);
}

void write_fit_report(const fs::path& path, const HangerFit& fit, const ValueSigma& q_int,
                      const FrequencyTrace& trace) {
    json j;
    j["label"] = trace.label();
    j["parameters"] = {{"fr_hz", fit.params.fr_hz},
                       {"q_loaded", fit.params.q_loaded},
                       {"q_coupling_mag", fit.params.q_coupling_mag},
                       {"phi", fit.params.phi},
                       {"amplitude_a", fit.params.amplitude_a},
                       {"alpha", fit.params.alpha},
                       {"tau_s", fit.params.tau_s}};
    j["sigma"] = {{"fr_hz", fit.sigma.fr_hz},
                  {"q_loaded", fit.sigma.q_loaded},
                  {"q_coupling_mag", fit.sigma.q_coupling_mag},
                  {"phi", fit.sigma.phi},
                  {"amplitude_a", fit.sigma.amplitude_a},
                  {"alpha", fit.sigma.alpha},
                  {"tau_s", fit.sigma.tau_s}};
    j["q_int"] = {{"value", q_int.value}, {"sigma", q_int.sigma}};
    if (trace.drive_power_w()) j["drive_power_w"] = *trace.drive_power_w();
    dump_json(path, j);
}

namespace {

json factor_set_json(const LossFactorSet& factors) {
    json jf;
    for (const auto& [id, est] : factors.factors) {
        jf[id] = {{"value", est.loss.value},
                  {"sigma", est.loss.sigma},
                  {"fixed", est.fixed},
                  {"consistent_with_zero", est.consistent_with_zero}};
        if (!est.loss.provenance.empty()) jf[id]["provenance"] = est.loss.provenance;
    }
    json j;
    j["factors"] = jf;
    j["free_channels"] = factors.free_channels;
    j["covariance"] = factors.covariance;
    if (std::isfinite(factors.photon_number)) j["photon_number"] = factors.photon_number;
    return j;
}

json budget_json(const LossBudget& bud) {
    json j;
    j["channels"] = bud.channel_ids;
    j["modes"] = json::array();
    for (std::size_t m = 0; m < bud.mode_ids.size(); ++m) {
        json row;
        row["mode_id"] = bud.mode_ids[m];
        row["total_inverse_q"] = bud.total_inverse_q[m];
        row["fraction"] = bud.fraction[m];
        row["absolute"] = bud.absolute[m];
        j["modes"].push_back(row);
    }
    return j;
}

} // namespace

void write_loss_report(const fs::path& path, const LossFactorSet& factors,
                       const LossBudget* bud) {
    json j = factor_set_json(factors);
    if (bud) j["budget"] = budget_json(*bud);
    dump_json(path, j);
}

void write_tls_report(const fs::path& path, const std::map<std::string, TlsFit>& fits,
                      const std::map<std::string, std::vector<TlsDataPoint>>& points) {
    json j;
    for (const auto& [mode, fit] : fits) {
        json f;
        f["params"] = {{"q0_inv", fit.params.q0_inv},
                       {"tls_amplitude", fit.params.tls_amplitude},
                       {"n_critical", fit.params.n_critical},
                       {"beta", fit.params.beta}};
        f["sigma"] = {{"q0_inv", fit.sigma.q0_inv},
                      {"tls_amplitude", fit.sigma.tls_amplitude},
                      {"n_critical", fit.sigma.n_critical},
                      {"beta", fit.sigma.beta}};
        f["beta_in_usual_range"] = fit.beta_in_usual_range;
        const auto it = points.find(mode);
        if (it != points.end()) {
            json rows = json::array();
            for (const auto& p : it->second)
                rows.push_back({{"nbar", p.nbar}, {"q_int", p.q_int}, {"sigma", p.q_int_sigma}});
            f["points"] = rows;
        }
        j["modes"][mode] = f;
    }
    dump_json(path, j);
}

void write_sensitivity_report(const fs::path& path, const SensitivityMap& map) {
    json j;
    j["channel_x"] = map.grid.channel_x;
    j["channel_y"] = map.grid.channel_y;
    j["x_values"] = map.x_values;
    j["y_values"] = map.y_values;
    j["fractional_error_x"] = map.fractional_error_x;
    j["fractional_error_y"] = map.fractional_error_y;
    j["meas_fractional_sigma"] = map.meas_fractional_sigma;
    const double fx = map.floor_x();
    const double fy = map.floor_y();
    if (std::isfinite(fx)) j["floor_x"] = fx;
    if (std::isfinite(fy)) j["floor_y"] = fy;
    dump_json(path, j);
}

void write_prediction_report(const fs::path& path, const Prediction& prediction) {
    json j;
    j["modes"] = json::array();
    for (const auto& m : prediction.modes)
        j["modes"].push_back({{"mode_id", m.mode_id},
                              {"frequency_hz", m.frequency_hz},
                              {"q_int", m.q_int},
                              {"sigma_q", m.sigma_q},
                              {"t1_s", m.t1_s},
                              {"sigma_t1_s", m.sigma_t1}});
    j["budget"] = budget_json(prediction.budget);
    dump_json(path, j);
}

void write_plan_csv(const fs::path& path, const SweepPlan& plan) {
    std::ostringstream out;
    out << "# scheme=" << scheme_name(plan.scheme) << " center_hz=" << fmt(plan.center_hz)
        << " span_hz=" << fmt(plan.span_hz) << " weight=" << fmt(plan.weight) << "\n";
    out << "frequency_hz\n";
    for (const double f : plan.points_hz) out << fmt(f) << '\n';
    write_file(path, out.str());
}

void write_vna_segments(const fs::path& path, const SweepPlan& plan) {
    std::ostringstream out;
    out << "segment,start_hz,stop_hz,points\n";
    for (std::size_t i = 1; i < plan.points_hz.size(); ++i)
        out << i << ',' << fmt(plan.points_hz[i - 1]) << ',' << fmt(plan.points_hz[i]) << ",2\n";
    write_file(path, out.str());
}

} // namespace lossforge::io
