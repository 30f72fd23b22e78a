#pragma once

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wisent/harness.hpp"

namespace wisent {

inline constexpr int kRecordSchemaVersion = 1;

namespace detail {

/// Fixed-notation formatting so repeated runs emit identical bytes.
inline std::string fmt(double v, int digits = 6) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

}  // namespace detail

inline nlohmann::json to_json(const MotionComponent& m) {
    return {{"plane", to_string(m.plane)},
            {"kind", to_string(m.kind)},
            {"fundamental_hz", m.fundamental_hz},
            {"displacement_amp_m", m.displacement_amp_m},
            {"onset_s", m.onset_s},
            {"duration_s", m.duration_s},
            {"fall_displacement_m", m.fall_displacement_m},
            {"seed", m.seed}};
}

inline nlohmann::json to_json(const GroundTruth& truth) {
    nlohmann::json motions = nlohmann::json::array();
    for (const auto& m : truth.motions) motions.push_back(to_json(m));
    return {{"label", truth.label},
            {"breathing_hz", truth.breathing_hz},
            {"tremor_hz", truth.tremor_hz},
            {"fall_onsets_s", truth.fall_onsets_s},
            {"motions", motions}};
}

inline nlohmann::json to_json(const TrialReport& report) {
    nlohmann::json j;
    j["schema_version"] = kRecordSchemaVersion;
    j["scenario_id"] = report.scenario_id;
    j["failed"] = report.failed;
    if (report.failed) {
        j["error"] = report.error;
        return j;
    }
    j["truth"] = to_json(report.truth);
    j["decision"] = to_string(report.decision);
    j["correct_label"] = report.correct_label;
    nlohmann::json ests = nlohmann::json::array();
    for (const auto& e : report.breathing_estimates)
        ests.push_back({{"window_start_s", e.window_start_s},
                        {"rate_hz", e.rate_hz},
                        {"rate_bpm", e.rate_bpm},
                        {"confidence", e.confidence}});
    j["breathing_estimates"] = ests;
    if (report.median_rate_bpm) j["median_rate_bpm"] = *report.median_rate_bpm;
    if (report.tremor_band) j["tremor_band"] = (*report.tremor_band == TremorBand::Low ? "low" : "high");
    nlohmann::json falls = nlohmann::json::array();
    for (const auto& f : report.falls) falls.push_back({{"time_s", f.time_s}, {"peak_z", f.peak_z}});
    j["falls"] = falls;
    if (report.abs_rate_error_bpm) j["abs_rate_error_bpm"] = *report.abs_rate_error_bpm;
    if (report.fall_latency_s) j["fall_latency_s"] = *report.fall_latency_s;
    std::ostringstream hashes;
    hashes << std::hex << std::setw(16) << std::setfill('0') << report.scenario_hash;
    j["scenario_hash"] = hashes.str();
    hashes.str("");
    hashes << std::hex << std::setw(16) << std::setfill('0') << report.pipeline_hash;
    j["pipeline_hash"] = hashes.str();
    return j;
}

inline nlohmann::json to_json(const SweepRow& row) {
    nlohmann::json per_class = nlohmann::json::object();
    for (const auto& [label, counts] : row.per_class)
        per_class[label] = {{"n", counts.first},
                            {"correct", counts.second},
                            {"accuracy", counts.first ? static_cast<double>(counts.second) /
                                                            static_cast<double>(counts.first)
                                                      : 0.0}};
    nlohmann::json j;
    j["axis_value"] = row.axis_value;
    j["snr_db"] = row.snr_db;
    j["n_trials"] = row.n_trials;
    j["n_failed"] = row.n_failed;
    j["per_class"] = per_class;
    j["overall_accuracy"] = row.overall_accuracy;
    if (row.mean_abs_rate_error_bpm) j["mean_abs_rate_error_bpm"] = *row.mean_abs_rate_error_bpm;
    if (row.fall_precision) j["fall_precision"] = *row.fall_precision;
    if (row.fall_recall) j["fall_recall"] = *row.fall_recall;
    if (row.mean_fall_latency_s) j["mean_fall_latency_s"] = *row.mean_fall_latency_s;
    return j;
}

inline nlohmann::json to_json(const SweepResult& result) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : result.rows) rows.push_back(to_json(row));
    return {{"schema_version", kRecordSchemaVersion},
            {"axis", to_string(result.spec.axis)},
            {"trials_per_point", result.spec.trials_per_point},
            {"seed_base", result.spec.seed_base},
            {"rows", rows}};
}

/// One aggregate row per axis value, tab-delimited.
inline void write_sweep_tsv(std::ostream& out, const SweepResult& result) {
    out << "axis_value\tsnr_db\tn_trials\tn_failed\toverall_accuracy\tmean_abs_rate_error_bpm"
        << "\tfall_precision\tfall_recall\tmean_fall_latency_s";
    // stable union of class labels across rows
    std::map<std::string, bool> labels;
    for (const auto& row : result.rows)
        for (const auto& [label, _] : row.per_class) labels[label] = true;
    for (const auto& [label, _] : labels) out << "\tacc_" << label;
    out << "\n";
    for (const auto& row : result.rows) {
        out << detail::fmt(row.axis_value) << "\t" << detail::fmt(row.snr_db) << "\t" << row.n_trials
            << "\t" << row.n_failed << "\t" << detail::fmt(row.overall_accuracy) << "\t"
            << (row.mean_abs_rate_error_bpm ? detail::fmt(*row.mean_abs_rate_error_bpm) : "-") << "\t"
            << (row.fall_precision ? detail::fmt(*row.fall_precision) : "-") << "\t"
            << (row.fall_recall ? detail::fmt(*row.fall_recall) : "-") << "\t"
            << (row.mean_fall_latency_s ? detail::fmt(*row.mean_fall_latency_s) : "-");
        for (const auto& [label, _] : labels) {
            if (row.per_class.count(label)) out << "\t" << detail::fmt(row.class_accuracy(label));
            else out << "\t-";
        }
        out << "\n";
    }
}

/// Line-delimited trial records.
inline void write_trials_jsonl(std::ostream& out, const SweepResult& result) {
    for (const auto& point : result.reports)
        for (const auto& report : point) out << to_json(report).dump() << "\n";
}

/// Per-window records as delimited text: start time, label, the activity
/// value (rate in bpm, tremor dominant in Hz, or fall time in s) and the
/// estimate confidence where one exists.
inline void write_window_tsv(std::ostream& out, const PipelineResult& res) {
    out << "window_start_s\tlabel\tvalue\tconfidence\n";
    for (const auto& w : res.windows) {
        out << detail::fmt(w.decision.window_start_s, 3) << "\t" << to_string(w.decision.label) << "\t";
        if (w.breathing)
            out << detail::fmt(w.breathing->rate_bpm) << "\t" << detail::fmt(w.breathing->confidence);
        else if (w.tremor)
            out << detail::fmt(w.tremor->dominant_hz) << "\t"
                << (w.tremor->band == TremorBand::Low ? "low" : "high");
        else if (w.fall)
            out << detail::fmt(w.fall->time_s, 3) << "\t" << detail::fmt(w.fall->peak_z, 2);
        else
            out << "-\t-";
        out << "\n";
    }
}

/// Per-window decision/estimate records for a replayed or single capture.
inline void write_window_records(std::ostream& out, const PipelineResult& res) {
    for (const auto& w : res.windows) {
        nlohmann::json j;
        j["schema_version"] = kRecordSchemaVersion;
        j["window_start_s"] = w.decision.window_start_s;
        j["label"] = to_string(w.decision.label);
        j["e1"] = {{"periodic", w.decision.evidence1.is_periodic},
                   {"dominant_hz", w.decision.evidence1.dominant_hz},
                   {"concentration", w.decision.evidence1.concentration},
                   {"activity", w.decision.evidence1.activity}};
        j["e2"] = {{"periodic", w.decision.evidence2.is_periodic},
                   {"dominant_hz", w.decision.evidence2.dominant_hz},
                   {"concentration", w.decision.evidence2.concentration},
                   {"activity", w.decision.evidence2.activity}};
        if (w.breathing)
            j["breathing"] = {{"rate_bpm", w.breathing->rate_bpm}, {"confidence", w.breathing->confidence}};
        if (w.tremor)
            j["tremor"] = {{"band", w.tremor->band == TremorBand::Low ? "low" : "high"},
                           {"dominant_hz", w.tremor->dominant_hz},
                           {"plane_agreement", w.tremor->plane_agreement}};
        if (w.fall) j["fall"] = {{"time_s", w.fall->time_s}, {"peak_z", w.fall->peak_z}};
        out << j.dump() << "\n";
    }
}

}  // namespace wisent
