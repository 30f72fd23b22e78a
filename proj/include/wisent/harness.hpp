#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "wisent/config.hpp"
#include "wisent/io.hpp"
#include "wisent/pipeline.hpp"
#include "wisent/rng.hpp"
#include "wisent/signal_model.hpp"
#include "wisent/types.hpp"

namespace wisent {

inline Activity activity_from_string(const std::string& s) {
    if (s == "no_activity" || s == "none") return Activity::NoActivity;
    if (s == "random_motion" || s == "random") return Activity::RandomMotion;
    if (s == "breathing") return Activity::Breathing;
    if (s == "tremor") return Activity::Tremor;
    if (s == "fall") return Activity::Fall;
    throw std::invalid_argument("unknown activity label: " + s);
}

/**
 * Per-trial outcome: ground truth against the pipeline decision, whatever
 * estimates were produced, and the config hashes needed to reproduce the
 * trial exactly. Failed trials carry the error text instead of aborting a
 * sweep.
 */
struct TrialReport {
    std::string scenario_id;
    GroundTruth truth;
    Activity decision = Activity::NoActivity;
    std::vector<BreathingEstimate> breathing_estimates;
    std::optional<double> median_rate_bpm;
    std::optional<TremorBand> tremor_band;
    std::vector<FallReport> falls;
    bool correct_label = false;
    std::optional<double> abs_rate_error_bpm;
    std::optional<double> fall_latency_s;
    std::uint64_t scenario_hash = 0;
    std::uint64_t pipeline_hash = 0;
    bool failed = false;
    std::string error;
};

/// Runs one scenario through the full pipeline and scores it against truth.
/// When result_out is given, the intermediate pipeline output is kept there.
inline TrialReport run_trial(const ScenarioSpec& spec, const PipelineConfig& cfg,
                             const std::string& scenario_id = "trial",
                             PipelineResult* result_out = nullptr) {
    TrialReport report;
    report.scenario_id = scenario_id;
    report.scenario_hash = fnv1a_hash(scenario_to_config_text(spec));
    report.pipeline_hash = fnv1a_hash(pipeline_to_config_text(cfg));
    try {
        PipelineConfig run_cfg = cfg;
        run_cfg.lag_samples = spec.lag_samples;
        const ScenarioSignals sig = synth_scenario(spec);
        report.truth = sig.truth;
        const PipelineResult res = analyze_buffers(sig.ref, sig.surv1, sig.surv2, run_cfg);
        if (res.windows.empty())
            throw InsufficientWindow("trial shorter than the normalization warm-up plus one decision window");

        report.decision = overall_label(res);
        for (const auto& w : res.windows)
            if (w.breathing) report.breathing_estimates.push_back(*w.breathing);
        report.tremor_band = majority_tremor_band(res);
        report.falls = res.falls;

        if (const auto rate = median_breathing_hz(res)) report.median_rate_bpm = 60.0 * *rate;
        report.correct_label = report.decision == activity_from_string(sig.truth.label);
        if (sig.truth.breathing_hz > 0.0 && report.median_rate_bpm)
            report.abs_rate_error_bpm = std::abs(*report.median_rate_bpm - 60.0 * sig.truth.breathing_hz);
        if (!sig.truth.fall_onsets_s.empty() && !report.falls.empty())
            report.fall_latency_s = std::abs(report.falls.front().time_s - sig.truth.fall_onsets_s.front());
        if (result_out) *result_out = res;
    } catch (const std::exception& e) {
        report.failed = true;
        report.error = e.what();
    }
    return report;
}

enum class SweepAxis { SnrDb, DistanceM, TxPowerDbm };

inline const char* to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::SnrDb: return "snr_db";
        case SweepAxis::DistanceM: return "distance_m";
        case SweepAxis::TxPowerDbm: return "tx_power_dbm";
    }
    return "?";
}

inline SweepAxis axis_from_string(const std::string& s) {
    if (s == "snr_db") return SweepAxis::SnrDb;
    if (s == "distance_m") return SweepAxis::DistanceM;
    if (s == "tx_power_dbm") return SweepAxis::TxPowerDbm;
    throw std::invalid_argument("unknown sweep axis: " + s);
}

/// Ranges used when a sweep redraws per-trial motion parameters.
struct TrialRandomization {
    double breathing_lo_hz = 0.2;   // 12 breaths/min
    double breathing_hi_hz = 0.5;   // 30 breaths/min
    double tremor_lo_hz = 4.0;
    double tremor_hi_hz = 11.0;
    double tremor_excl_lo_hz = 0.0; // excluded interval, inactive when lo >= hi
    double tremor_excl_hi_hz = 0.0;
    double fall_min_onset_s = 12.0;
    double fall_end_clearance_s = 6.0;
};

/**
 * A batch evaluation over one experimental axis. Distance and transmit
 * power are synthetic analogs mapped onto SNR:
 *   distance:  snr = snr_ref_db - 20*log10(d / d_ref_m)   (free-space-like)
 *   tx power:  snr = snr_offset_db + p_dbm                (AWGN equivalence)
 * mix names the activity class synthesized per trial, cycled in order;
 * empty mix replays base_scenario motions unchanged.
 */
struct SweepSpec {
    SweepAxis axis = SweepAxis::SnrDb;
    std::vector<double> values;
    std::size_t trials_per_point = 10;
    ScenarioSpec base_scenario;
    std::uint64_t seed_base = 1;
    double snr_ref_db = 20.0;
    double d_ref_m = 1.0;
    double snr_offset_db = 0.0;
    std::vector<std::string> mix;
    TrialRandomization randomize;
};

inline double snr_for_axis_value(const SweepSpec& sweep, double value) {
    switch (sweep.axis) {
        case SweepAxis::SnrDb: return value;
        case SweepAxis::DistanceM:
            if (value <= 0.0) throw std::invalid_argument("sweep: distance must be > 0");
            return sweep.snr_ref_db - 20.0 * std::log10(value / sweep.d_ref_m);
        case SweepAxis::TxPowerDbm: return sweep.snr_offset_db + value;
    }
    return value;
}

namespace detail {

inline double draw_excluding(Rng& rng, double lo, double hi, double ex_lo, double ex_hi) {
    if (ex_lo >= ex_hi || ex_hi <= lo || ex_lo >= hi) return rng.uniform(lo, hi);
    const double left = std::max(0.0, ex_lo - lo);
    const double right = std::max(0.0, hi - ex_hi);
    const double u = rng.uniform(0.0, left + right);
    return u < left ? lo + u : ex_hi + (u - left);
}

}  // namespace detail

/// Builds the canonical scenario for one activity class, with per-trial
/// parameters drawn from the trial seed.
inline ScenarioSpec make_class_scenario(const ScenarioSpec& base, const std::string& cls,
                                        std::uint64_t trial_seed, const TrialRandomization& rnd) {
    ScenarioSpec spec = base;
    spec.seed = trial_seed;
    spec.motions.clear();
    Rng rng(substream(trial_seed, 101));
    const Activity activity = activity_from_string(cls);

    auto add_breathing = [&]() {
        MotionComponent m;
        m.kind = MotionKind::Breathing;
        m.plane = MotionPlane::XY;
        m.fundamental_hz = rng.uniform(rnd.breathing_lo_hz, rnd.breathing_hi_hz);
        m.displacement_amp_m = 0.005;
        m.onset_s = 0.0;
        m.duration_s = spec.duration_s;
        spec.motions.push_back(m);
    };

    switch (activity) {
        case Activity::NoActivity:
            break;
        case Activity::RandomMotion: {
            for (MotionPlane plane : {MotionPlane::XY, MotionPlane::XZ}) {
                MotionComponent m;
                m.kind = MotionKind::RandomLimb;
                m.plane = plane;
                m.displacement_amp_m = 0.02;
                m.onset_s = 0.0;
                m.duration_s = spec.duration_s;
                spec.motions.push_back(m);
            }
            break;
        }
        case Activity::Breathing:
            add_breathing();
            break;
        case Activity::Tremor: {
            const double hz = detail::draw_excluding(rng, rnd.tremor_lo_hz, rnd.tremor_hi_hz,
                                                     rnd.tremor_excl_lo_hz, rnd.tremor_excl_hi_hz);
            for (MotionPlane plane : {MotionPlane::XY, MotionPlane::XZ}) {
                MotionComponent m;
                m.kind = MotionKind::Tremor;
                m.plane = plane;
                m.fundamental_hz = hz;
                m.displacement_amp_m = 0.002;
                m.onset_s = 0.0;
                m.duration_s = spec.duration_s;
                spec.motions.push_back(m);
            }
            break;
        }
        case Activity::Fall: {
            add_breathing();
            MotionComponent m;
            m.kind = MotionKind::Fall;
            m.plane = MotionPlane::XZ;
            m.fundamental_hz = 0.0;
            m.fall_displacement_m = 0.5;
            m.duration_s = 0.5;
            const double latest = spec.duration_s - rnd.fall_end_clearance_s;
            m.onset_s = rng.uniform(rnd.fall_min_onset_s, std::max(rnd.fall_min_onset_s + 0.1, latest));
            spec.motions.push_back(m);
            break;
        }
    }
    return spec;
}

/// Aggregate metrics for one axis value.
struct SweepRow {
    double axis_value = 0.0;
    double snr_db = 0.0;
    std::size_t n_trials = 0;
    std::size_t n_failed = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // label -> {n, correct}
    double overall_accuracy = 0.0;
    std::optional<double> mean_abs_rate_error_bpm;
    std::optional<double> fall_precision;
    std::optional<double> fall_recall;
    std::optional<double> mean_fall_latency_s;

    double class_accuracy(const std::string& label) const {
        auto it = per_class.find(label);
        if (it == per_class.end() || it->second.first == 0) return 0.0;
        return static_cast<double>(it->second.second) / static_cast<double>(it->second.first);
    }
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
    std::vector<std::vector<TrialReport>> reports;  // per axis value
};

/**
 * Runs trials_per_point trials at every axis value. Trial seeds are
 * seed_base + global trial index, so the whole sweep is a pure function of
 * its spec; a failing trial is recorded and the sweep continues.
 */
inline SweepResult run_sweep(const SweepSpec& sweep, const PipelineConfig& cfg) {
    if (sweep.values.empty()) throw std::invalid_argument("sweep: no axis values");
    if (sweep.trials_per_point == 0) throw std::invalid_argument("sweep: trials_per_point must be > 0");

    SweepResult result;
    result.spec = sweep;
    std::size_t global_index = 0;
    for (std::size_t vi = 0; vi < sweep.values.size(); ++vi) {
        const double value = sweep.values[vi];
        const double snr = snr_for_axis_value(sweep, value);
        SweepRow row;
        row.axis_value = value;
        row.snr_db = snr;
        std::vector<TrialReport> reports;
        reports.reserve(sweep.trials_per_point);

        double rate_err_sum = 0.0;
        std::size_t rate_err_n = 0;
        std::size_t fall_tp = 0, fall_fp = 0, fall_fn = 0;
        double latency_sum = 0.0;
        std::size_t latency_n = 0;
        std::size_t correct = 0, scored = 0;

        for (std::size_t t = 0; t < sweep.trials_per_point; ++t, ++global_index) {
            const std::uint64_t seed = sweep.seed_base + global_index;
            ScenarioSpec spec;
            std::string cls;
            if (sweep.mix.empty()) {
                spec = sweep.base_scenario;
                spec.seed = seed;
            } else {
                cls = sweep.mix[t % sweep.mix.size()];
                spec = make_class_scenario(sweep.base_scenario, cls, seed, sweep.randomize);
            }
            spec.snr_db = snr;

            std::ostringstream id;
            id << to_string(sweep.axis) << "=" << value << "/trial" << t;
            if (!cls.empty()) id << "/" << cls;
            TrialReport report = run_trial(spec, cfg, id.str());
            row.n_trials += 1;
            if (report.failed) {
                row.n_failed += 1;
                reports.push_back(std::move(report));
                continue;
            }

            auto& cls_counts = row.per_class[report.truth.label];
            cls_counts.first += 1;
            cls_counts.second += report.correct_label ? 1 : 0;
            scored += 1;
            correct += report.correct_label ? 1 : 0;

            if (report.abs_rate_error_bpm) {
                rate_err_sum += *report.abs_rate_error_bpm;
                rate_err_n += 1;
            }
            const bool truth_fall = !report.truth.fall_onsets_s.empty();
            const bool detected_fall = !report.falls.empty();
            if (truth_fall && detected_fall) ++fall_tp;
            if (!truth_fall && detected_fall) ++fall_fp;
            if (truth_fall && !detected_fall) ++fall_fn;
            if (report.fall_latency_s) {
                latency_sum += *report.fall_latency_s;
                latency_n += 1;
            }
            reports.push_back(std::move(report));
        }

        row.overall_accuracy = scored ? static_cast<double>(correct) / static_cast<double>(scored) : 0.0;
        if (rate_err_n) row.mean_abs_rate_error_bpm = rate_err_sum / static_cast<double>(rate_err_n);
        if (fall_tp + fall_fp) row.fall_precision = static_cast<double>(fall_tp) / static_cast<double>(fall_tp + fall_fp);
        if (fall_tp + fall_fn) row.fall_recall = static_cast<double>(fall_tp) / static_cast<double>(fall_tp + fall_fn);
        if (latency_n) row.mean_fall_latency_s = latency_sum / static_cast<double>(latency_n);
        result.rows.push_back(std::move(row));
        result.reports.push_back(std::move(reports));
    }
    return result;
}

/**
 * Runs the pipeline on capture files written in the raw IQ format. Produces
 * exactly what the in-memory pipeline produces for the same sample values.
 */
inline PipelineResult replay_capture(const std::string& ref_path, const std::string& surv1_path,
                                     const std::string& surv2_path, const std::string& metadata_path,
                                     const PipelineConfig& cfg) {
    const IqMetadata meta = read_iq_metadata(metadata_path);
    const IqBuffer ref = read_iq(ref_path, meta.sample_rate_hz);
    const IqBuffer s1 = read_iq(surv1_path, meta.sample_rate_hz);
    const IqBuffer s2 = read_iq(surv2_path, meta.sample_rate_hz);
    if (ref.size() != s1.size() || ref.size() != s2.size())
        throw FileFormatError("replay_capture: capture lengths differ");
    return analyze_buffers(ref, s1, s2, cfg);
}

/// Obstructed-path analog: the metal-block condition is approximated by a
/// large SNR penalty plus stronger static clutter.
inline void apply_nlos_preset(ScenarioSpec& spec) {
    spec.snr_db -= 12.0;
    spec.clutter_amp = std::max(1.0, spec.clutter_amp * 4.0);
}

inline SweepSpec sweep_from_config(const ConfigNode& node) {
    SweepSpec sweep;
    sweep.axis = axis_from_string(node.get_string("axis", "snr_db"));
    sweep.values = node.get_double_list("values");
    sweep.trials_per_point = static_cast<std::size_t>(node.get_u64("trials_per_point", 10));
    sweep.seed_base = node.get_u64("seed_base", 1);
    sweep.snr_ref_db = node.get_double("snr_ref_db", sweep.snr_ref_db);
    sweep.d_ref_m = node.get_double("d_ref_m", sweep.d_ref_m);
    sweep.snr_offset_db = node.get_double("snr_offset_db", sweep.snr_offset_db);
    sweep.mix = node.get_string_list("mix");
    sweep.randomize.breathing_lo_hz = node.get_double("breathing_lo_hz", sweep.randomize.breathing_lo_hz);
    sweep.randomize.breathing_hi_hz = node.get_double("breathing_hi_hz", sweep.randomize.breathing_hi_hz);
    sweep.randomize.tremor_lo_hz = node.get_double("tremor_lo_hz", sweep.randomize.tremor_lo_hz);
    sweep.randomize.tremor_hi_hz = node.get_double("tremor_hi_hz", sweep.randomize.tremor_hi_hz);
    sweep.randomize.tremor_excl_lo_hz = node.get_double("tremor_excl_lo_hz", sweep.randomize.tremor_excl_lo_hz);
    sweep.randomize.tremor_excl_hi_hz = node.get_double("tremor_excl_hi_hz", sweep.randomize.tremor_excl_hi_hz);
    sweep.randomize.fall_min_onset_s = node.get_double("fall_min_onset_s", sweep.randomize.fall_min_onset_s);
    sweep.randomize.fall_end_clearance_s =
        node.get_double("fall_end_clearance_s", sweep.randomize.fall_end_clearance_s);
    auto it = node.sections.find("base_scenario");
    if (it != node.sections.end()) sweep.base_scenario = scenario_from_config(it->second);
    return sweep;
}

}  // namespace wisent
