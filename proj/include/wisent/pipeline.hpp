#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wisent/activity_classifier.hpp"
#include "wisent/estimators.hpp"
#include "wisent/phase_extraction.hpp"
#include "wisent/types.hpp"

namespace wisent {

/**
 * End-to-end processing parameters. Batch length is expressed as a fraction
 * of the sample rate so one config serves any capture rate.
 */
struct PipelineConfig {
    double batch_len_s = 0.05;       // 20 raw batches/s
    double overlap_frac = 0.5;       // 40 effective batches/s
    std::size_t lag_samples = 0;
    double normalize_window_s = 10.0;
    double window_hop_s = 2.0;       // decision cadence
    ClassifierConfig classifier;
    EstimatorConfig estimator;

    BatchConfig batch_config(double sample_rate_hz) const {
        BatchConfig cfg;
        cfg.batch_len = static_cast<std::size_t>(std::llround(batch_len_s * sample_rate_hz));
        cfg.overlap_frac = overlap_frac;
        cfg.lag_samples = lag_samples;
        return cfg;
    }
};

/// One decision window with whatever estimates it produced.
struct WindowResult {
    ActivityDecision decision;
    std::optional<BreathingEstimate> breathing;
    std::optional<TremorClass> tremor;
    std::optional<FallReport> fall;
};

struct PipelineResult {
    PhaseSeries phi1_raw;        // unwrapped, unnormalized
    PhaseSeries phi2_raw;
    PhaseSeries phi2c_raw;       // phi2 - phi1 before normalization
    PhaseSeries phi1;            // normalized
    PhaseSeries phi2c;           // normalized corrected series
    std::vector<WindowResult> windows;
    std::vector<FallReport> falls;  // de-duplicated across windows
};

namespace detail {

inline PhaseSeries slice(const PhaseSeries& s, std::size_t lo, std::size_t len) {
    PhaseSeries out;
    out.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(lo),
                      s.values.begin() + static_cast<std::ptrdiff_t>(lo + len));
    out.batch_rate_hz = s.batch_rate_hz;
    out.t0_s = s.time_at(lo);
    out.normalized = s.normalized;
    if (!s.flags.empty())
        out.flags.assign(s.flags.begin() + static_cast<std::ptrdiff_t>(lo),
                         s.flags.begin() + static_cast<std::ptrdiff_t>(lo + len));
    if (!s.raw_mu.empty()) {
        out.raw_mu.assign(s.raw_mu.begin() + static_cast<std::ptrdiff_t>(lo),
                          s.raw_mu.begin() + static_cast<std::ptrdiff_t>(lo + len));
        out.raw_sigma.assign(s.raw_sigma.begin() + static_cast<std::ptrdiff_t>(lo),
                             s.raw_sigma.begin() + static_cast<std::ptrdiff_t>(lo + len));
    }
    return out;
}

}  // namespace detail

/**
 * Runs the full pipeline on one (reference, surv1, surv2) triple:
 * batched cross-correlation, phase + unwrap, leakage correction on the raw
 * series, trailing-window normalization, then the sliding 20 s decision
 * windows starting after the normalization warm-up. Pure function of its
 * inputs; identical buffers give identical results.
 */
inline PipelineResult analyze_buffers(const IqBuffer& ref, const IqBuffer& surv1,
                                      const IqBuffer& surv2, const PipelineConfig& cfg) {
    const BatchConfig bcfg = cfg.batch_config(ref.sample_rate_hz);

    PipelineResult res;
    res.phi1_raw = batch_phase(cross_correlate_batches(ref, surv1, bcfg));
    res.phi2_raw = batch_phase(cross_correlate_batches(ref, surv2, bcfg));
    res.phi2c_raw = leakage_correct(res.phi1_raw, res.phi2_raw);

    const double rate = res.phi1_raw.batch_rate_hz;
    const std::size_t W = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(cfg.normalize_window_s * rate)));
    res.phi1 = normalize_phase(res.phi1_raw, W);
    res.phi2c = normalize_phase(res.phi2c_raw, W);

    const std::size_t n = res.phi1.values.size();
    const std::size_t win = static_cast<std::size_t>(std::llround(cfg.classifier.window_span_s * rate));
    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.window_hop_s * rate)));
    const std::size_t first = W >= 1 ? W - 1 : 0;  // first batch with a full window behind it

    std::vector<FallReport> fall_candidates;
    if (n >= first + win) {
        for (std::size_t start = first; start + win <= n; start += hop) {
            const PhaseSeries w1 = detail::slice(res.phi1, start, win);
            const PhaseSeries w2c = detail::slice(res.phi2c, start, win);
            const std::pair<double, double> band{cfg.classifier.band_lo_hz,
                                                 std::min(cfg.classifier.band_hi_hz, 0.95 * rate / 2.0)};

            WindowResult wr;
            const PeriodicityEvidence e1 = periodicity_test(w1, band, cfg.classifier);
            const PeriodicityEvidence e2 = periodicity_test(w2c, band, cfg.classifier);
            const std::optional<SpikeEvent> spike = detect_spike(w2c, w1, cfg.classifier);
            wr.decision = classify_window(e1, e2, spike, w1.t0_s);

            if (wr.decision.label == Activity::Fall && spike) {
                wr.fall = report_fall(*spike, w1.t0_s);
                fall_candidates.push_back(*wr.fall);
            }
            if (wr.decision.label == Activity::Breathing)
                wr.breathing = breathing_rate(w1, cfg.estimator);
            if (wr.decision.label == Activity::Tremor) {
                wr.tremor = classify_tremor(w1, w2c, cfg.estimator);
                if (!wr.tremor) wr.decision.label = Activity::RandomMotion;  // out-of-band dominant
            }
            res.windows.push_back(std::move(wr));
        }
    }
    res.falls = merge_fall_reports(std::move(fall_candidates), cfg.estimator.fall_merge_radius_s);
    return res;
}

/// Trial-level label: any merged fall wins, otherwise the most frequent
/// window label (ties resolved towards the more specific activity).
inline Activity overall_label(const PipelineResult& res) {
    if (!res.falls.empty()) return Activity::Fall;
    std::map<Activity, std::size_t> counts;
    for (const auto& w : res.windows)
        if (w.decision.label != Activity::Fall) ++counts[w.decision.label];
    Activity best = Activity::NoActivity;
    std::size_t best_count = 0;
    for (Activity a : {Activity::Tremor, Activity::Breathing, Activity::RandomMotion, Activity::NoActivity}) {
        auto it = counts.find(a);
        if (it != counts.end() && it->second > best_count) { best = a; best_count = it->second; }
    }
    return best;
}

/// Median accepted breathing rate across windows, in Hz; nullopt when none.
inline std::optional<double> median_breathing_hz(const PipelineResult& res) {
    std::vector<double> rates;
    for (const auto& w : res.windows)
        if (w.breathing) rates.push_back(w.breathing->rate_hz);
    if (rates.empty()) return std::nullopt;
    std::sort(rates.begin(), rates.end());
    const std::size_t m = rates.size();
    return m % 2 == 1 ? rates[m / 2] : 0.5 * (rates[m / 2 - 1] + rates[m / 2]);
}

/// Majority tremor band across windows; nullopt when no window produced one.
inline std::optional<TremorBand> majority_tremor_band(const PipelineResult& res) {
    std::size_t low = 0, high = 0;
    for (const auto& w : res.windows) {
        if (!w.tremor) continue;
        (w.tremor->band == TremorBand::Low ? low : high) += 1;
    }
    if (low + high == 0) return std::nullopt;
    return low >= high ? TremorBand::Low : TremorBand::High;
}

}  // namespace wisent
