#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wisent/fft.hpp"
#include "wisent/types.hpp"

namespace wisent {

enum class Activity { NoActivity, RandomMotion, Breathing, Tremor, Fall };

inline const char* to_string(Activity a) {
    switch (a) {
        case Activity::NoActivity: return "no_activity";
        case Activity::RandomMotion: return "random_motion";
        case Activity::Breathing: return "breathing";
        case Activity::Tremor: return "tremor";
        case Activity::Fall: return "fall";
    }
    return "?";
}

/// Thresholds for the periodicity / spike decisions. Defaults are calibrated
/// against seeded noise-only runs (see the calibration tests).
struct ClassifierConfig {
    double window_span_s = 20.0;        // decision window
    double min_span_s = 20.0;           // periodicity_test lower limit
    double periodicity_threshold = 0.7; // spectral concentration needed for "periodic"
    double activity_floor_rad = 0.02;   // mean raw phase sigma below this = no activity
    double welch_segment_s = 10.0;
    double spike_threshold_z = 6.0;
    double spike_min_width_s = 0.1;
    double flatness_ceiling_rad2 = 0.25; // raw-phase variance cap for "phi1 flat"
    double flatness_window_s = 1.0;
    double band_lo_hz = 0.15;            // classifier-wide search band
    double band_hi_hz = 11.5;
};

/**
 * Outcome of the spectral periodicity test on one window.
 * concentration is the fraction of in-band power within +/-1 bin of the
 * dominant peak; activity reflects the pre-normalization phase scale.
 */
struct PeriodicityEvidence {
    bool is_periodic = false;
    double dominant_hz = 0.0;
    double concentration = 0.0;
    double window_span_s = 0.0;
    double band_power = 0.0;
    bool activity = false;
};

/// Brief one-sided excursion in normalized phi2' while phi1 stays flat.
struct SpikeEvent {
    double time_s = 0.0;   // absolute time of the first batch over threshold
    double peak_z = 0.0;
    double width_s = 0.0;
};

struct ActivityDecision {
    Activity label = Activity::NoActivity;
    PeriodicityEvidence evidence1;
    PeriodicityEvidence evidence2;
    std::optional<SpikeEvent> spike;
    double window_start_s = 0.0;
};

namespace detail {

/// Welch-averaged magnitude-squared spectrum (Hann window, 50% overlap).
/// Returns the spectrum and its bin width in Hz.
inline std::pair<std::vector<double>, double> welch_spectrum(const std::vector<double>& x,
                                                             double rate_hz, std::size_t seg_len) {
    seg_len = std::min(seg_len, x.size());
    if (seg_len < 8) seg_len = std::min<std::size_t>(8, x.size());
    const std::size_t hop = std::max<std::size_t>(1, seg_len / 2);
    std::vector<double> window(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i)
        window[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(seg_len - 1)));

    std::vector<double> acc(seg_len / 2 + 1, 0.0);
    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + seg_len <= x.size(); start += hop) {
        double mean = 0.0;
        for (std::size_t i = 0; i < seg_len; ++i) mean += x[start + i];
        mean /= static_cast<double>(seg_len);
        std::vector<cdouble> seg(seg_len);
        for (std::size_t i = 0; i < seg_len; ++i)
            seg[i] = cdouble((x[start + i] - mean) * window[i], 0.0);
        const std::vector<cdouble> X = fft_forward(seg);
        for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(X[k]);
        ++n_segments;
    }
    if (n_segments > 0)
        for (auto& v : acc) v /= static_cast<double>(n_segments);
    return {std::move(acc), rate_hz / static_cast<double>(seg_len)};
}

}  // namespace detail

/**
 * Spectral-concentration periodicity test on a normalized window.
 * The Welch spectrum is restricted to band_hz; the window is periodic when
 * the fraction of band power within one bin of the peak reaches the
 * threshold and the pre-normalization phase scale clears the activity floor.
 */
inline PeriodicityEvidence periodicity_test(const PhaseSeries& phi,
                                            std::pair<double, double> band_hz,
                                            const ClassifierConfig& cfg = {}) {
    if (!phi.normalized) throw std::invalid_argument("periodicity_test: series must be normalized");
    if (phi.span_s() + 1e-9 < cfg.min_span_s)
        throw InsufficientWindow("periodicity_test: window shorter than " +
                                 std::to_string(cfg.min_span_s) + " s");
    const double nyquist = phi.batch_rate_hz / 2.0;
    if (band_hz.first < 0.0 || band_hz.second > nyquist || band_hz.first >= band_hz.second)
        throw std::invalid_argument("periodicity_test: band outside (0, Nyquist)");

    PeriodicityEvidence ev;
    ev.window_span_s = phi.span_s();

    const std::size_t seg_len = static_cast<std::size_t>(std::llround(cfg.welch_segment_s * phi.batch_rate_hz));
    const auto [spec, df] = detail::welch_spectrum(phi.values, phi.batch_rate_hz, seg_len);

    const std::size_t k_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band_hz.first / df)));
    const std::size_t k_hi = std::min(spec.size() - 1, static_cast<std::size_t>(std::floor(band_hz.second / df)));
    if (k_lo > k_hi) return ev;

    double total = 0.0, best = -1.0;
    std::size_t k_best = k_lo;
    for (std::size_t k = k_lo; k <= k_hi; ++k) {
        total += spec[k];
        if (spec[k] > best) { best = spec[k]; k_best = k; }
    }
    ev.band_power = total;
    ev.dominant_hz = static_cast<double>(k_best) * df;

    double around = 0.0;
    for (std::size_t k = (k_best > k_lo ? k_best - 1 : k_lo); k <= std::min(k_best + 1, k_hi); ++k)
        around += spec[k];
    ev.concentration = total > 0.0 ? around / total : 0.0;

    // activity from the pre-normalization phase scale when available
    if (!phi.raw_sigma.empty()) {
        double mean_sigma = 0.0;
        for (double s : phi.raw_sigma) mean_sigma += s;
        mean_sigma /= static_cast<double>(phi.raw_sigma.size());
        ev.activity = mean_sigma >= cfg.activity_floor_rad;
    } else {
        ev.activity = total > 0.0;
    }

    ev.is_periodic = ev.activity && ev.concentration >= cfg.periodicity_threshold;
    if (!ev.activity) ev.dominant_hz = 0.0;
    return ev;
}

/**
 * Finds the earliest run where |phi2'| stays above the spike threshold for
 * at least spike_min_width_s while the concurrent unnormalized phi1 is flat
 * (variance over a centred 1 s window below flatness_ceiling_rad2, in raw
 * radians so that unit-variance breathing in phi1 does not veto the spike).
 */
inline std::optional<SpikeEvent> detect_spike(const PhaseSeries& phi2_corrected,
                                              const PhaseSeries& phi1,
                                              const ClassifierConfig& cfg = {}) {
    if (!phi2_corrected.normalized || !phi1.normalized)
        throw std::invalid_argument("detect_spike: both series must be normalized");
    if (phi2_corrected.values.size() != phi1.values.size())
        throw std::invalid_argument("detect_spike: series lengths differ");
    if (phi2_corrected.batch_rate_hz != phi1.batch_rate_hz)
        throw std::invalid_argument("detect_spike: batch rates differ");

    const std::size_t n = phi2_corrected.values.size();
    const double rate = phi2_corrected.batch_rate_hz;
    const std::size_t min_run = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.spike_min_width_s * rate)));
    const std::size_t half_flat = static_cast<std::size_t>(std::llround(cfg.flatness_window_s * rate / 2.0));

    auto raw_phi1 = [&](std::size_t b) {
        if (phi1.raw_sigma.empty()) return phi1.values[b];
        return phi1.values[b] * phi1.raw_sigma[b] + phi1.raw_mu[b];
    };
    auto phi1_flat_at = [&](std::size_t b) {
        const std::size_t lo = b > half_flat ? b - half_flat : 0;
        const std::size_t hi = std::min(n, b + half_flat + 1);
        double mean = 0.0;
        for (std::size_t i = lo; i < hi; ++i) mean += raw_phi1(i);
        mean /= static_cast<double>(hi - lo);
        double var = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            const double d = raw_phi1(i) - mean;
            var += d * d;
        }
        var /= static_cast<double>(hi - lo);
        return var < cfg.flatness_ceiling_rad2;
    };

    std::size_t run_start = 0, run_len = 0;
    for (std::size_t b = 0; b <= n; ++b) {
        const bool over = b < n && std::abs(phi2_corrected.values[b]) >= cfg.spike_threshold_z;
        if (over) {
            if (run_len == 0) run_start = b;
            ++run_len;
        } else if (run_len > 0) {
            if (run_len >= min_run && phi1_flat_at(run_start)) {
                SpikeEvent ev;
                ev.time_s = phi2_corrected.time_at(run_start);
                ev.width_s = static_cast<double>(run_len) / rate;
                ev.peak_z = 0.0;
                for (std::size_t i = run_start; i < run_start + run_len; ++i)
                    ev.peak_z = std::max(ev.peak_z, std::abs(phi2_corrected.values[i]));
                return ev;
            }
            run_len = 0;
        }
    }
    return std::nullopt;
}

/**
 * Four-way decision table over one window. A qualifying spike always wins
 * (fall detection runs continuously regardless of the ongoing activity);
 * then both-periodic means tremor, x-y-only periodicity means breathing,
 * and remaining windows split into random motion or no activity depending
 * on whether either channel shows activity.
 */
inline ActivityDecision classify_window(const PeriodicityEvidence& e1, const PeriodicityEvidence& e2,
                                        std::optional<SpikeEvent> spike, double window_start_s = 0.0) {
    ActivityDecision d;
    d.evidence1 = e1;
    d.evidence2 = e2;
    d.spike = spike;
    d.window_start_s = window_start_s;
    if (spike.has_value()) d.label = Activity::Fall;
    else if (e1.is_periodic && e2.is_periodic) d.label = Activity::Tremor;
    else if (e1.is_periodic) d.label = Activity::Breathing;
    else if (e1.activity || e2.activity) d.label = Activity::RandomMotion;
    else d.label = Activity::NoActivity;
    return d;
}

}  // namespace wisent
