#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wisent/activity_classifier.hpp"
#include "wisent/fft.hpp"
#include "wisent/types.hpp"

namespace wisent {

struct EstimatorConfig {
    double min_span_s = 10.0;
    double confidence_floor = 0.8;     // minimum regression R^2 to accept
    double peak_fraction_floor = 0.7;  // in-band power share the peak must hold
    double edge_trim_frac = 0.1;       // fraction trimmed at each end before the fit
    double breathing_lo_hz = kBreathingMinHz;
    double breathing_hi_hz = kBreathingMaxHz;
    double tremor_lo_hz = kTremorMinHz;
    double tremor_hi_hz = kTremorMaxHz;
    double tremor_split_hz = 7.0;
    double fall_merge_radius_s = 1.0;
};

struct FreqEstimate {
    double freq_hz = 0.0;
    double r_squared = 0.0;
    double peak_fraction = 0.0;  // share of band power near the coarse peak
};

struct BreathingEstimate {
    double rate_hz = 0.0;
    double rate_bpm = 0.0;
    double confidence = 0.0;  // regression R^2
    double window_start_s = 0.0;
};

enum class TremorBand { Low, High };

struct TremorClass {
    TremorBand band = TremorBand::Low;
    double dominant_hz = 0.0;
    bool plane_agreement = false;  // x-y and x-z dominants within one bin
};

struct FallReport {
    double time_s = 0.0;
    double peak_z = 0.0;
};

/**
 * Dominant in-band frequency by phase-slope regression.
 *
 * A coarse peak is located on a 4x zero-padded Hann periodogram restricted
 * to the band; the series is then band-passed to +/-2 bins around that peak
 * while negative frequencies are dropped, which yields the complex analytic
 * signal directly. A least-squares line through its unwrapped angle (with
 * 10% trimmed at each end against filter edge effects) gives the frequency
 * as slope / 2*pi, at a resolution well below the DFT bin width. Returns
 * nothing when the band holds no usable power.
 */
inline std::optional<FreqEstimate> estimate_dominant_freq(const PhaseSeries& phi,
                                                          std::pair<double, double> band_hz,
                                                          const EstimatorConfig& cfg = {}) {
    const std::size_t n = phi.values.size();
    if (phi.span_s() + 1e-9 < cfg.min_span_s)
        throw InsufficientWindow("estimate_dominant_freq: window shorter than " +
                                 std::to_string(cfg.min_span_s) + " s");
    const double rate = phi.batch_rate_hz;
    const double nyquist = rate / 2.0;
    if (band_hz.first < 0.0 || band_hz.second > nyquist || band_hz.first >= band_hz.second)
        throw std::invalid_argument("estimate_dominant_freq: band outside (0, Nyquist)");

    double mean = 0.0;
    for (double v : phi.values) mean += v;
    mean /= static_cast<double>(n);

    // coarse peak: Hann window, 4x zero padding
    const std::size_t np = 4 * n;
    std::vector<cdouble> padded(np, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1)));
        padded[i] = cdouble((phi.values[i] - mean) * w, 0.0);
    }
    const std::vector<cdouble> P = fft_forward(padded);
    const double dfp = rate / static_cast<double>(np);
    const std::size_t kp_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band_hz.first / dfp)));
    const std::size_t kp_hi = std::min(np / 2, static_cast<std::size_t>(std::floor(band_hz.second / dfp)));
    if (kp_lo > kp_hi) return std::nullopt;
    double best = 0.0;
    std::size_t k_best = 0;
    for (std::size_t k = kp_lo; k <= kp_hi; ++k) {
        const double m = std::norm(P[k]);
        if (m > best) { best = m; k_best = k; }
    }
    if (best <= 0.0 || k_best == 0) return std::nullopt;
    const double f_coarse = static_cast<double>(k_best) * dfp;

    // a genuine tone keeps most of the band power within one bin of the peak
    // of the Welch-averaged spectrum; spread-out drift does not. Averaged
    // segments keep this statistic stable on stochastic input.
    double peak_fraction = 0.0;
    {
        const std::size_t seg_len = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(10.0 * rate)));
        const auto [spec, dfw] = detail::welch_spectrum(phi.values, rate, seg_len);
        const std::size_t kw_lo = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(band_hz.first / dfw)));
        const std::size_t kw_hi = std::min(spec.size() - 1, static_cast<std::size_t>(std::floor(band_hz.second / dfw)));
        double total = 0.0, peak = -1.0;
        std::size_t kw_best = kw_lo;
        for (std::size_t k = kw_lo; k <= kw_hi && k < spec.size(); ++k) {
            total += spec[k];
            if (spec[k] > peak) { peak = spec[k]; kw_best = k; }
        }
        double around = 0.0;
        for (std::size_t k = (kw_best > kw_lo ? kw_best - 1 : kw_lo); k <= std::min(kw_best + 1, kw_hi); ++k)
            around += spec[k];
        peak_fraction = total > 0.0 ? around / total : 0.0;
    }

    // analytic band-pass: keep positive-frequency bins within 2 bins of the peak
    std::vector<cdouble> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = cdouble(phi.values[i] - mean, 0.0);
    std::vector<cdouble> X = fft_forward(x);
    const double df = rate / static_cast<double>(n);
    const double pass_lo = f_coarse - 2.0 * df;
    const double pass_hi = f_coarse + 2.0 * df;
    for (std::size_t k = 0; k < n; ++k) {
        const double f = static_cast<double>(k) * df;
        const bool keep = k >= 1 && k <= n / 2 && f >= pass_lo && f <= pass_hi;
        if (!keep) X[k] = cdouble(0.0, 0.0);
    }
    const std::vector<cdouble> z = fft_inverse(X);

    // unwrapped angle, trimmed least-squares slope
    const std::size_t trim = static_cast<std::size_t>(std::floor(cfg.edge_trim_frac * static_cast<double>(n)));
    const std::size_t lo = trim, hi = n - trim;
    if (hi <= lo + 2) return std::nullopt;
    std::vector<double> ang(hi - lo);
    for (std::size_t i = lo; i < hi; ++i) ang[i - lo] = std::atan2(z[i].imag(), z[i].real());
    for (std::size_t i = 1; i < ang.size(); ++i) {
        double d = ang[i] - ang[i - 1];
        d -= kTwoPi * std::floor((d + kPi) / kTwoPi);
        ang[i] = ang[i - 1] + d;
    }

    const double m_count = static_cast<double>(ang.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ang.size(); ++i) {
        const double xi = static_cast<double>(i);
        sx += xi; sy += ang[i]; sxx += xi * xi; sxy += xi * ang[i];
    }
    const double denom = m_count * sxx - sx * sx;
    if (denom == 0.0) return std::nullopt;
    const double slope = (m_count * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / m_count;

    double ss_res = 0.0, ss_tot = 0.0;
    const double y_mean = sy / m_count;
    for (std::size_t i = 0; i < ang.size(); ++i) {
        const double fit = slope * static_cast<double>(i) + intercept;
        ss_res += (ang[i] - fit) * (ang[i] - fit);
        ss_tot += (ang[i] - y_mean) * (ang[i] - y_mean);
    }
    FreqEstimate est;
    est.freq_hz = std::abs(slope) * rate / kTwoPi;
    est.r_squared = ss_tot > 0.0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 0.0;
    est.peak_fraction = peak_fraction;
    return est;
}

/**
 * Breathing rate from phi1 over the breathing band. Estimates are rejected
 * when no dominant peak stands out of the band, when the phase fit is below
 * the confidence floor, or when the rate lands outside the band.
 */
inline std::optional<BreathingEstimate> breathing_rate(const PhaseSeries& phi1,
                                                       const EstimatorConfig& cfg = {}) {
    const auto est = estimate_dominant_freq(phi1, {cfg.breathing_lo_hz, cfg.breathing_hi_hz}, cfg);
    if (!est) return std::nullopt;
    if (est->peak_fraction < cfg.peak_fraction_floor) return std::nullopt;
    if (est->r_squared < cfg.confidence_floor) return std::nullopt;
    if (est->freq_hz < cfg.breathing_lo_hz || est->freq_hz > cfg.breathing_hi_hz) return std::nullopt;
    BreathingEstimate out;
    out.rate_hz = est->freq_hz;
    out.rate_bpm = 60.0 * est->freq_hz;
    out.confidence = est->r_squared;
    out.window_start_s = phi1.t0_s;
    return out;
}

/**
 * Low/high tremor classification. The dominant frequency is taken from phi1
 * over a wide search band; a dominant outside [4, 11] Hz (too slow or too
 * fast to be tremor) yields nothing, which callers treat as random motion.
 * phi2' only contributes the plane-agreement check.
 */
inline std::optional<TremorClass> classify_tremor(const PhaseSeries& phi1, const PhaseSeries& phi2c,
                                                  const EstimatorConfig& cfg = {}) {
    const double nyquist = phi1.batch_rate_hz / 2.0;
    const std::pair<double, double> wide{cfg.breathing_lo_hz, std::min(cfg.tremor_hi_hz + 2.0, nyquist * 0.95)};
    const auto est = estimate_dominant_freq(phi1, wide, cfg);
    if (!est || est->peak_fraction < cfg.peak_fraction_floor || est->r_squared < cfg.confidence_floor)
        return std::nullopt;
    const double f = est->freq_hz;
    if (f < cfg.tremor_lo_hz || f > cfg.tremor_hi_hz) return std::nullopt;

    TremorClass out;
    out.band = f < cfg.tremor_split_hz ? TremorBand::Low : TremorBand::High;
    out.dominant_hz = f;

    const double bin = phi1.batch_rate_hz / static_cast<double>(phi1.values.size());
    try {
        const auto est2 = estimate_dominant_freq(phi2c, {cfg.tremor_lo_hz, cfg.tremor_hi_hz}, cfg);
        out.plane_agreement = est2 && std::abs(est2->freq_hz - f) <= bin;
    } catch (const std::exception&) {
        out.plane_agreement = false;
    }
    return out;
}

/// Absolute-time fall report for one detected spike.
inline FallReport report_fall(const SpikeEvent& spike, double /*window_start_s*/) {
    return FallReport{spike.time_s, spike.peak_z};
}

/**
 * De-duplicates fall reports gathered from overlapping windows: reports
 * within the merge radius collapse to one event keeping the earliest time
 * and the largest peak. Order-insensitive.
 */
inline std::vector<FallReport> merge_fall_reports(std::vector<FallReport> reports,
                                                  double merge_radius_s = 1.0) {
    std::sort(reports.begin(), reports.end(),
              [](const FallReport& a, const FallReport& b) { return a.time_s < b.time_s; });
    std::vector<FallReport> merged;
    for (const auto& r : reports) {
        if (!merged.empty() && r.time_s - merged.back().time_s <= merge_radius_s)
            merged.back().peak_z = std::max(merged.back().peak_z, r.peak_z);
        else
            merged.push_back(r);
    }
    return merged;
}

}  // namespace wisent
