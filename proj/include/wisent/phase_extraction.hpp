#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wisent/fft.hpp"
#include "wisent/types.hpp"

namespace wisent {

/**
 * Batching parameters for the cross-correlator.
 *
 * hop = round(batch_len * (1 - overlap_frac)) and must be >= 1.
 * lag_samples is the reference/surveillance alignment delay; reference
 * samples before the start of the capture are treated as zero.
 */
struct BatchConfig {
    std::size_t batch_len = 0;
    double overlap_frac = 0.5;
    std::size_t lag_samples = 0;

    std::size_t hop() const {
        return static_cast<std::size_t>(std::llround(static_cast<double>(batch_len) * (1.0 - overlap_frac)));
    }

    void validate() const {
        if (batch_len == 0) throw std::invalid_argument("batch config: batch_len must be > 0");
        if (overlap_frac < 0.0 || overlap_frac >= 1.0)
            throw std::invalid_argument("batch config: overlap_frac must be in [0, 1)");
        if (hop() < 1) throw std::invalid_argument("batch config: hop must be >= 1");
    }
};

/// Default batching for a given sample rate: 20 raw batches/s at 50% overlap,
/// i.e. 40 effective batches/s, comfortably above twice the 11 Hz tremor cap.
inline BatchConfig default_batch_config(double sample_rate_hz, std::size_t lag_samples = 0) {
    BatchConfig cfg;
    cfg.batch_len = static_cast<std::size_t>(std::llround(sample_rate_hz / 20.0));
    cfg.overlap_frac = 0.5;
    cfg.lag_samples = lag_samples;
    return cfg;
}

/**
 * Per-batch cross-correlation of reference against conjugated surveillance.
 * Batch b starts at sample b*hop and accumulates
 *
 *   y[b] = sum_{k=0}^{batch_len-1} r[b*hop + k - lag] * conj(s[b*hop + k])
 *
 * with out-of-range reference indices contributing zero. The trailing
 * partial batch is discarded.
 */
inline BatchSeries cross_correlate_batches(const IqBuffer& ref, const IqBuffer& surv,
                                           const BatchConfig& cfg) {
    cfg.validate();
    if (ref.sample_rate_hz != surv.sample_rate_hz)
        throw std::invalid_argument("cross_correlate_batches: sample rates differ");
    if (ref.size() != surv.size())
        throw std::invalid_argument("cross_correlate_batches: buffer lengths differ");
    const std::size_t n = ref.size();
    if (n < cfg.batch_len + cfg.lag_samples)
        throw std::invalid_argument("cross_correlate_batches: buffers shorter than batch_len + lag");

    const std::size_t hop = cfg.hop();
    const std::size_t n_batches = (n - cfg.batch_len) / hop + 1;
    const std::ptrdiff_t lag = static_cast<std::ptrdiff_t>(cfg.lag_samples);

    BatchSeries out;
    out.values.resize(n_batches);
    out.batch_rate_hz = ref.sample_rate_hz / static_cast<double>(hop);
    out.t0_s = (static_cast<double>(cfg.batch_len) / 2.0) / ref.sample_rate_hz;

    const cdouble* r = ref.samples.data();
    const cdouble* s = surv.samples.data();
    for (std::size_t b = 0; b < n_batches; ++b) {
        const std::ptrdiff_t start = static_cast<std::ptrdiff_t>(b * hop);
        cdouble acc(0.0, 0.0);
        std::ptrdiff_t k0 = 0;
        if (start < lag) k0 = lag - start;  // zero-padded reference prefix
        for (std::ptrdiff_t k = k0; k < static_cast<std::ptrdiff_t>(cfg.batch_len); ++k)
            acc += r[start + k - lag] * std::conj(s[start + k]);
        out.values[b] = acc;
    }
    return out;
}

/// Unwraps wrapped angles in place: successive steps are folded into (-pi, pi].
inline void unwrap_inplace(std::vector<double>& phi) {
    for (std::size_t b = 1; b < phi.size(); ++b) {
        double d = phi[b] - phi[b - 1];
        d -= kTwoPi * std::floor((d + kPi) / kTwoPi);
        phi[b] = phi[b - 1] + d;
    }
}

/**
 * Four-quadrant angle of each batch, unwrapped along the batch index.
 * The angle of an exact 0+0i batch is 0.
 */
inline PhaseSeries batch_phase(const BatchSeries& y) {
    if (y.values.empty()) throw std::invalid_argument("batch_phase: empty series");
    PhaseSeries out;
    out.values.resize(y.values.size());
    out.batch_rate_hz = y.batch_rate_hz;
    out.t0_s = y.t0_s;
    out.normalized = false;
    for (std::size_t b = 0; b < y.values.size(); ++b) {
        const cdouble v = y.values[b];
        out.values[b] = (v.real() == 0.0 && v.imag() == 0.0) ? 0.0 : std::atan2(v.imag(), v.real());
    }
    unwrap_inplace(out.values);
    return out;
}

inline constexpr double kDegenerateSigma = 1e-12;

/**
 * Trailing-window normalization to zero mean and unit variance.
 *
 * For b >= W-1 the statistics come from the trailing window {b-W+1 .. b}
 * (population variance, divide by W). The warm-up prefix b < W-1 is scored
 * against the first full window's statistics and flagged WarmUp; with W
 * equal to the series length every value therefore reduces to the plain
 * z-score of the whole series, and renormalizing a normalized series is
 * exact. Windows with sigma below kDegenerateSigma yield 0 and the
 * Degenerate flag. The window statistics used per batch are retained in
 * raw_mu / raw_sigma.
 */
inline PhaseSeries normalize_phase(const PhaseSeries& phi, std::size_t window_len) {
    if (window_len < 2) throw std::invalid_argument("normalize_phase: window_len must be >= 2");
    if (phi.normalized) throw std::invalid_argument("normalize_phase: input already normalized");
    if (phi.values.empty()) throw std::invalid_argument("normalize_phase: empty series");

    const std::size_t n = phi.values.size();
    const std::size_t W = window_len;
    const std::size_t first_full = std::min(W, n);  // length of the first window

    PhaseSeries out;
    out.values.resize(n);
    out.batch_rate_hz = phi.batch_rate_hz;
    out.t0_s = phi.t0_s;
    out.normalized = true;
    out.flags.assign(n, BatchFlag::Ok);
    out.raw_mu.resize(n);
    out.raw_sigma.resize(n);

    // prefix sums for O(1) window statistics
    std::vector<double> cum(n + 1, 0.0), cum2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        cum[i + 1] = cum[i] + phi.values[i];
        cum2[i + 1] = cum2[i] + phi.values[i] * phi.values[i];
    }
    auto window_stats = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        const double len = static_cast<double>(hi - lo);
        const double mu = (cum[hi] - cum[lo]) / len;
        double var = (cum2[hi] - cum2[lo]) / len - mu * mu;
        if (var < 0.0) var = 0.0;
        return std::pair<double, double>(mu, std::sqrt(var));
    };

    for (std::size_t b = 0; b < n; ++b) {
        std::size_t lo, hi;
        if (b + 1 >= W) {
            lo = b + 1 - W;
            hi = b + 1;
        } else {
            lo = 0;
            hi = first_full;
            out.flags[b] = BatchFlag::WarmUp;
        }
        const auto [mu, sigma] = window_stats(lo, hi);
        out.raw_mu[b] = mu;
        out.raw_sigma[b] = sigma;
        if (sigma < kDegenerateSigma) {
            out.values[b] = 0.0;
            out.flags[b] = BatchFlag::Degenerate;
        } else {
            out.values[b] = (phi.values[b] - mu) / sigma;
        }
    }
    return out;
}

/**
 * Leakage correction: elementwise phi2 - phi1 removes the x-y plane content
 * that the tilted antenna also observes, leaving x-z motion only.
 */
inline PhaseSeries leakage_correct(const PhaseSeries& phi1, const PhaseSeries& phi2) {
    if (phi1.values.size() != phi2.values.size())
        throw std::invalid_argument("leakage_correct: series lengths differ");
    if (phi1.batch_rate_hz != phi2.batch_rate_hz)
        throw std::invalid_argument("leakage_correct: batch rates differ");
    if (phi1.normalized != phi2.normalized)
        throw std::invalid_argument("leakage_correct: normalized states differ");

    PhaseSeries out;
    out.values.resize(phi2.values.size());
    out.batch_rate_hz = phi2.batch_rate_hz;
    out.t0_s = phi2.t0_s;
    out.normalized = phi2.normalized;
    for (std::size_t b = 0; b < out.values.size(); ++b)
        out.values[b] = phi2.values[b] - phi1.values[b];
    if (!phi1.flags.empty() || !phi2.flags.empty()) {
        out.flags.resize(out.values.size(), BatchFlag::Ok);
        for (std::size_t b = 0; b < out.values.size(); ++b)
            out.flags[b] = std::max(phi1.flag_at(b), phi2.flag_at(b));
    }
    return out;
}

/// Power of a real series inside [lo_hz, hi_hz], from the demeaned periodogram.
inline double band_power(const PhaseSeries& phi, double lo_hz, double hi_hz) {
    const std::size_t n = phi.values.size();
    if (n == 0) return 0.0;
    double mean = 0.0;
    for (double v : phi.values) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = phi.values[i] - mean;
    const std::vector<double> p = power_spectrum(x);
    const double df = phi.batch_rate_hz / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f >= lo_hz && f <= hi_hz) total += p[k];
    }
    return total / static_cast<double>(n * n);
}

}  // namespace wisent
