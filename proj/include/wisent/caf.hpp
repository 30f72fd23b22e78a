#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "wisent/types.hpp"

namespace wisent {

/**
 * Cross-ambiguity magnitude over a (delay, Doppler) grid. values[t][f] holds
 * |chi| at delay_axis[t] samples and doppler_axis[f] Hz; n_samples is the
 * coherent integration length.
 */
struct CafMap {
    std::vector<std::vector<double>> values;
    std::vector<std::size_t> delay_axis;
    std::vector<double> doppler_axis;
    std::size_t n_samples = 0;

    /// Grid location of the strongest cell.
    std::pair<std::size_t, double> peak() const {
        std::size_t bt = 0, bf = 0;
        double best = -1.0;
        for (std::size_t t = 0; t < values.size(); ++t)
            for (std::size_t f = 0; f < values[t].size(); ++f)
                if (values[t][f] > best) { best = values[t][f]; bt = t; bf = f; }
        return {delay_axis[bt], doppler_axis[bf]};
    }
};

/// Smallest distinguishable Doppler spacing for an integration window of
/// n_samples at sample_rate_hz: the reciprocal of the integration time.
inline double doppler_resolution_hz(double sample_rate_hz, std::size_t n_samples) {
    if (n_samples == 0) throw std::invalid_argument("doppler_resolution_hz: n_samples must be > 0");
    return sample_rate_hz / static_cast<double>(n_samples);
}

/// Uniform Doppler grid [-span_hz, span_hz] at step_hz spacing.
inline std::vector<double> doppler_grid(double span_hz = 50.0, double step_hz = 0.1) {
    std::vector<double> grid;
    const long k = static_cast<long>(std::llround(span_hz / step_hz));
    grid.reserve(static_cast<std::size_t>(2 * k + 1));
    for (long i = -k; i <= k; ++i) grid.push_back(static_cast<double>(i) * step_hz);
    return grid;
}

/**
 * Cross-ambiguity function over delays 0..tau_max and the given Doppler grid
 * (physical Hz):
 *
 *   chi[tau, f] = sum_{n=0}^{N-1-tau} r[n] * conj(s[n+tau]) * exp(i*2*pi*f*n/fs)
 *
 * The rotation sign is chosen so a surveillance channel carrying a positive
 * Doppler shift peaks at positive f. The per-delay product sequence is
 * computed once and each Doppler row reuses it with an incremental phasor.
 */
inline CafMap compute_caf(const IqBuffer& ref, const IqBuffer& surv, std::size_t tau_max,
                          const std::vector<double>& doppler_axis) {
    if (ref.sample_rate_hz != surv.sample_rate_hz)
        throw std::invalid_argument("compute_caf: sample rates differ");
    const std::size_t n = std::min(ref.size(), surv.size());
    if (tau_max >= n) throw std::invalid_argument("compute_caf: tau_max must be < buffer length");
    if (doppler_axis.empty()) throw std::invalid_argument("compute_caf: empty Doppler grid");

    const double fs = ref.sample_rate_hz;
    CafMap map;
    map.n_samples = n;
    map.doppler_axis = doppler_axis;
    map.delay_axis.resize(tau_max + 1);
    map.values.assign(tau_max + 1, std::vector<double>(doppler_axis.size(), 0.0));

    std::vector<cdouble> prod(n);
    for (std::size_t tau = 0; tau <= tau_max; ++tau) {
        map.delay_axis[tau] = tau;
        const std::size_t m = n - tau;
        for (std::size_t i = 0; i < m; ++i)
            prod[i] = ref.samples[i] * std::conj(surv.samples[i + tau]);
        for (std::size_t fi = 0; fi < doppler_axis.size(); ++fi) {
            const double w = kTwoPi * doppler_axis[fi] / fs;
            const cdouble step(std::cos(w), std::sin(w));
            cdouble rot(1.0, 0.0);
            cdouble acc(0.0, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                acc += prod[i] * rot;
                rot *= step;
            }
            map.values[tau][fi] = std::abs(acc);
        }
    }
    return map;
}

}  // namespace wisent
