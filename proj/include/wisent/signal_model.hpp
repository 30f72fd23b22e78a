#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "wisent/fft.hpp"
#include "wisent/rng.hpp"
#include "wisent/types.hpp"

namespace wisent {

namespace detail {

// Sub-stream purposes derived from the scenario seed.
inline constexpr std::uint64_t kStreamSource = 1;
inline constexpr std::uint64_t kStreamNoise1 = 2;
inline constexpr std::uint64_t kStreamNoise2 = 3;
inline constexpr std::uint64_t kStreamLimbBase = 16;

}  // namespace detail

/**
 * Doppler shift observed for a reflector moving at speed_mps at angle
 * angle_rad to the receiver boresight: f_o * (v/c) * cos(theta).
 */
inline double doppler_shift_hz(double carrier_hz, double speed_mps, double angle_rad) {
    if (carrier_hz <= 0.0) throw std::invalid_argument("doppler_shift_hz: carrier_hz must be > 0");
    return carrier_hz * (speed_mps / kSpeedOfLight) * std::cos(angle_rad);
}

namespace detail {

/**
 * Aperiodic limb-drift displacement. Realized as a dense seeded multi-sine
 * with log-uniform frequencies below 3 Hz and equal amplitudes (pink-ish
 * spectrum), which is band-limited, wander-like and carries no dominant
 * line for the periodicity test to latch onto. Pure function of (seed, t).
 */
class LimbWaveform {
public:
    LimbWaveform(std::uint64_t seed, double amp_m) {
        Rng rng(seed);
        freqs_.resize(kComponents);
        phases_.resize(kComponents);
        const double lo = 0.08, hi = 3.0;
        for (int k = 0; k < kComponents; ++k) {
            freqs_[k] = lo * std::pow(hi / lo, rng.next_double());
            phases_[k] = rng.uniform(0.0, kTwoPi);
        }
        // per-component amplitude so the waveform std is amp/2
        a_ = amp_m / (2.0 * std::sqrt(static_cast<double>(kComponents) / 2.0));
    }

    double operator()(double t) const {
        double m = 0.0;
        for (int k = 0; k < kComponents; ++k)
            m += a_ * std::sin(kTwoPi * freqs_[k] * t + phases_[k]);
        return m;
    }

private:
    static constexpr int kComponents = 160;
    std::vector<double> freqs_;
    std::vector<double> phases_;
    double a_ = 0.0;
};

/// Displacement m(t) of one component at absolute time t; 0 outside its window.
inline double displacement_m(const MotionComponent& m, double t_s) {
    const double rel = t_s - m.onset_s;
    if (rel < 0.0 || rel > m.duration_s) return 0.0;
    switch (m.kind) {
        case MotionKind::Breathing:
        case MotionKind::Tremor:
            return m.displacement_amp_m * std::sin(kTwoPi * m.fundamental_hz * rel);
        case MotionKind::Fall:
            // raised-cosine ramp from 0 to fall_displacement_m
            return m.fall_displacement_m * 0.5 * (1.0 - std::cos(kPi * rel / m.duration_s));
        case MotionKind::RandomLimb:
            return LimbWaveform(m.seed, m.displacement_amp_m)(rel);
    }
    return 0.0;
}

}  // namespace detail

/**
 * Phase injected by one motion component at time t: 2*pi*m(t)/lambda.
 * Zero outside the component's active window.
 */
inline double motion_phase(const MotionComponent& motion, double t_s, double wavelength_m) {
    if (wavelength_m <= 0.0) throw std::invalid_argument("motion_phase: wavelength_m must be > 0");
    return kTwoPi * detail::displacement_m(motion, t_s) / wavelength_m;
}

/**
 * Seeded wideband complex source with unit average power. The spectrum is
 * drawn directly as circular Gaussian bins inside |f| <= band_frac * fs/2
 * and zero outside, then inverse-transformed, so the sequence is noise-like
 * with the prescribed fractional bandwidth.
 */
inline IqBuffer synth_source(std::size_t n_samples, double sample_rate_hz, std::uint64_t seed,
                             double band_frac = 0.8) {
    if (n_samples == 0) throw std::invalid_argument("synth_source: n_samples must be > 0");
    if (sample_rate_hz <= 0.0) throw std::invalid_argument("synth_source: sample_rate_hz must be > 0");
    if (band_frac <= 0.0 || band_frac > 1.0)
        throw std::invalid_argument("synth_source: band_frac must be in (0, 1]");

    const std::size_t n = n_samples;
    Rng rng(substream(seed, detail::kStreamSource));
    std::vector<cdouble> spectrum(n, cdouble(0.0, 0.0));
    // bin k holds frequency k/n (wrapping); keep |f| <= band_frac/2 cycles/sample
    const double half_band = band_frac / 2.0;
    for (std::size_t k = 0; k < n; ++k) {
        double f = static_cast<double>(k) / static_cast<double>(n);
        if (f > 0.5) f -= 1.0;
        if (std::abs(f) <= half_band)
            spectrum[k] = cdouble(rng.next_gaussian(), rng.next_gaussian());
    }
    std::vector<cdouble> x = fft_inverse(spectrum);

    double power = 0.0;
    for (const auto& v : x) power += std::norm(v);
    power /= static_cast<double>(n);
    const double scale = 1.0 / std::sqrt(power);
    for (auto& v : x) v *= scale;

    return IqBuffer{std::move(x), sample_rate_hz};
}

/// Throws std::invalid_argument when the scenario violates a type invariant.
inline void validate(const ScenarioSpec& spec) {
    if (spec.duration_s <= 0.0) throw std::invalid_argument("scenario: duration_s must be > 0");
    if (spec.sample_rate_hz <= 0.0) throw std::invalid_argument("scenario: sample_rate_hz must be > 0");
    if (spec.carrier_hz <= 0.0) throw std::invalid_argument("scenario: carrier_hz must be > 0");
    if (spec.clutter_amp < 0.0) throw std::invalid_argument("scenario: clutter_amp must be >= 0");
    if (spec.band_frac <= 0.0 || spec.band_frac > 1.0)
        throw std::invalid_argument("scenario: band_frac must be in (0, 1]");

    std::map<double, int> tremor_planes;  // fundamental -> bitmask of planes seen
    for (const auto& m : spec.motions) {
        if (m.duration_s <= 0.0) throw std::invalid_argument("motion: duration_s must be > 0");
        if (m.onset_s < 0.0) throw std::invalid_argument("motion: onset_s must be >= 0");
        if (m.displacement_amp_m < 0.0 || m.fall_displacement_m < 0.0)
            throw std::invalid_argument("motion: displacement must be >= 0");
        switch (m.kind) {
            case MotionKind::Breathing:
                if (m.plane != MotionPlane::XY)
                    throw std::invalid_argument("motion: breathing must be in the x-y plane");
                if (m.fundamental_hz < kBreathingMinHz || m.fundamental_hz > kBreathingMaxHz)
                    throw std::invalid_argument("motion: breathing fundamental outside [0.2, 2] Hz");
                break;
            case MotionKind::Tremor:
                if (m.fundamental_hz < kTremorMinHz || m.fundamental_hz > kTremorMaxHz)
                    throw std::invalid_argument("motion: tremor fundamental outside [4, 11] Hz");
                tremor_planes[m.fundamental_hz] |= (m.plane == MotionPlane::XY ? 1 : 2);
                break;
            case MotionKind::Fall:
                if (m.plane != MotionPlane::XZ)
                    throw std::invalid_argument("motion: fall must be in the x-z plane");
                if (m.fundamental_hz != 0.0)
                    throw std::invalid_argument("motion: fall fundamental_hz must be 0");
                break;
            case MotionKind::RandomLimb:
                break;
        }
    }
    for (const auto& [hz, mask] : tremor_planes) {
        if (mask != 3)
            throw std::invalid_argument("motion: tremor components must come in x-y/x-z pairs sharing "
                                        "fundamental_hz (missing plane at " + std::to_string(hz) + " Hz)");
    }
}

/// Reference plus two surveillance channels and the injected ground truth.
struct ScenarioSignals {
    IqBuffer ref;
    IqBuffer surv1;
    IqBuffer surv2;
    GroundTruth truth;
};

namespace detail {

/**
 * Per-channel motion phase sampled at every output sample. Sinusoids and
 * ramps are evaluated exactly; limb drift is evaluated on a 256 Hz grid and
 * linearly interpolated (its content lives below 3 Hz).
 */
inline void accumulate_motion_phase(const MotionComponent& m, double weight, double wavelength_m,
                                    double sample_rate_hz, std::vector<double>& phase) {
    const std::size_t n = phase.size();
    const double dt = 1.0 / sample_rate_hz;
    if (m.kind == MotionKind::RandomLimb) {
        const double grid_rate = 256.0;
        const std::size_t gn = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * dt * grid_rate)) + 2;
        LimbWaveform wave(m.seed, m.displacement_amp_m);
        std::vector<double> grid(gn);
        for (std::size_t g = 0; g < gn; ++g) {
            const double t = static_cast<double>(g) / grid_rate;
            const double rel = t - m.onset_s;
            grid[g] = (rel >= 0.0 && rel <= m.duration_s) ? wave(rel) : 0.0;
        }
        const double k = weight * kTwoPi / wavelength_m;
        for (std::size_t i = 0; i < n; ++i) {
            const double gpos = static_cast<double>(i) * dt * grid_rate;
            const std::size_t g0 = static_cast<std::size_t>(gpos);
            const double frac = gpos - static_cast<double>(g0);
            phase[i] += k * ((1.0 - frac) * grid[g0] + frac * grid[g0 + 1]);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * dt;
            phase[i] += weight * motion_phase(m, t, wavelength_m);
        }
    }
}

inline void add_noise(std::vector<cdouble>& samples, double sigma2, std::uint64_t seed) {
    if (sigma2 <= 0.0) return;
    Rng rng(seed);
    const double s = std::sqrt(sigma2 / 2.0);  // per quadrature
    for (auto& v : samples) {
        const double re = s * rng.next_gaussian();
        const double im = s * rng.next_gaussian();
        v += cdouble(re, im);
    }
}

}  // namespace detail

/**
 * Synthesizes one scenario. The reference channel is the clean source; each
 * surveillance channel is the source delayed by lag_samples, phase-modulated
 * by the sum of its plane-projected motion phases, plus a static clutter
 * copy and complex white Gaussian noise:
 *
 *   surv1[n] = x[n-lag] * exp(i * sum_xy phi_m(t)) + clutter * x[n-lag] + w1[n]
 *   surv2[n] = x[n-lag] * exp(i * (sum_xy phi_m(t) + cos(theta2) * sum_xz phi_m(t)))
 *              + clutter * x[n-lag] + w2[n]
 *
 * Motions on one target displace the same scatterer, so their phases add
 * inside a single exponential; the tilted antenna sees x-z displacement
 * foreshortened by cos(theta2). Noise power is snr_db below the
 * motion-modulated component power (unit source power when no motions).
 * Identical specs give bit-identical outputs.
 */
inline ScenarioSignals synth_scenario(const ScenarioSpec& spec) {
    validate(spec);

    const std::size_t n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
    if (n == 0) throw std::invalid_argument("scenario: empty sample window");
    const std::size_t lag = spec.lag_samples;
    const double lambda = spec.wavelength_m();

    // one extended source stream; ref leads the surveillance channels by lag
    IqBuffer raw = synth_source(n + lag, spec.sample_rate_hz, spec.seed, spec.band_frac);
    std::vector<cdouble> ref(raw.samples.begin() + static_cast<std::ptrdiff_t>(lag), raw.samples.end());
    std::vector<cdouble> delayed(raw.samples.begin(), raw.samples.begin() + static_cast<std::ptrdiff_t>(n));

    // resolve limb sub-seeds so the truth record matches what was injected
    std::vector<MotionComponent> motions = spec.motions;
    std::uint64_t limb_index = 0;
    for (auto& m : motions) {
        if (m.kind == MotionKind::RandomLimb && m.seed == 0)
            m.seed = substream(spec.seed, detail::kStreamLimbBase + limb_index++);
    }

    // per-channel injected phase: channel 1 sees x-y motion, channel 2 sees
    // x-y plus the projected x-z contribution
    std::vector<double> phase1(n, 0.0), phase2(n, 0.0);
    const double proj2 = std::cos(spec.surv2_theta_rad);
    for (const auto& m : motions) {
        if (m.plane == MotionPlane::XY)
            detail::accumulate_motion_phase(m, 1.0, lambda, spec.sample_rate_hz, phase1);
        else
            detail::accumulate_motion_phase(m, proj2, lambda, spec.sample_rate_hz, phase2);
    }
    for (std::size_t i = 0; i < n; ++i) phase2[i] += phase1[i];

    std::vector<cdouble> surv1(n), surv2(n);
    double motion_power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const cdouble mod1 = delayed[i] * cdouble(std::cos(phase1[i]), std::sin(phase1[i]));
        const cdouble mod2 = delayed[i] * cdouble(std::cos(phase2[i]), std::sin(phase2[i]));
        motion_power += 0.5 * (std::norm(mod1) + std::norm(mod2));
        surv1[i] = mod1 + spec.clutter_amp * delayed[i];
        surv2[i] = mod2 + spec.clutter_amp * delayed[i];
    }
    motion_power /= static_cast<double>(n);

    if (std::isfinite(spec.snr_db)) {
        const double ref_power = motions.empty() ? 1.0 : motion_power;
        const double sigma2 = ref_power * std::pow(10.0, -spec.snr_db / 10.0);
        detail::add_noise(surv1, sigma2, substream(spec.seed, detail::kStreamNoise1));
        detail::add_noise(surv2, sigma2, substream(spec.seed, detail::kStreamNoise2));
    }

    GroundTruth truth;
    truth.motions = motions;
    bool has_breathing = false, has_tremor = false, has_fall = false, has_limb = false;
    for (const auto& m : motions) {
        switch (m.kind) {
            case MotionKind::Breathing:
                has_breathing = true;
                truth.breathing_hz = m.fundamental_hz;
                break;
            case MotionKind::Tremor:
                has_tremor = true;
                truth.tremor_hz = m.fundamental_hz;
                break;
            case MotionKind::Fall:
                has_fall = true;
                truth.fall_onsets_s.push_back(m.onset_s);
                break;
            case MotionKind::RandomLimb:
                has_limb = true;
                break;
        }
    }
    std::sort(truth.fall_onsets_s.begin(), truth.fall_onsets_s.end());
    if (has_fall) truth.label = "fall";
    else if (has_tremor) truth.label = "tremor";
    else if (has_breathing) truth.label = "breathing";
    else if (has_limb) truth.label = "random_motion";
    else truth.label = "no_activity";

    return ScenarioSignals{IqBuffer{std::move(ref), spec.sample_rate_hz},
                           IqBuffer{std::move(surv1), spec.sample_rate_hz},
                           IqBuffer{std::move(surv2), spec.sample_rate_hz},
                           std::move(truth)};
}

}  // namespace wisent
