#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wisent {

using cdouble = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Signalled when an analysis window is shorter than the operation requires.
struct InsufficientWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Signalled on malformed capture files or metadata.
struct FileFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/**
 * Uniformly sampled complex baseband signal. The unit of exchange for all
 * signal operations; samples are dimensionless baseband amplitude.
 */
struct IqBuffer {
    std::vector<cdouble> samples;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

enum class MotionPlane { XY, XZ };
enum class MotionKind { Breathing, Tremor, Fall, RandomLimb };

inline const char* to_string(MotionPlane p) { return p == MotionPlane::XY ? "xy" : "xz"; }
inline const char* to_string(MotionKind k) {
    switch (k) {
        case MotionKind::Breathing: return "breathing";
        case MotionKind::Tremor: return "tremor";
        case MotionKind::Fall: return "fall";
        case MotionKind::RandomLimb: return "random_limb";
    }
    return "?";
}

/**
 * One displacement process attached to the target.
 *
 * Breathing and Tremor are sinusoids at fundamental_hz with peak displacement
 * displacement_amp_m. Fall is a raised-cosine ramp reaching fall_displacement_m
 * over duration_s (fundamental_hz = 0). RandomLimb is a seeded band-limited
 * (<= 3 Hz) aperiodic drift whose scale is set by displacement_amp_m.
 * The waveform is zero outside [onset_s, onset_s + duration_s].
 */
struct MotionComponent {
    MotionPlane plane = MotionPlane::XY;
    MotionKind kind = MotionKind::Breathing;
    double fundamental_hz = 0.0;     // 0 for aperiodic kinds
    double displacement_amp_m = 0.0; // peak displacement, metres
    double onset_s = 0.0;
    double duration_s = 0.0;
    double fall_displacement_m = 0.0; // Fall only
    std::uint64_t seed = 0;           // RandomLimb waveform seed
};

/// Fundamental-frequency limits per motion kind. Breathing covers 12..120
/// breaths per minute; tremor band split Low [4,7) / High [7,11].
inline constexpr double kBreathingMinHz = 0.2;
inline constexpr double kBreathingMaxHz = 2.0;
inline constexpr double kTremorMinHz = 4.0;
inline constexpr double kTremorMaxHz = 11.0;

/**
 * Elevation/azimuth of a surveillance antenna. The first surveillance antenna
 * lies in the x-y plane (theta = 0); the second is tilted to pick up x-z
 * motion, default theta = -pi/4. The x-z phase contribution seen by the tilted
 * antenna is scaled by cos(theta).
 */
struct AntennaGeometry {
    double theta_rad = 0.0;
    double phi_rad = -kPi / 2.0;

    double projection() const { return std::cos(theta_rad); }
};

inline AntennaGeometry default_surv1() { return {0.0, -kPi / 2.0}; }
inline AntennaGeometry default_surv2() { return {-kPi / 4.0, -kPi / 2.0}; }

/**
 * Declarative description of one synthetic trial.
 *
 * snr_db is referenced to the motion-modulated signal component (unit source
 * power when no motions are present); +infinity disables noise entirely.
 * clutter_amp adds a static zero-Doppler copy of the source to both
 * surveillance channels. lag_samples delays the surveillance channels
 * relative to the reference.
 */
struct ScenarioSpec {
    double duration_s = 32.0;
    double sample_rate_hz = 100000.0;
    double carrier_hz = 2.4e9;
    std::vector<MotionComponent> motions;
    double snr_db = 20.0;
    double clutter_amp = 0.0;
    std::uint32_t lag_samples = 0;
    std::uint64_t seed = 1;
    double band_frac = 0.8;          // source bandwidth as a fraction of Nyquist
    double surv2_theta_rad = -kPi / 4.0;

    double wavelength_m() const { return kSpeedOfLight / carrier_hz; }
};

/// What was actually injected into a scenario, for scoring trial outputs.
struct GroundTruth {
    std::vector<MotionComponent> motions;
    std::string label;                 // dominant activity label
    double breathing_hz = 0.0;         // 0 when absent
    double tremor_hz = 0.0;            // 0 when absent
    std::vector<double> fall_onsets_s;
};

/// Per-batch status produced by normalization.
enum class BatchFlag : std::uint8_t { Ok = 0, WarmUp = 1, Degenerate = 2 };

/**
 * Complex per-batch correlation outputs with their timing. t0_s is the centre
 * time of the first batch.
 */
struct BatchSeries {
    std::vector<cdouble> values;
    double batch_rate_hz = 0.0;
    double t0_s = 0.0;
};

/**
 * Real-valued per-batch phase series. When `normalized` is set the values are
 * trailing-window z-scores and raw_mu/raw_sigma hold the window statistics
 * used per batch, so the unnormalized phase can be reconstructed as
 * values[b] * raw_sigma[b] + raw_mu[b].
 */
struct PhaseSeries {
    std::vector<double> values;
    double batch_rate_hz = 0.0;
    double t0_s = 0.0;
    bool normalized = false;
    std::vector<BatchFlag> flags;      // empty means all Ok
    std::vector<double> raw_mu;        // normalized series only
    std::vector<double> raw_sigma;     // normalized series only

    std::size_t size() const { return values.size(); }
    double span_s() const {
        return batch_rate_hz > 0 ? static_cast<double>(values.size()) / batch_rate_hz : 0.0;
    }
    double time_at(std::size_t b) const { return t0_s + static_cast<double>(b) / batch_rate_hz; }
    BatchFlag flag_at(std::size_t b) const { return flags.empty() ? BatchFlag::Ok : flags[b]; }
};

}  // namespace wisent
