#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wisent/signal_model.hpp"

using namespace wisent;

namespace {

double mean_power(const IqBuffer& buf) {
    double p = 0.0;
    for (const auto& v : buf.samples) p += std::norm(v);
    return p / static_cast<double>(buf.size());
}

ScenarioSpec small_spec() {
    ScenarioSpec spec;
    spec.duration_s = 4.0;
    spec.sample_rate_hz = 8000.0;
    spec.snr_db = std::numeric_limits<double>::infinity();
    spec.clutter_amp = 0.0;
    spec.seed = 42;
    return spec;
}

MotionComponent breathing(double hz, double amp = 0.005, double onset = 0.0, double dur = 1e9) {
    MotionComponent m;
    m.kind = MotionKind::Breathing;
    m.plane = MotionPlane::XY;
    m.fundamental_hz = hz;
    m.displacement_amp_m = amp;
    m.onset_s = onset;
    m.duration_s = dur;
    return m;
}

MotionComponent fall(double onset, double disp = 0.5, double dur = 0.5) {
    MotionComponent m;
    m.kind = MotionKind::Fall;
    m.plane = MotionPlane::XZ;
    m.fundamental_hz = 0.0;
    m.fall_displacement_m = disp;
    m.onset_s = onset;
    m.duration_s = dur;
    return m;
}

}  // namespace

TEST_CASE("synth_source produces unit average power") {
    const IqBuffer buf = synth_source(4096, 1e5, 7);
    REQUIRE(buf.size() == 4096);
    REQUIRE(std::abs(mean_power(buf) - 1.0) < 1e-6);
    for (const auto& v : buf.samples) {
        REQUIRE(std::isfinite(v.real()));
        REQUIRE(std::isfinite(v.imag()));
    }
}

TEST_CASE("synth_source is deterministic") {
    const IqBuffer a = synth_source(4096, 1e5, 7);
    const IqBuffer b = synth_source(4096, 1e5, 7);
    REQUIRE(a.samples == b.samples);
}

TEST_CASE("synth_source seeds decorrelate") {
    const IqBuffer a = synth_source(4096, 1e5, 7);
    const IqBuffer b = synth_source(4096, 1e5, 8);
    cdouble acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a.samples[i] * std::conj(b.samples[i]);
    REQUIRE(std::abs(acc) < 0.1 * static_cast<double>(a.size()));
}

TEST_CASE("synth_source rejects zero samples") {
    REQUIRE_THROWS_AS(synth_source(0, 1e5, 7), std::invalid_argument);
}

TEST_CASE("doppler_shift_hz evaluates the shift formula") {
    // 2.4 GHz at 1 m/s head-on: f_o * v / c
    const double f = doppler_shift_hz(2.4e9, 1.0, 0.0);
    REQUIRE(f == Catch::Approx(2.4e9 / 299792458.0).epsilon(1e-12));
    REQUIRE(std::abs(f - 8.0057) < 1e-3);
    REQUIRE(std::abs(doppler_shift_hz(2.4e9, 3.0, kPi / 2.0)) < 1e-9);
    REQUIRE(doppler_shift_hz(2.4e9, 0.0, 0.7) == 0.0);
    REQUIRE_THROWS_AS(doppler_shift_hz(0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("motion_phase maps displacement to phase") {
    const double lambda = 0.125;

    SECTION("half wavelength displacement gives pi") {
        MotionComponent m = fall(0.0, lambda / 2.0, 1.0);
        // raised-cosine ramp reaches full displacement at the end of the window
        REQUIRE(motion_phase(m, 1.0, lambda) == Catch::Approx(kPi).epsilon(1e-12));
    }

    SECTION("zero displacement gives zero phase") {
        MotionComponent m = breathing(1.0);
        REQUIRE(motion_phase(m, 0.0, lambda) == 0.0);
    }

    SECTION("breathing peak: 5 mm at 0.125 m wavelength") {
        MotionComponent m = breathing(0.25, 0.005);
        const double t_peak = 1.0;  // quarter period of 0.25 Hz
        REQUIRE(motion_phase(m, t_peak, lambda) == Catch::Approx(0.251327).margin(1e-6));
        REQUIRE(motion_phase(m, t_peak, lambda) == Catch::Approx(kTwoPi * 0.005 / 0.125).margin(1e-9));
    }

    SECTION("zero outside the active window") {
        MotionComponent m = breathing(1.0, 0.005, 2.0, 3.0);
        REQUIRE(motion_phase(m, 1.9, lambda) == 0.0);
        REQUIRE(motion_phase(m, 5.1, lambda) == 0.0);
    }

    SECTION("doubling the amplitude doubles the phase exactly") {
        MotionComponent m = breathing(0.3, 0.004);
        MotionComponent m2 = breathing(0.3, 0.008);
        for (double t : {0.1, 0.77, 1.9, 3.3})
            REQUIRE(motion_phase(m2, t, lambda) == Catch::Approx(2.0 * motion_phase(m, t, lambda)).margin(1e-15));
    }

    REQUIRE_THROWS_AS(motion_phase(breathing(1.0), 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("synth_scenario: no motion, no noise, clutter reduces to a scaled delayed copy") {
    ScenarioSpec spec = small_spec();
    spec.clutter_amp = 1.0;
    spec.lag_samples = 5;
    const ScenarioSignals sig = synth_scenario(spec);
    REQUIRE(sig.ref.size() == sig.surv1.size());
    // surv1[n] = (1 + clutter) * ref[n - lag]
    for (std::size_t n = spec.lag_samples; n < sig.surv1.size(); ++n) {
        const cdouble expect = 2.0 * sig.ref.samples[n - spec.lag_samples];
        REQUIRE(std::abs(sig.surv1.samples[n] - expect) < 1e-12);
    }
    REQUIRE(sig.truth.label == "no_activity");
}

TEST_CASE("synth_scenario: x-y motion appears identically in both surveillance channels") {
    ScenarioSpec spec = small_spec();
    spec.motions.push_back(breathing(1.0));
    const ScenarioSignals sig = synth_scenario(spec);
    for (std::size_t n = 0; n < sig.surv1.size(); ++n)
        REQUIRE(sig.surv1.samples[n] == sig.surv2.samples[n]);
}

TEST_CASE("synth_scenario: x-z fall leaves surv1 static, modulates surv2") {
    ScenarioSpec spec = small_spec();
    spec.motions.push_back(fall(1.0));
    const ScenarioSignals sig = synth_scenario(spec);

    // surv1 carries no phase modulation at all
    for (std::size_t n = 0; n < sig.surv1.size(); ++n)
        REQUIRE(std::abs(sig.surv1.samples[n] - sig.ref.samples[n]) < 1e-12);

    // surv2 phase relative to the source ramps by cos(theta2) * 2*pi*disp/lambda
    const std::size_t n_end = static_cast<std::size_t>(1.5 * spec.sample_rate_hz);
    const cdouble ratio = sig.surv2.samples[n_end] / sig.ref.samples[n_end];
    const double expected = std::cos(kPi / 4.0) * kTwoPi * 0.5 / spec.wavelength_m();
    const double expected_wrapped = std::remainder(expected, kTwoPi);
    REQUIRE(std::arg(ratio) == Catch::Approx(expected_wrapped).margin(1e-9));
    REQUIRE(sig.truth.label == "fall");
    REQUIRE(sig.truth.fall_onsets_s.size() == 1);
}

TEST_CASE("synth_scenario determinism: identical specs give bit-identical triples") {
    ScenarioSpec spec = small_spec();
    spec.snr_db = 10.0;
    spec.clutter_amp = 0.5;
    spec.motions.push_back(breathing(0.3));
    spec.motions.push_back(fall(2.0));
    const ScenarioSignals a = synth_scenario(spec);
    const ScenarioSignals b = synth_scenario(spec);
    REQUIRE(a.ref.samples == b.ref.samples);
    REQUIRE(a.surv1.samples == b.surv1.samples);
    REQUIRE(a.surv2.samples == b.surv2.samples);
}

TEST_CASE("synth_scenario power contract: realized noise sits snr_db below the motion power") {
    for (double snr : {0.0, 10.0, 20.0}) {
        ScenarioSpec noisy = small_spec();
        noisy.duration_s = 8.0;
        noisy.snr_db = snr;
        noisy.motions.push_back(breathing(0.5));
        ScenarioSpec clean = noisy;
        clean.snr_db = std::numeric_limits<double>::infinity();

        const ScenarioSignals with_noise = synth_scenario(noisy);
        const ScenarioSignals without = synth_scenario(clean);

        double noise_power = 0.0, motion_power = 0.0;
        for (std::size_t n = 0; n < with_noise.surv1.size(); ++n) {
            noise_power += std::norm(with_noise.surv1.samples[n] - without.surv1.samples[n]);
            motion_power += std::norm(without.surv1.samples[n]);  // clutter-free here
        }
        noise_power /= static_cast<double>(with_noise.surv1.size());
        motion_power /= static_cast<double>(with_noise.surv1.size());

        const double realized_db = 10.0 * std::log10(motion_power / noise_power);
        REQUIRE(std::abs(realized_db - snr) < 0.5);
    }
}

TEST_CASE("plane separation: x-z-only scenarios leave surv1 exactly as the no-motion scenario") {
    ScenarioSpec with_fall = small_spec();
    with_fall.clutter_amp = 0.7;
    with_fall.motions.push_back(fall(1.0));
    ScenarioSpec no_motion = with_fall;
    no_motion.motions.clear();

    const ScenarioSignals a = synth_scenario(with_fall);
    const ScenarioSignals b = synth_scenario(no_motion);
    REQUIRE(a.surv1.samples == b.surv1.samples);

    // with noise, the deterministic parts still match sample for sample
    with_fall.snr_db = 5.0;
    no_motion.snr_db = 5.0;
    ScenarioSpec with_fall_clean = with_fall;
    with_fall_clean.snr_db = std::numeric_limits<double>::infinity();
    ScenarioSpec no_motion_clean = no_motion;
    no_motion_clean.snr_db = std::numeric_limits<double>::infinity();
    REQUIRE(synth_scenario(with_fall_clean).surv1.samples ==
            synth_scenario(no_motion_clean).surv1.samples);
}

TEST_CASE("scenario validation rejects inconsistent specs") {
    ScenarioSpec spec = small_spec();
    SECTION("breathing out of band") {
        spec.motions.push_back(breathing(3.0));
        REQUIRE_THROWS_AS(synth_scenario(spec), std::invalid_argument);
    }
    SECTION("unpaired tremor") {
        MotionComponent m;
        m.kind = MotionKind::Tremor;
        m.plane = MotionPlane::XY;
        m.fundamental_hz = 6.0;
        m.displacement_amp_m = 0.002;
        m.duration_s = 4.0;
        spec.motions.push_back(m);
        REQUIRE_THROWS_AS(synth_scenario(spec), std::invalid_argument);
    }
    SECTION("fall in the wrong plane") {
        MotionComponent m = fall(1.0);
        m.plane = MotionPlane::XY;
        spec.motions.push_back(m);
        REQUIRE_THROWS_AS(synth_scenario(spec), std::invalid_argument);
    }
    SECTION("negative duration") {
        spec.duration_s = -1.0;
        REQUIRE_THROWS_AS(synth_scenario(spec), std::invalid_argument);
    }
}
