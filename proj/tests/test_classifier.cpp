#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "wisent/activity_classifier.hpp"
#include "wisent/phase_extraction.hpp"
#include "wisent/pipeline.hpp"
#include "wisent/rng.hpp"
#include "wisent/signal_model.hpp"

using namespace wisent;

namespace {

// Normalized series with synthetic raw statistics attached, standing in for
// pipeline output inside the pure classifier tests.
PhaseSeries normalized_series(std::vector<double> values, double rate, double raw_sigma) {
    PhaseSeries s;
    s.values = std::move(values);
    s.batch_rate_hz = rate;
    s.normalized = true;
    s.raw_mu.assign(s.values.size(), 0.0);
    s.raw_sigma.assign(s.values.size(), raw_sigma);
    return s;
}

PhaseSeries tone_series(double hz, double rate, double span_s, double raw_sigma = 0.2) {
    const std::size_t n = static_cast<std::size_t>(span_s * rate);
    std::vector<double> v(n);
    for (std::size_t b = 0; b < n; ++b)
        v[b] = std::sqrt(2.0) * std::sin(kTwoPi * hz * static_cast<double>(b) / rate);
    return normalized_series(std::move(v), rate, raw_sigma);
}

PhaseSeries noise_series(std::uint64_t seed, double rate, double span_s, double raw_sigma = 0.2) {
    Rng rng(seed);
    const std::size_t n = static_cast<std::size_t>(span_s * rate);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.next_gaussian();
    return normalized_series(std::move(v), rate, raw_sigma);
}

}  // namespace

TEST_CASE("periodicity_test flags a pure tone as periodic at its frequency") {
    const PhaseSeries phi = tone_series(1.0, 40.0, 20.0);
    const PeriodicityEvidence ev = periodicity_test(phi, {0.5, 2.0});
    REQUIRE(ev.is_periodic);
    REQUIRE(ev.activity);
    const double bin = 40.0 / (10.0 * 40.0);  // Welch segment resolution
    REQUIRE(std::abs(ev.dominant_hz - 1.0) <= bin);
    REQUIRE(ev.concentration >= 0.5);
}

TEST_CASE("periodicity_test calibration: white noise never looks periodic") {
    // concentration distribution over seeded noise windows must keep the
    // threshold above its tail
    std::vector<double> concentrations;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const PhaseSeries phi = noise_series(seed, 40.0, 20.0);
        const PeriodicityEvidence ev = periodicity_test(phi, {0.2, 2.0});
        concentrations.push_back(ev.concentration);
        REQUIRE_FALSE(ev.is_periodic);
    }
    std::sort(concentrations.begin(), concentrations.end());
    const double p99 = concentrations[98];
    ClassifierConfig cfg;
    REQUIRE(cfg.periodicity_threshold > p99);
}

TEST_CASE("periodicity_test: flat input fails the activity floor") {
    const PhaseSeries flat = normalized_series(std::vector<double>(800, 0.0), 40.0, 1e-6);
    const PeriodicityEvidence ev = periodicity_test(flat, {0.2, 2.0});
    REQUIRE_FALSE(ev.activity);
    REQUIRE_FALSE(ev.is_periodic);
}

TEST_CASE("periodicity_test rejects short windows and bad bands") {
    const PhaseSeries phi = tone_series(1.0, 40.0, 10.0);
    REQUIRE_THROWS_AS(periodicity_test(phi, {0.5, 2.0}), InsufficientWindow);
    const PhaseSeries ok = tone_series(1.0, 40.0, 20.0);
    REQUIRE_THROWS_AS(periodicity_test(ok, {0.5, 30.0}), std::invalid_argument);
    PhaseSeries raw = ok;
    raw.normalized = false;
    REQUIRE_THROWS_AS(periodicity_test(raw, {0.5, 2.0}), std::invalid_argument);
}

namespace {

// Full pipeline run on a synthesized scenario, for spike tests.
PipelineResult run_scenario(const ScenarioSpec& spec) {
    const ScenarioSignals sig = synth_scenario(spec);
    PipelineConfig cfg;
    cfg.lag_samples = spec.lag_samples;
    return analyze_buffers(sig.ref, sig.surv1, sig.surv2, cfg);
}

ScenarioSpec composite_spec(std::uint64_t seed, bool with_fall, double fall_onset = 16.0) {
    ScenarioSpec spec;
    spec.duration_s = 32.0;
    spec.sample_rate_hz = 8000.0;
    spec.snr_db = 20.0;
    spec.seed = seed;
    MotionComponent br;
    br.kind = MotionKind::Breathing;
    br.plane = MotionPlane::XY;
    br.fundamental_hz = 0.3;
    br.displacement_amp_m = 0.005;
    br.duration_s = spec.duration_s;
    spec.motions.push_back(br);
    if (with_fall) {
        MotionComponent fl;
        fl.kind = MotionKind::Fall;
        fl.plane = MotionPlane::XZ;
        fl.fall_displacement_m = 0.5;
        fl.onset_s = fall_onset;
        fl.duration_s = 0.5;
        spec.motions.push_back(fl);
    }
    return spec;
}

}  // namespace

TEST_CASE("detect_spike finds a synthesized fall near its true onset") {
    ScenarioSpec spec = composite_spec(5, false);
    spec.motions.clear();
    MotionComponent fl;
    fl.kind = MotionKind::Fall;
    fl.plane = MotionPlane::XZ;
    fl.fall_displacement_m = 0.5;
    fl.onset_s = 16.0;
    fl.duration_s = 0.5;
    spec.motions.push_back(fl);

    const PipelineResult res = run_scenario(spec);
    REQUIRE_FALSE(res.falls.empty());
    REQUIRE(std::abs(res.falls.front().time_s - 16.0) <= 0.5);
}

TEST_CASE("detect_spike stays silent on breathing-only scenarios") {
    const PipelineResult res = run_scenario(composite_spec(6, false));
    REQUIRE(res.falls.empty());
}

TEST_CASE("fall during breathing is detected and breathing periodicity survives") {
    const PipelineResult res = run_scenario(composite_spec(7, true));
    REQUIRE_FALSE(res.falls.empty());
    REQUIRE(std::abs(res.falls.front().time_s - 16.0) <= 0.5);
    // phi1 keeps its breathing periodicity even in the windows that contain
    // the fall
    for (const auto& w : res.windows) {
        REQUIRE(w.decision.evidence1.is_periodic);
        REQUIRE(std::abs(w.decision.evidence1.dominant_hz - 0.3) <= 0.11);
    }
}

TEST_CASE("detect_spike ignores sub-threshold and short excursions") {
    const double rate = 40.0;
    std::vector<double> v(800, 0.0);
    // strong but single-batch blip: too short
    v[400] = 8.0;
    const PhaseSeries phi2c = normalized_series(v, rate, 0.5);
    const PhaseSeries phi1 = normalized_series(std::vector<double>(800, 0.0), rate, 0.01);
    REQUIRE_FALSE(detect_spike(phi2c, phi1).has_value());

    // sustained but weak
    std::vector<double> w(800, 0.0);
    for (std::size_t b = 390; b < 410; ++b) w[b] = 2.0;
    REQUIRE_FALSE(detect_spike(normalized_series(w, rate, 0.5), phi1).has_value());
}

TEST_CASE("detect_spike vetoes events when phi1 is not flat") {
    const double rate = 40.0;
    std::vector<double> v(800, 0.0);
    for (std::size_t b = 400; b < 410; ++b) v[b] = 6.0;
    const PhaseSeries phi2c = normalized_series(v, rate, 0.5);

    // phi1 raw variance above the ceiling around the event
    Rng rng(3);
    std::vector<double> rough(800);
    for (auto& x : rough) x = rng.next_gaussian();
    const PhaseSeries phi1_rough = normalized_series(rough, rate, 2.0);  // raw sigma 2 rad
    REQUIRE_FALSE(detect_spike(phi2c, phi1_rough).has_value());

    // same phi1 shape but at a small raw scale passes
    const PhaseSeries phi1_calm = normalized_series(rough, rate, 0.05);
    REQUIRE(detect_spike(phi2c, phi1_calm).has_value());
}

TEST_CASE("classify_window decision table") {
    PeriodicityEvidence periodic1;
    periodic1.is_periodic = true;
    periodic1.activity = true;
    periodic1.dominant_hz = 1.0;
    PeriodicityEvidence periodic6 = periodic1;
    periodic6.dominant_hz = 6.0;
    PeriodicityEvidence aperiodic;
    aperiodic.is_periodic = false;
    aperiodic.activity = true;
    PeriodicityEvidence silent;
    silent.is_periodic = false;
    silent.activity = false;

    SpikeEvent spike;
    spike.time_s = 1.0;
    spike.peak_z = 9.0;

    // x-y periodic only: breathing
    REQUIRE(classify_window(periodic1, aperiodic, std::nullopt).label == Activity::Breathing);
    // both periodic: tremor
    REQUIRE(classify_window(periodic6, periodic6, std::nullopt).label == Activity::Tremor);
    // spike with both aperiodic: fall
    REQUIRE(classify_window(aperiodic, aperiodic, spike).label == Activity::Fall);
    // both aperiodic with activity: random motion
    REQUIRE(classify_window(aperiodic, aperiodic, std::nullopt).label == Activity::RandomMotion);
    // nothing anywhere: no activity
    REQUIRE(classify_window(silent, silent, std::nullopt).label == Activity::NoActivity);
}

TEST_CASE("decision totality and fall precedence") {
    std::vector<PeriodicityEvidence> evidences;
    for (bool periodic : {false, true}) {
        for (bool activity : {false, true}) {
            if (periodic && !activity) continue;  // unreachable by construction
            PeriodicityEvidence e;
            e.is_periodic = periodic;
            e.activity = activity;
            evidences.push_back(e);
        }
    }
    SpikeEvent spike;
    spike.peak_z = 5.0;

    for (const auto& e1 : evidences) {
        for (const auto& e2 : evidences) {
            // every combination yields exactly one label
            const ActivityDecision no_spike = classify_window(e1, e2, std::nullopt);
            REQUIRE((no_spike.label == Activity::NoActivity || no_spike.label == Activity::RandomMotion ||
                     no_spike.label == Activity::Breathing || no_spike.label == Activity::Tremor));
            // adding a spike always yields Fall
            REQUIRE(classify_window(e1, e2, spike).label == Activity::Fall);
        }
    }
}
