#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "wisent/config.hpp"
#include "wisent/harness.hpp"
#include "wisent/io.hpp"
#include "wisent/rng.hpp"

using namespace wisent;

namespace fs = std::filesystem;

TEST_CASE("IQ files round-trip through float32 exactly") {
    Rng rng(3);
    IqBuffer buf;
    buf.sample_rate_hz = 20000.0;
    buf.samples.resize(1000);
    for (auto& s : buf.samples) s = cdouble(rng.next_gaussian(), rng.next_gaussian());

    const fs::path path = fs::temp_directory_path() / "wisent_io_test.iq";
    write_iq(path.string(), buf);
    const IqBuffer back = read_iq(path.string(), buf.sample_rate_hz);
    REQUIRE(back.size() == buf.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        // stored values are the float32-rounded originals
        REQUIRE(back.samples[i].real() == static_cast<double>(static_cast<float>(buf.samples[i].real())));
        REQUIRE(back.samples[i].imag() == static_cast<double>(static_cast<float>(buf.samples[i].imag())));
    }
    fs::remove(path);
}

TEST_CASE("truncated IQ files are rejected") {
    const fs::path path = fs::temp_directory_path() / "wisent_io_bad.iq";
    {
        std::ofstream out(path, std::ios::binary);
        out.write("abc", 3);  // not a whole number of pairs
    }
    REQUIRE_THROWS_AS(read_iq(path.string(), 1000.0), FileFormatError);
    fs::remove(path);
}

TEST_CASE("IQ files carrying non-finite samples are rejected") {
    const fs::path path = fs::temp_directory_path() / "wisent_io_nan.iq";
    {
        IqBuffer buf;
        buf.sample_rate_hz = 1000.0;
        buf.samples = {cdouble(1.0, 2.0), cdouble(std::numeric_limits<double>::quiet_NaN(), 0.0)};
        write_iq(path.string(), buf);
    }
    REQUIRE_THROWS_AS(read_iq(path.string(), 1000.0), FileFormatError);
    fs::remove(path);
}

TEST_CASE("metadata sidecar round-trips") {
    const fs::path path = fs::temp_directory_path() / "wisent_meta_test.txt";
    write_iq_metadata(path.string(), {48000.0, 2.4e9});
    const IqMetadata meta = read_iq_metadata(path.string());
    REQUIRE(meta.sample_rate_hz == 48000.0);
    REQUIRE(meta.carrier_hz == 2.4e9);
    fs::remove(path);
}

TEST_CASE("metadata without a sample rate is rejected") {
    const fs::path path = fs::temp_directory_path() / "wisent_meta_bad.txt";
    {
        std::ofstream out(path);
        out << "carrier_hz = 2.4e9\n";
    }
    REQUIRE_THROWS_AS(read_iq_metadata(path.string()), FileFormatError);
    fs::remove(path);
}

TEST_CASE("phase series export format") {
    PhaseSeries phi;
    phi.values = {0.5, -1.25};
    phi.batch_rate_hz = 40.0;
    phi.t0_s = 0.025;
    phi.flags = {BatchFlag::WarmUp, BatchFlag::Ok};
    std::ostringstream out;
    write_phase_series(out, phi);
    std::istringstream in(out.str());
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    REQUIRE(header == "batch_index\ttime_s\tvalue\tdegenerate_flag");
    REQUIRE(row0 == "0\t0.025\t0.5\t1");
    REQUIRE(row1 == "1\t0.05\t-1.25\t0");
}

TEST_CASE("config parser handles sections, lists and comments") {
    const std::string text = R"(
# a scenario
duration_s = 32        # seconds
sample_rate_hz = 8000
snr_db = inf
seed = 77

[[motion]]
kind = breathing
plane = xy
fundamental_hz = 0.3

[[motion]]
kind = fall
onset_s = 14
duration_s = 0.5
)";
    const ConfigNode node = parse_config_string(text);
    REQUIRE(node.get_double("duration_s", 0.0) == 32.0);
    REQUIRE(std::isinf(node.get_double("snr_db", 0.0)));
    REQUIRE(node.get_u64("seed", 0) == 77);
    REQUIRE(node.lists.at("motion").size() == 2);

    const ScenarioSpec spec = scenario_from_config(node);
    REQUIRE(spec.motions.size() == 2);
    REQUIRE(spec.motions[0].kind == MotionKind::Breathing);
    REQUIRE(spec.motions[0].fundamental_hz == 0.3);
    REQUIRE(spec.motions[1].kind == MotionKind::Fall);
    REQUIRE(spec.motions[1].plane == MotionPlane::XZ);  // fall defaults to x-z
    REQUIRE(spec.motions[1].onset_s == 14.0);
}

TEST_CASE("config parser rejects malformed lines and values") {
    REQUIRE_THROWS_AS(parse_config_string("not a key value line"), std::invalid_argument);
    REQUIRE_THROWS_AS(parse_config_string("duration_s = banana").get_double("duration_s", 1.0),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(parse_config_string("x = 1").require_double("missing"), std::invalid_argument);
}

TEST_CASE("sweep config round-trip covers axis, values and base scenario") {
    const std::string text = R"(
axis = snr_db
values = -10, 0, 10, 20
trials_per_point = 5
seed_base = 42
mix = breathing, tremor
tremor_excl_lo_hz = 6.8
tremor_excl_hi_hz = 7.2

[base_scenario]
duration_s = 32
sample_rate_hz = 8000
)";
    const SweepSpec sweep = sweep_from_config(parse_config_string(text));
    REQUIRE(sweep.axis == SweepAxis::SnrDb);
    REQUIRE(sweep.values == std::vector<double>{-10.0, 0.0, 10.0, 20.0});
    REQUIRE(sweep.trials_per_point == 5);
    REQUIRE(sweep.seed_base == 42);
    REQUIRE(sweep.mix == std::vector<std::string>{"breathing", "tremor"});
    REQUIRE(sweep.randomize.tremor_excl_lo_hz == 6.8);
    REQUIRE(sweep.base_scenario.duration_s == 32.0);
    REQUIRE(sweep.base_scenario.sample_rate_hz == 8000.0);
}

TEST_CASE("pipeline config overrides defaults") {
    const std::string text = R"(
normalize_window_s = 8
spike_threshold_z = 5
breathing_lo_hz = 0.25
)";
    const PipelineConfig cfg = pipeline_from_config(parse_config_string(text));
    REQUIRE(cfg.normalize_window_s == 8.0);
    REQUIRE(cfg.classifier.spike_threshold_z == 5.0);
    REQUIRE(cfg.estimator.breathing_lo_hz == 0.25);
    REQUIRE(cfg.batch_len_s == 0.05);  // untouched default
}

TEST_CASE("scenario serialization is stable and hashable") {
    ScenarioSpec spec;
    spec.seed = 9;
    MotionComponent m;
    m.kind = MotionKind::Breathing;
    m.fundamental_hz = 0.3;
    m.duration_s = 32.0;
    spec.motions.push_back(m);

    const std::string a = scenario_to_config_text(spec);
    const std::string b = scenario_to_config_text(spec);
    REQUIRE(a == b);
    REQUIRE(fnv1a_hash(a) == fnv1a_hash(b));

    // the serialized form parses back to the same scenario
    const ScenarioSpec back = scenario_from_config(parse_config_string(a));
    REQUIRE(back.seed == spec.seed);
    REQUIRE(back.motions.size() == 1);
    REQUIRE(back.motions[0].fundamental_hz == 0.3);
    REQUIRE(scenario_to_config_text(back) == a);

    spec.seed = 10;
    REQUIRE(fnv1a_hash(scenario_to_config_text(spec)) != fnv1a_hash(a));
}
