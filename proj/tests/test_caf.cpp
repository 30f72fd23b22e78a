#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_oracles.hpp"
#include "wisent/caf.hpp"
#include "wisent/rng.hpp"
#include "wisent/signal_model.hpp"

using namespace wisent;

namespace {

IqBuffer noise_buffer(std::size_t n, std::uint64_t seed, double rate) {
    Rng rng(seed);
    std::vector<cdouble> v(n);
    for (auto& s : v) s = cdouble(rng.next_gaussian(), rng.next_gaussian());
    return IqBuffer{std::move(v), rate};
}

}  // namespace

TEST_CASE("doppler_resolution_hz is the reciprocal integration time") {
    // 5 s of integration resolves 0.2 Hz
    REQUIRE(doppler_resolution_hz(1e5, 500000) == 0.2);
    REQUIRE(doppler_resolution_hz(1000, 1000) == 1.0);
    REQUIRE(doppler_resolution_hz(48000, 480000) == 0.1);
    REQUIRE_THROWS_AS(doppler_resolution_hz(1000, 0), std::invalid_argument);
}

TEST_CASE("matched input peaks at zero delay and zero Doppler") {
    const IqBuffer r = noise_buffer(4096, 1, 1000.0);
    const CafMap map = compute_caf(r, r, 8, doppler_grid(5.0, 0.25));
    const auto [tau, f] = map.peak();
    REQUIRE(tau == 0);
    REQUIRE(f == 0.0);
}

TEST_CASE("pure on-grid Doppler shift peaks at (0, f0)") {
    const double fs = 1000.0;
    const double f0 = 2.0;
    const IqBuffer r = noise_buffer(4096, 2, fs);
    IqBuffer s = r;
    for (std::size_t n = 0; n < s.size(); ++n)
        s.samples[n] *= std::polar(1.0, kTwoPi * f0 * static_cast<double>(n) / fs);
    const CafMap map = compute_caf(r, s, 4, doppler_grid(5.0, 0.25));
    const auto [tau, f] = map.peak();
    REQUIRE(tau == 0);
    REQUIRE(f == Catch::Approx(f0).margin(1e-12));
}

TEST_CASE("delayed and shifted surveillance peaks at (lag, f0)") {
    const double fs = 1000.0;
    const double f0 = -1.5;
    const std::size_t lag = 5;
    const IqBuffer src = noise_buffer(4200, 3, fs);
    IqBuffer r, s;
    r.sample_rate_hz = s.sample_rate_hz = fs;
    r.samples.assign(src.samples.begin() + lag, src.samples.end());
    s.samples.assign(src.samples.begin(), src.samples.end() - lag);
    for (std::size_t n = 0; n < s.size(); ++n)
        s.samples[n] *= std::polar(1.0, kTwoPi * f0 * static_cast<double>(n) / fs);
    const CafMap map = compute_caf(r, s, 10, doppler_grid(4.0, 0.25));
    const auto [tau, f] = map.peak();
    REQUIRE(tau == lag);
    REQUIRE(f == Catch::Approx(f0).margin(1e-12));
}

TEST_CASE("constant radial speed scenario peaks within one resolution cell of the shift formula") {
    // surv = ref rotated by the Doppler of a 0.05 m/s head-on approach
    const double fs = 2000.0;
    const double carrier = 2.4e9;
    const double speed = 0.05;
    const double f_d = doppler_shift_hz(carrier, speed, 0.0);  // ~0.4 Hz

    const IqBuffer r = synth_source(static_cast<std::size_t>(8 * fs), fs, 17);
    IqBuffer s = r;
    for (std::size_t n = 0; n < s.size(); ++n)
        s.samples[n] *= std::polar(1.0, kTwoPi * f_d * static_cast<double>(n) / fs);

    const double cell = doppler_resolution_hz(fs, r.size());
    const CafMap map = compute_caf(r, s, 2, doppler_grid(2.0, cell / 4.0));
    const auto [tau, f] = map.peak();
    REQUIRE(tau == 0);
    REQUIRE(std::abs(f - f_d) <= cell);
}

TEST_CASE("CAF matches the literal ambiguity sum") {
    const double fs = 1000.0;
    const IqBuffer r = noise_buffer(2048, 4, fs);
    const IqBuffer s = noise_buffer(2048, 5, fs);
    const std::vector<double> grid = {-3.0, -0.7, 0.0, 1.3, 4.9};
    const CafMap map = compute_caf(r, s, 6, grid);
    for (std::size_t tau = 0; tau <= 6; ++tau) {
        for (std::size_t fi = 0; fi < grid.size(); ++fi) {
            const double expect = oracle::caf_point(r.samples, s.samples, fs, tau, grid[fi]);
            REQUIRE(map.values[tau][fi] == Catch::Approx(expect).epsilon(1e-6).margin(1e-9));
        }
    }
}

TEST_CASE("real-envelope inputs give a Doppler-symmetric magnitude") {
    const double fs = 1000.0;
    Rng rng(6);
    IqBuffer r, s;
    r.sample_rate_hz = s.sample_rate_hz = fs;
    r.samples.resize(1024);
    s.samples.resize(1024);
    for (std::size_t n = 0; n < r.size(); ++n) {
        r.samples[n] = cdouble(rng.next_gaussian(), 0.0);
        s.samples[n] = cdouble(rng.next_gaussian(), 0.0);
    }
    const std::vector<double> grid = doppler_grid(3.0, 0.5);
    const CafMap map = compute_caf(r, s, 3, grid);
    const std::size_t m = grid.size();
    for (std::size_t tau = 0; tau <= 3; ++tau)
        for (std::size_t fi = 0; fi < m; ++fi)
            REQUIRE(map.values[tau][fi] == Catch::Approx(map.values[tau][m - 1 - fi]).epsilon(1e-9));
}

TEST_CASE("compute_caf validates tau_max") {
    const IqBuffer r = noise_buffer(64, 7, 1000.0);
    REQUIRE_THROWS_AS(compute_caf(r, r, 64, doppler_grid(1.0, 0.5)), std::invalid_argument);
}
