#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "wisent/caf.hpp"
#include "wisent/types.hpp"

namespace wisent {

/// Sidecar metadata carried next to a raw IQ capture.
struct IqMetadata {
    double sample_rate_hz = 0.0;
    double carrier_hz = 0.0;
};

namespace detail {

inline void put_f32_le(std::ofstream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    const unsigned char b[4] = {static_cast<unsigned char>(bits & 0xFF),
                                static_cast<unsigned char>((bits >> 8) & 0xFF),
                                static_cast<unsigned char>((bits >> 16) & 0xFF),
                                static_cast<unsigned char>((bits >> 24) & 0xFF)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline float get_f32_le(const unsigned char* b) {
    const std::uint32_t bits = static_cast<std::uint32_t>(b[0]) |
                               (static_cast<std::uint32_t>(b[1]) << 8) |
                               (static_cast<std::uint32_t>(b[2]) << 16) |
                               (static_cast<std::uint32_t>(b[3]) << 24);
    float v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

}  // namespace detail

/**
 * Writes a capture as headerless little-endian interleaved float32 (I, Q)
 * pairs, the format common SDR tools exchange. Samples are narrowed from
 * double to float32.
 */
inline void write_iq(const std::string& path, const IqBuffer& buf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileFormatError("write_iq: cannot open " + path);
    for (const auto& s : buf.samples) {
        detail::put_f32_le(out, static_cast<float>(s.real()));
        detail::put_f32_le(out, static_cast<float>(s.imag()));
    }
    if (!out) throw FileFormatError("write_iq: write failed for " + path);
}

inline IqBuffer read_iq(const std::string& path, double sample_rate_hz) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw FileFormatError("read_iq: cannot open " + path);
    const std::streamoff bytes = in.tellg();
    if (bytes < 0 || bytes % 8 != 0)
        throw FileFormatError("read_iq: " + path + " is not a whole number of float32 IQ pairs");
    in.seekg(0);
    const std::size_t n = static_cast<std::size_t>(bytes) / 8;
    std::vector<unsigned char> raw(static_cast<std::size_t>(bytes));
    if (n > 0) in.read(reinterpret_cast<char*>(raw.data()), bytes);
    if (!in) throw FileFormatError("read_iq: short read on " + path);

    IqBuffer buf;
    buf.sample_rate_hz = sample_rate_hz;
    buf.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const float re = detail::get_f32_le(raw.data() + 8 * i);
        const float im = detail::get_f32_le(raw.data() + 8 * i + 4);
        if (!std::isfinite(re) || !std::isfinite(im))
            throw FileFormatError("read_iq: non-finite sample at index " + std::to_string(i) +
                                  " in " + path);
        buf.samples[i] = cdouble(re, im);
    }
    return buf;
}

inline void write_iq_metadata(const std::string& path, const IqMetadata& meta) {
    std::ofstream out(path);
    if (!out) throw FileFormatError("write_iq_metadata: cannot open " + path);
    out << std::setprecision(17);
    out << "sample_rate_hz = " << meta.sample_rate_hz << "\n";
    out << "carrier_hz = " << meta.carrier_hz << "\n";
}

inline IqMetadata read_iq_metadata(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("read_iq_metadata: cannot open " + path);
    IqMetadata meta;
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            s = a == std::string::npos ? "" : s.substr(a, b - a + 1);
        };
        strip(key);
        strip(val);
        try {
            if (key == "sample_rate_hz") meta.sample_rate_hz = std::stod(val);
            else if (key == "carrier_hz") meta.carrier_hz = std::stod(val);
        } catch (const std::exception&) {
            throw FileFormatError("read_iq_metadata: bad value for " + key);
        }
    }
    if (meta.sample_rate_hz <= 0.0)
        throw FileFormatError("read_iq_metadata: sample_rate_hz missing or not positive");
    return meta;
}

/// One record per batch: batch_index, time_s, value, degenerate_flag.
inline void write_phase_series(std::ostream& out, const PhaseSeries& phi, char delim = '\t') {
    out << "batch_index" << delim << "time_s" << delim << "value" << delim << "degenerate_flag\n";
    out << std::setprecision(12);
    for (std::size_t b = 0; b < phi.values.size(); ++b) {
        out << b << delim << phi.time_at(b) << delim << phi.values[b] << delim
            << static_cast<int>(phi.flag_at(b)) << "\n";
    }
}

inline void write_phase_series(const std::string& path, const PhaseSeries& phi, char delim = '\t') {
    std::ofstream out(path);
    if (!out) throw FileFormatError("write_phase_series: cannot open " + path);
    write_phase_series(out, phi, delim);
}

/// Magnitude matrix (rows = delays) plus delay/doppler axis sidecars.
inline void write_caf(const std::string& matrix_path, const std::string& delay_axis_path,
                      const std::string& doppler_axis_path, const CafMap& map) {
    std::ofstream m(matrix_path);
    if (!m) throw FileFormatError("write_caf: cannot open " + matrix_path);
    m << std::setprecision(12);
    for (const auto& row : map.values) {
        for (std::size_t i = 0; i < row.size(); ++i) m << (i ? "\t" : "") << row[i];
        m << "\n";
    }
    std::ofstream d(delay_axis_path);
    if (!d) throw FileFormatError("write_caf: cannot open " + delay_axis_path);
    for (auto t : map.delay_axis) d << t << "\n";
    std::ofstream f(doppler_axis_path);
    if (!f) throw FileFormatError("write_caf: cannot open " + doppler_axis_path);
    f << std::setprecision(12);
    for (auto hz : map.doppler_axis) f << hz << "\n";
}

}  // namespace wisent
