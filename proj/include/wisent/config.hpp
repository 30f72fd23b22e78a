#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wisent/pipeline.hpp"
#include "wisent/types.hpp"

namespace wisent {

/**
 * Minimal structured-text config reader: `key = value` pairs, `[section]`
 * tables and repeatable `[[entry]]` tables, `#` comments. Values are kept
 * as strings and converted on access.
 */
struct ConfigNode {
    std::map<std::string, std::string> values;
    std::map<std::string, ConfigNode> sections;
    std::map<std::string, std::vector<ConfigNode>> lists;

    bool has(const std::string& key) const { return values.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        return parse_double(key, it->second);
    }

    double require_double(const std::string& key) const {
        auto it = values.find(key);
        if (it == values.end()) throw std::invalid_argument("config: missing key '" + key + "'");
        return parse_double(key, it->second);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        try {
            return std::stoull(it->second);
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad integer for '" + key + "': " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        if (it->second == "true" || it->second == "1") return true;
        if (it->second == "false" || it->second == "0") return false;
        throw std::invalid_argument("config: bad boolean for '" + key + "': " + it->second);
    }

    std::vector<double> get_double_list(const std::string& key) const {
        std::vector<double> out;
        auto it = values.find(key);
        if (it == values.end()) return out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ','))
            out.push_back(parse_double(key, tok));
        return out;
    }

    std::vector<std::string> get_string_list(const std::string& key) const {
        std::vector<std::string> out;
        auto it = values.find(key);
        if (it == values.end()) return out;
        std::stringstream ss(it->second);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
        return out;
    }

    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r\"");
        const auto b = s.find_last_not_of(" \t\r\"");
        return a == std::string::npos ? "" : s.substr(a, b - a + 1);
    }

private:
    static double parse_double(const std::string& key, const std::string& raw) {
        const std::string v = trim(raw);
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        if (v == "-inf") return -std::numeric_limits<double>::infinity();
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument("trailing characters");
            return d;
        } catch (const std::exception&) {
            throw std::invalid_argument("config: bad number for '" + key + "': " + v);
        }
    }
};

inline ConfigNode parse_config(std::istream& in) {
    ConfigNode root;
    ConfigNode* section = &root;  // last [section] (or root)
    ConfigNode* target = &root;   // where key = value lines land
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = ConfigNode::trim(line);
        if (t.empty()) continue;
        if (t.size() > 4 && t.substr(0, 2) == "[[" && t.substr(t.size() - 2) == "]]") {
            const std::string name = ConfigNode::trim(t.substr(2, t.size() - 4));
            section->lists[name].emplace_back();
            target = &section->lists[name].back();
        } else if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
            const std::string name = ConfigNode::trim(t.substr(1, t.size() - 2));
            section = &root.sections[name];
            target = section;
        } else {
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                            " is not 'key = value': " + t);
            const std::string key = ConfigNode::trim(t.substr(0, eq));
            const std::string val = ConfigNode::trim(t.substr(eq + 1));
            if (key.empty()) throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
            target->values[key] = val;
        }
    }
    return root;
}

inline ConfigNode parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ConfigNode load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    return parse_config(in);
}

inline MotionPlane plane_from_string(const std::string& s) {
    if (s == "xy") return MotionPlane::XY;
    if (s == "xz") return MotionPlane::XZ;
    throw std::invalid_argument("config: unknown plane '" + s + "' (expected xy or xz)");
}

inline MotionKind kind_from_string(const std::string& s) {
    if (s == "breathing") return MotionKind::Breathing;
    if (s == "tremor") return MotionKind::Tremor;
    if (s == "fall") return MotionKind::Fall;
    if (s == "random_limb") return MotionKind::RandomLimb;
    throw std::invalid_argument("config: unknown motion kind '" + s + "'");
}

inline MotionComponent motion_from_config(const ConfigNode& node) {
    MotionComponent m;
    m.kind = kind_from_string(node.get_string("kind", "breathing"));
    const std::string default_plane = m.kind == MotionKind::Fall ? "xz" : "xy";
    m.plane = plane_from_string(node.get_string("plane", default_plane));
    m.fundamental_hz = node.get_double("fundamental_hz", 0.0);
    m.displacement_amp_m = node.get_double("displacement_amp_m",
                                           m.kind == MotionKind::Breathing ? 0.005
                                           : m.kind == MotionKind::Tremor  ? 0.002
                                                                           : 0.02);
    m.onset_s = node.get_double("onset_s", 0.0);
    m.duration_s = node.get_double("duration_s", 0.0);
    m.fall_displacement_m = node.get_double("fall_displacement_m", 0.5);
    m.seed = node.get_u64("seed", 0);
    return m;
}

inline ScenarioSpec scenario_from_config(const ConfigNode& node) {
    ScenarioSpec spec;
    spec.duration_s = node.get_double("duration_s", spec.duration_s);
    spec.sample_rate_hz = node.get_double("sample_rate_hz", spec.sample_rate_hz);
    spec.carrier_hz = node.get_double("carrier_hz", spec.carrier_hz);
    spec.snr_db = node.get_double("snr_db", spec.snr_db);
    spec.clutter_amp = node.get_double("clutter_amp", spec.clutter_amp);
    spec.lag_samples = static_cast<std::uint32_t>(node.get_u64("lag_samples", spec.lag_samples));
    spec.seed = node.get_u64("seed", spec.seed);
    spec.band_frac = node.get_double("band_frac", spec.band_frac);
    spec.surv2_theta_rad = node.get_double("surv2_theta_rad", spec.surv2_theta_rad);
    auto it = node.lists.find("motion");
    if (it != node.lists.end()) {
        for (const auto& mn : it->second) {
            MotionComponent m = motion_from_config(mn);
            if (m.duration_s <= 0.0) m.duration_s = spec.duration_s - m.onset_s;
            spec.motions.push_back(m);
        }
    }
    return spec;
}

inline PipelineConfig pipeline_from_config(const ConfigNode& node) {
    PipelineConfig cfg;
    cfg.batch_len_s = node.get_double("batch_len_s", cfg.batch_len_s);
    cfg.overlap_frac = node.get_double("overlap_frac", cfg.overlap_frac);
    cfg.lag_samples = static_cast<std::size_t>(node.get_u64("lag_samples", cfg.lag_samples));
    cfg.normalize_window_s = node.get_double("normalize_window_s", cfg.normalize_window_s);
    cfg.window_hop_s = node.get_double("window_hop_s", cfg.window_hop_s);
    cfg.classifier.window_span_s = node.get_double("window_span_s", cfg.classifier.window_span_s);
    cfg.classifier.min_span_s = std::min(cfg.classifier.min_span_s, cfg.classifier.window_span_s);
    cfg.classifier.periodicity_threshold =
        node.get_double("periodicity_threshold", cfg.classifier.periodicity_threshold);
    cfg.classifier.activity_floor_rad = node.get_double("activity_floor_rad", cfg.classifier.activity_floor_rad);
    cfg.classifier.welch_segment_s = node.get_double("welch_segment_s", cfg.classifier.welch_segment_s);
    cfg.classifier.spike_threshold_z = node.get_double("spike_threshold_z", cfg.classifier.spike_threshold_z);
    cfg.classifier.spike_min_width_s = node.get_double("spike_min_width_s", cfg.classifier.spike_min_width_s);
    cfg.classifier.flatness_ceiling_rad2 =
        node.get_double("flatness_ceiling_rad2", cfg.classifier.flatness_ceiling_rad2);
    cfg.classifier.band_lo_hz = node.get_double("band_lo_hz", cfg.classifier.band_lo_hz);
    cfg.classifier.band_hi_hz = node.get_double("band_hi_hz", cfg.classifier.band_hi_hz);
    cfg.estimator.confidence_floor = node.get_double("confidence_floor", cfg.estimator.confidence_floor);
    cfg.estimator.breathing_lo_hz = node.get_double("breathing_lo_hz", cfg.estimator.breathing_lo_hz);
    cfg.estimator.breathing_hi_hz = node.get_double("breathing_hi_hz", cfg.estimator.breathing_hi_hz);
    cfg.estimator.tremor_split_hz = node.get_double("tremor_split_hz", cfg.estimator.tremor_split_hz);
    cfg.estimator.fall_merge_radius_s = node.get_double("fall_merge_radius_s", cfg.estimator.fall_merge_radius_s);
    return cfg;
}

/// Canonical text form of a scenario; also the basis of the config hash.
inline std::string scenario_to_config_text(const ScenarioSpec& spec) {
    std::ostringstream out;
    out.precision(17);
    out << "duration_s = " << spec.duration_s << "\n";
    out << "sample_rate_hz = " << spec.sample_rate_hz << "\n";
    out << "carrier_hz = " << spec.carrier_hz << "\n";
    out << "snr_db = " << spec.snr_db << "\n";
    out << "clutter_amp = " << spec.clutter_amp << "\n";
    out << "lag_samples = " << spec.lag_samples << "\n";
    out << "seed = " << spec.seed << "\n";
    out << "band_frac = " << spec.band_frac << "\n";
    out << "surv2_theta_rad = " << spec.surv2_theta_rad << "\n";
    for (const auto& m : spec.motions) {
        out << "\n[[motion]]\n";
        out << "plane = " << to_string(m.plane) << "\n";
        out << "kind = " << to_string(m.kind) << "\n";
        out << "fundamental_hz = " << m.fundamental_hz << "\n";
        out << "displacement_amp_m = " << m.displacement_amp_m << "\n";
        out << "onset_s = " << m.onset_s << "\n";
        out << "duration_s = " << m.duration_s << "\n";
        out << "fall_displacement_m = " << m.fall_displacement_m << "\n";
        out << "seed = " << m.seed << "\n";
    }
    return out.str();
}

inline std::string pipeline_to_config_text(const PipelineConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "batch_len_s = " << cfg.batch_len_s << "\n";
    out << "overlap_frac = " << cfg.overlap_frac << "\n";
    out << "lag_samples = " << cfg.lag_samples << "\n";
    out << "normalize_window_s = " << cfg.normalize_window_s << "\n";
    out << "window_hop_s = " << cfg.window_hop_s << "\n";
    out << "window_span_s = " << cfg.classifier.window_span_s << "\n";
    out << "periodicity_threshold = " << cfg.classifier.periodicity_threshold << "\n";
    out << "activity_floor_rad = " << cfg.classifier.activity_floor_rad << "\n";
    out << "welch_segment_s = " << cfg.classifier.welch_segment_s << "\n";
    out << "spike_threshold_z = " << cfg.classifier.spike_threshold_z << "\n";
    out << "spike_min_width_s = " << cfg.classifier.spike_min_width_s << "\n";
    out << "flatness_ceiling_rad2 = " << cfg.classifier.flatness_ceiling_rad2 << "\n";
    out << "band_lo_hz = " << cfg.classifier.band_lo_hz << "\n";
    out << "band_hi_hz = " << cfg.classifier.band_hi_hz << "\n";
    out << "confidence_floor = " << cfg.estimator.confidence_floor << "\n";
    out << "breathing_lo_hz = " << cfg.estimator.breathing_lo_hz << "\n";
    out << "breathing_hi_hz = " << cfg.estimator.breathing_hi_hz << "\n";
    out << "tremor_split_hz = " << cfg.estimator.tremor_split_hz << "\n";
    out << "fall_merge_radius_s = " << cfg.estimator.fall_merge_radius_s << "\n";
    return out.str();
}

/// FNV-1a, for the reproducibility hashes embedded in trial reports.
inline std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace wisent
