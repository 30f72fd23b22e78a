// Command-line front end: synthesize scenario captures, run single trials,
// batch sweeps, and replay recorded IQ captures through the pipeline.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wisent/records.hpp"
#include "wisent/wisent.hpp"

namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("WISENT_OUT_DIR");
    return env && *env ? env : ".";
}

wisent::PipelineConfig load_pipeline(const std::string& path) {
    if (path.empty()) return {};
    return wisent::pipeline_from_config(wisent::load_config(path));
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    return out;
}

void print_trial(const wisent::TrialReport& report, std::ostream& out) {
    out << "scenario: " << report.scenario_id << "\n";
    if (report.failed) {
        out << "  FAILED: " << report.error << "\n";
        return;
    }
    out << "  truth: " << report.truth.label << "\n";
    out << "  decision: " << to_string(report.decision)
        << (report.correct_label ? "  (correct)" : "  (wrong)") << "\n";
    if (report.median_rate_bpm)
        out << "  breathing rate: " << *report.median_rate_bpm << " bpm ("
            << report.breathing_estimates.size() << " window estimates)\n";
    if (report.tremor_band)
        out << "  tremor band: " << (*report.tremor_band == wisent::TremorBand::Low ? "low" : "high") << "\n";
    for (const auto& f : report.falls)
        out << "  fall at " << f.time_s << " s (peak " << f.peak_z << " z)\n";
    if (report.abs_rate_error_bpm) out << "  rate error: " << *report.abs_rate_error_bpm << " bpm\n";
    if (report.fall_latency_s) out << "  fall latency: " << *report.fall_latency_s << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"passive bistatic WiFi sensing pipeline: synthesis, extraction, classification"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string out_dir = default_out_dir();
    app.add_option("--out-dir", out_dir, "output directory (default $WISENT_OUT_DIR or .)");

    std::string scenario_path, pipeline_path, sweep_path;
    std::uint64_t seed_override = 0;
    bool have_seed = false;
    bool nlos = false;

    auto* synth = app.add_subcommand("synth", "synthesize a scenario and write IQ capture files");
    synth->add_option("--scenario", scenario_path, "scenario config file")->required();
    synth->add_option("--seed", seed_override, "override the scenario seed")->each([&](const std::string&) {
        have_seed = true;
    });
    synth->add_flag("--nlos", nlos, "apply the obstructed-path preset (lower SNR, stronger clutter)");

    auto* run = app.add_subcommand("run", "run one scenario through the pipeline");
    run->add_option("--scenario", scenario_path, "scenario config file")->required();
    run->add_option("--pipeline", pipeline_path, "pipeline config file");
    run->add_option("--seed", seed_override, "override the scenario seed")->each([&](const std::string&) {
        have_seed = true;
    });
    run->add_flag("--nlos", nlos, "apply the obstructed-path preset");

    auto* sweep = app.add_subcommand("sweep", "run a batch sweep from a sweep spec");
    sweep->add_option("--spec", sweep_path, "sweep spec file")->required();
    sweep->add_option("--pipeline", pipeline_path, "pipeline config file");
    sweep->add_option("--seed", seed_override, "override seed_base")->each([&](const std::string&) {
        have_seed = true;
    });

    bool dump_phase = false;
    run->add_flag("--dump-phase", dump_phase, "also write phi1.tsv / phi2c.tsv batch series");

    std::string ref_path, surv1_path, surv2_path, meta_path;
    auto* replay = app.add_subcommand("replay", "run the pipeline on recorded IQ captures");
    replay->add_option("--ref", ref_path, "reference channel IQ file")->required();
    replay->add_option("--surv1", surv1_path, "surveillance channel 1 IQ file")->required();
    replay->add_option("--surv2", surv2_path, "surveillance channel 2 IQ file")->required();
    replay->add_option("--meta", meta_path, "metadata sidecar file")->required();
    replay->add_option("--pipeline", pipeline_path, "pipeline config file");
    replay->add_flag("--dump-phase", dump_phase, "also write phi1.tsv / phi2c.tsv batch series");

    std::size_t tau_max = 64;
    double doppler_span = 50.0, doppler_step = 0.1;
    auto* caf = app.add_subcommand("caf", "delay-Doppler ambiguity map of a capture pair");
    caf->add_option("--ref", ref_path, "reference channel IQ file")->required();
    caf->add_option("--surv", surv1_path, "surveillance channel IQ file")->required();
    caf->add_option("--meta", meta_path, "metadata sidecar file")->required();
    caf->add_option("--tau-max", tau_max, "largest delay in samples (default 64)");
    caf->add_option("--doppler-span", doppler_span, "half-width of the Doppler grid in Hz (default 50)");
    caf->add_option("--doppler-step", doppler_step, "Doppler grid spacing in Hz (default 0.1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            wisent::ScenarioSpec spec = wisent::scenario_from_config(wisent::load_config(scenario_path));
            if (have_seed) spec.seed = seed_override;
            if (nlos) wisent::apply_nlos_preset(spec);
            const wisent::ScenarioSignals sig = wisent::synth_scenario(spec);
            ensure_dir(out_dir);
            wisent::write_iq(out_dir + "/ref.iq", sig.ref);
            wisent::write_iq(out_dir + "/surv1.iq", sig.surv1);
            wisent::write_iq(out_dir + "/surv2.iq", sig.surv2);
            wisent::write_iq_metadata(out_dir + "/meta.txt", {spec.sample_rate_hz, spec.carrier_hz});
            auto truth = open_out(out_dir + "/truth.json");
            truth << wisent::to_json(sig.truth).dump(2) << "\n";
            std::cout << "wrote ref.iq, surv1.iq, surv2.iq, meta.txt, truth.json to " << out_dir << "\n";
        } else if (run->parsed()) {
            wisent::ScenarioSpec spec = wisent::scenario_from_config(wisent::load_config(scenario_path));
            if (have_seed) spec.seed = seed_override;
            if (nlos) wisent::apply_nlos_preset(spec);
            const wisent::PipelineConfig cfg = load_pipeline(pipeline_path);
            wisent::PipelineResult res;
            const wisent::TrialReport report = wisent::run_trial(spec, cfg, scenario_path, &res);
            print_trial(report, std::cout);
            ensure_dir(out_dir);
            auto record = open_out(out_dir + "/trial.json");
            record << wisent::to_json(report).dump(2) << "\n";
            if (!report.failed) {
                auto windows = open_out(out_dir + "/windows.tsv");
                wisent::write_window_tsv(windows, res);
                if (dump_phase) {
                    wisent::write_phase_series(out_dir + "/phi1.tsv", res.phi1);
                    wisent::write_phase_series(out_dir + "/phi2c.tsv", res.phi2c);
                }
            }
            return report.failed ? 1 : 0;
        } else if (sweep->parsed()) {
            wisent::SweepSpec spec = wisent::sweep_from_config(wisent::load_config(sweep_path));
            if (have_seed) spec.seed_base = seed_override;
            const wisent::PipelineConfig cfg = load_pipeline(pipeline_path);
            const wisent::SweepResult result = wisent::run_sweep(spec, cfg);
            ensure_dir(out_dir);
            auto tsv = open_out(out_dir + "/aggregate.tsv");
            wisent::write_sweep_tsv(tsv, result);
            auto json = open_out(out_dir + "/aggregate.json");
            json << wisent::to_json(result).dump(2) << "\n";
            auto jsonl = open_out(out_dir + "/trials.jsonl");
            wisent::write_trials_jsonl(jsonl, result);
            wisent::write_sweep_tsv(std::cout, result);
        } else if (replay->parsed()) {
            const wisent::PipelineConfig cfg = load_pipeline(pipeline_path);
            const wisent::PipelineResult res =
                wisent::replay_capture(ref_path, surv1_path, surv2_path, meta_path, cfg);
            wisent::write_window_records(std::cout, res);
            ensure_dir(out_dir);
            auto jsonl = open_out(out_dir + "/windows.jsonl");
            wisent::write_window_records(jsonl, res);
            auto tsv = open_out(out_dir + "/windows.tsv");
            wisent::write_window_tsv(tsv, res);
            if (dump_phase) {
                wisent::write_phase_series(out_dir + "/phi1.tsv", res.phi1);
                wisent::write_phase_series(out_dir + "/phi2c.tsv", res.phi2c);
            }
        } else if (caf->parsed()) {
            const wisent::IqMetadata meta = wisent::read_iq_metadata(meta_path);
            const wisent::IqBuffer ref = wisent::read_iq(ref_path, meta.sample_rate_hz);
            const wisent::IqBuffer surv = wisent::read_iq(surv1_path, meta.sample_rate_hz);
            const wisent::CafMap map =
                wisent::compute_caf(ref, surv, tau_max, wisent::doppler_grid(doppler_span, doppler_step));
            ensure_dir(out_dir);
            wisent::write_caf(out_dir + "/caf.tsv", out_dir + "/caf_delay_axis.tsv",
                              out_dir + "/caf_doppler_axis.tsv", map);
            const auto [tau, f] = map.peak();
            std::cout << "caf peak at delay " << tau << " samples, doppler " << f << " Hz\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
