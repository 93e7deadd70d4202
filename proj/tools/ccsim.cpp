#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccsim/experiment.hpp"
#include "ccsim/trace.hpp"
#include "ccsim/trigger.hpp"

using namespace ccsim;

namespace {

ExperimentConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return ExperimentConfig{};
    return ExperimentConfig::load(path);
}

void apply_common_overrides(ExperimentConfig& cfg, const std::string& backend,
                            const std::string& cassette, bool record, int64_t seed,
                            bool seed_set) {
    if (!backend.empty()) cfg.backend.kind = backend;
    if (!cassette.empty()) cfg.backend.cassette = cassette;
    if (record) cfg.backend.record = true;
    if (seed_set) cfg.seed = static_cast<uint64_t>(seed);
}

std::vector<std::pair<std::string, std::vector<double>>> parse_grid(
    const std::vector<std::string>& params) {
    std::vector<std::pair<std::string, std::vector<double>>> grid;
    for (const auto& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--param expects name=v1,v2,... got: " + p);
        }
        std::vector<double> values;
        std::string rest = p.substr(eq + 1);
        size_t pos = 0;
        while (pos <= rest.size()) {
            size_t comma = rest.find(',', pos);
            std::string tok = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
            if (!tok.empty()) values.push_back(std::stod(tok));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (values.empty()) throw ConfigError("--param " + p + " has no values");
        grid.emplace_back(p.substr(0, eq), std::move(values));
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic congestion-control simulator and experiment harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", backend, cassette;
    int64_t seed = 0;
    bool record = false;

    // run
    auto* run = app.add_subcommand("run", "Run one experiment and store its bundle");
    run->add_option("--config", config_path, "Experiment config (JSON)");
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Seed override");
    run->add_option("--backend", backend, "Backend override: live|mock|replay");
    run->add_option("--cassette", cassette, "Cassette file (replay/record)");
    run->add_flag("--record", record, "Record prompt/response pairs to the cassette");

    // calibrate
    auto* cal = app.add_subcommand("calibrate",
                                   "Run a NewReno probe and derive trigger thresholds");
    std::string cal_write;
    double cal_alpha = 0.7, cal_beta = 0.1;
    cal->add_option("--config", config_path, "Experiment config (JSON)");
    cal->add_option("--alpha", cal_alpha, "Latency trigger scale factor");
    cal->add_option("--beta", cal_beta, "ACK trigger scale factor");
    cal->add_option("--write-config", cal_write, "Write calibrated config to this path");
    cal->add_option("--seed", seed, "Seed override");

    // sweep
    auto* sw = app.add_subcommand("sweep", "Run a parameter grid and emit a CSV table");
    std::vector<std::string> sweep_params;
    sw->add_option("--config", config_path, "Experiment config (JSON)");
    sw->add_option("--param", sweep_params, "Grid axis, e.g. trigger.alpha=0.5,0.6,0.7,0.8")
        ->required();
    sw->add_option("--out", out_dir, "Output directory");
    sw->add_option("--seed", seed, "Seed override");

    // report
    auto* rep = app.add_subcommand("report", "Re-summarize a stored bundle");
    std::string bundle_dir;
    rep->add_option("--bundle", bundle_dir, "Bundle directory (from run)")->required();
    rep->add_option("--out", out_dir, "Output directory (default: bundle dir)");

    // gen-trace
    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic bandwidth trace CSV");
    std::string shape = "longisland", trace_out = "trace.csv";
    double rate_mbps = 10.0, jitter = 0.0;
    gen->add_option("--shape", shape, "static|longisland|7train|qtrain");
    gen->add_option("--out", trace_out, "Output CSV path");
    gen->add_option("--rate-mbps", rate_mbps, "Rate for the static shape");
    gen->add_option("--seed", seed, "Jitter seed");
    gen->add_option("--jitter", jitter, "Multiplicative step jitter in [0,1)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            ExperimentConfig cfg = load_config_or_default(config_path);
            apply_common_overrides(cfg, backend, cassette, record, seed, run->count("--seed") > 0);
            MetricsBundle bundle = run_experiment(cfg).bundle;
            store_bundle(bundle, out_dir);
            SummaryReport s = summarize(bundle);
            std::printf("run complete: %d flow(s), mean RTT %.2f ms, total throughput %.4f Mbps\n",
                        bundle.n_flows, s.mean_rtt_ms, s.total_thr_mbps);
            std::printf("bundle written to %s\n", out_dir.c_str());
        } else if (cal->parsed()) {
            ExperimentConfig cfg = load_config_or_default(config_path);
            if (cal->count("--seed") > 0) cfg.seed = static_cast<uint64_t>(seed);
            ExperimentConfig probe = cfg;
            probe.modes.assign(static_cast<size_t>(probe.n_senders), "newreno");
            BaselineRunRecord baseline = to_baseline_record(run_experiment(probe).bundle);

            AckTriggerConfig ack = calibrate_ack(baseline, cal_beta);
            cfg.trigger.ack_baseline = ack.baseline_ack_count_10s;
            cfg.trigger.beta = cal_beta;
            cfg.trigger.ack_threshold = ack.threshold_acks;
            std::printf("ack trigger: baseline %lld ACKs in 10 s -> threshold %lld (beta %.3f)\n",
                        static_cast<long long>(ack.baseline_ack_count_10s),
                        static_cast<long long>(ack.threshold_acks), cal_beta);

            if (baseline.first_loss_rtt) {
                LatencyTriggerConfig lat = calibrate_latency(baseline, cal_alpha);
                cfg.trigger.latency_baseline_us = lat.baseline_first_loss_latency.us;
                cfg.trigger.alpha = cal_alpha;
                cfg.trigger.latency_threshold_us = lat.threshold.us;
                std::printf("latency trigger: baseline %.1f ms -> threshold %.1f ms (alpha %.2f)\n",
                            lat.baseline_first_loss_latency.to_millis(), lat.threshold.to_millis(),
                            cal_alpha);
            } else {
                std::printf("latency trigger: probe run saw no loss, threshold unchanged\n");
            }
            if (!cal_write.empty()) {
                cfg.save(cal_write);
                std::printf("calibrated config written to %s\n", cal_write.c_str());
            }
        } else if (sw->parsed()) {
            ExperimentConfig cfg = load_config_or_default(config_path);
            if (sw->count("--seed") > 0) cfg.seed = static_cast<uint64_t>(seed);
            auto rows = sweep(cfg, parse_grid(sweep_params));
            std::filesystem::create_directories(out_dir);
            std::string path = (std::filesystem::path(out_dir) / "sweep.csv").string();
            write_sweep_csv(rows, path);
            std::printf("%zu sweep rows written to %s\n", rows.size(), path.c_str());
        } else if (rep->parsed()) {
            MetricsBundle bundle = load_bundle(bundle_dir);
            std::string dir = rep->count("--out") > 0 ? out_dir : bundle_dir;
            std::filesystem::create_directories(dir);
            std::ofstream out(std::filesystem::path(dir) / "summary.json");
            out << summarize(bundle).to_json().dump(2) << '\n';
            std::printf("summary written to %s/summary.json\n", dir.c_str());
        } else if (gen->parsed()) {
            BandwidthTrace t = generate_trace(trace_shape_from_string(shape), rate_mbps,
                                              static_cast<uint64_t>(seed), jitter);
            t.save_csv(trace_out);
            std::printf("%zu-step %s trace written to %s\n", t.steps().size(), shape.c_str(),
                        trace_out.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
