#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccsim/decision.hpp"
#include "ccsim/endpoint.hpp"
#include "ccsim/event_loop.hpp"
#include "ccsim/heuristic.hpp"
#include "ccsim/link.hpp"
#include "ccsim/metrics.hpp"
#include "ccsim/trace.hpp"
#include "ccsim/transport.hpp"
#include "ccsim/trigger.hpp"

namespace ccsim {

struct AccessLinkConfig {
    double rate_mbps{100.0};
    double delay_ms{1.0};
    int queue_packets{1024};
};

struct BottleneckConfig {
    double delay_ms{18.0};  // with 1 ms access hops each side, base RTT = 40 ms
    int queue_packets{100};
};

struct TraceConfig {
    std::string file;  // takes precedence when set
    TraceShape shape{TraceShape::Static};
    double rate_mbps{10.0};  // static shape only
    uint64_t seed{0};
    double jitter{0.0};
};

struct TriggerConfigs {
    int64_t latency_baseline_us{160000};
    double alpha{0.7};
    double cooldown_s{2.0};
    std::optional<int64_t> latency_threshold_us;  // set by calibration

    int64_t ack_baseline{8000};
    double beta{0.1};
    std::optional<int64_t> ack_threshold;  // set by calibration
};

struct HeuristicConfig {
    std::string preset{"static"};
    // One consult per wait window plus margin: the consult after an action
    // lands outside the armed wait, and per-consult RTT deltas see a probe's
    // full one-RTT feedback.
    double consult_interval_ms{2250.0};
    // Seeded de-synchronization between competing flows' consult grids.
    double consult_jitter_ms{250.0};
    // Optional per-field overrides of the preset.
    std::optional<double> t_probe_s;
    std::optional<int64_t> delta_bytes;
    std::optional<double> eps_rtt_ms;
    std::optional<double> eps_rtt_plus_ms;
    std::optional<int64_t> r_heavy;

    HeuristicParams resolve() const;
};

struct PolicyConfig {
    int history_len{4};
    std::string scheme_l{"natural_l"};  // TcpLlmL prompt scheme (natural_l | math_l)
    // Snapshot history cadence: one ring sample per ACK, or one per consult.
    std::string sampling{"per_ack"};  // per_ack | per_trigger
    double decision_delay_ms{0.0};
    GuardrailConfig guardrails;
};

struct BackendConfig {
    std::string kind{"mock"};  // mock | replay | live
    std::string cassette;
    std::vector<std::string> script;
    std::string script_file;
    int script_repeat{1};
    bool record{false};
    std::string model{"gpt-4o-mini"};
};

struct ExperimentConfig {
    double duration_s{120.0};
    uint64_t seed{1};
    int n_senders{1};
    std::vector<std::string> modes{"newreno"};
    TraceConfig trace;
    AccessLinkConfig access;
    BottleneckConfig bottleneck;
    TcpConfig tcp;
    PolicyConfig policy;
    TriggerConfigs trigger;
    HeuristicConfig heuristic;
    BackendConfig backend;
    double queue_sample_interval_ms{10.0};
    double start_stagger_ms{100.0};
    bool record_flow_trace{false};

    LatencyTriggerConfig latency_trigger() const;
    AckTriggerConfig ack_trigger() const;
    BandwidthTrace resolve_trace() const;
    RunConfig run_config() const;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static ExperimentConfig load(const std::string& path);
    void save(const std::string& path) const;
};

/// A wired dumbbell: sender_i -> access_i -> bottleneck -> egress ->
/// receiver_i, with ACKs returning over an uncongested fixed-delay path.
/// Heap-allocated and pinned: internal wiring captures element addresses.
struct Network {
    explicit Network(const RunConfig& rc) : loop(rc.seed) {}
    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    EventLoop loop;
    BandwidthTrace trace;
    std::vector<CcaMode> modes;
    std::vector<std::unique_ptr<Link>> access_links;
    std::unique_ptr<Link> bottleneck;
    std::unique_ptr<Link> egress;
    std::vector<std::unique_ptr<DelayPipe>> ack_pipes;
    std::vector<std::unique_ptr<TcpReceiver>> receivers;
    std::vector<std::unique_ptr<TcpSender>> senders;
};

/// Validates the topology section of the config and wires the network.
/// Throws ConfigError on an inconsistent sender/mode list or bad links.
std::unique_ptr<Network> build_topology(const ExperimentConfig& cfg);

/// (round, snd_una, snd_nxt, cwnd) trace for window-growth analysis;
/// captured per advancing ACK when record_flow_trace is set.
struct FlowTracePoint {
    double t_s{0};
    int64_t snd_una{0};
    int64_t snd_nxt{0};
    int64_t cwnd{0};
};

struct ExperimentResult {
    MetricsBundle bundle;
    std::vector<std::vector<FlowTracePoint>> flow_traces;  // [flow], optional
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Probe run distilled into the calibration observables.
BaselineRunRecord to_baseline_record(const MetricsBundle& b);

/// Applies a sweep parameter (e.g. "trigger.alpha") to a config copy.
void set_config_param(ExperimentConfig& cfg, const std::string& name, double value);

struct SweepRow {
    std::vector<std::pair<std::string, double>> params;
    uint64_t seed{0};
    SummaryReport summary;
};

std::vector<SweepRow> sweep(const ExperimentConfig& base,
                            const std::vector<std::pair<std::string, std::vector<double>>>& grid);

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace ccsim
