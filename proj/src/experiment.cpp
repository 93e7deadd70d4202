#include "ccsim/experiment.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ccsim/endpoint.hpp"
#include "ccsim/event_loop.hpp"
#include "ccsim/link.hpp"
#include "ccsim/llm_client.hpp"
#include "ccsim/prompts.hpp"
#include "ccsim/snapshot.hpp"

namespace ccsim {

HeuristicParams HeuristicConfig::resolve() const {
    HeuristicParams p = heuristic_preset(heuristic_scenario_from_string(preset));
    if (t_probe_s) p.t_probe = VirtualTime::from_seconds(*t_probe_s);
    if (delta_bytes) p.delta_bytes = *delta_bytes;
    if (eps_rtt_ms) {
        p.eps_rtt = VirtualTime::from_seconds(*eps_rtt_ms / 1e3);
        p.eps_rtt_plus = VirtualTime{2 * p.eps_rtt.us};
    }
    if (eps_rtt_plus_ms) p.eps_rtt_plus = VirtualTime::from_seconds(*eps_rtt_plus_ms / 1e3);
    if (r_heavy) p.r_heavy = *r_heavy;
    return p;
}

LatencyTriggerConfig ExperimentConfig::latency_trigger() const {
    LatencyTriggerConfig c;
    c.baseline_first_loss_latency = VirtualTime{trigger.latency_baseline_us};
    c.alpha = trigger.alpha;
    c.cooldown = VirtualTime::from_seconds(trigger.cooldown_s);
    c.threshold = trigger.latency_threshold_us
                      ? VirtualTime{*trigger.latency_threshold_us}
                      : VirtualTime{static_cast<int64_t>(trigger.alpha *
                                                         static_cast<double>(
                                                             trigger.latency_baseline_us))};
    return c;
}

AckTriggerConfig ExperimentConfig::ack_trigger() const {
    AckTriggerConfig c;
    c.baseline_ack_count_10s = trigger.ack_baseline;
    c.beta = trigger.beta;
    c.threshold_acks =
        trigger.ack_threshold
            ? *trigger.ack_threshold
            : static_cast<int64_t>(std::llround(
                  static_cast<double>(round_to_nearest_thousand(trigger.ack_baseline)) *
                  trigger.beta));
    if (c.threshold_acks < 1) throw ConfigError("ack trigger threshold must be >= 1");
    return c;
}

BandwidthTrace ExperimentConfig::resolve_trace() const {
    if (!trace.file.empty()) return BandwidthTrace::load_csv(trace.file);
    return generate_trace(trace.shape, trace.rate_mbps, trace.seed, trace.jitter);
}

namespace {

// ---------------------------------------------------------------------------
// Policy controllers

struct DecisionLog {
    std::vector<DecisionRecord>* records{nullptr};
};

/// Shared consult pipeline: snapshot -> prompt -> backend -> parse ->
/// guardrails -> apply, with JSONL-ready logging. A parse failure holds the
/// current window.
class LlmConsulter {
public:
    LlmConsulter(PromptScheme scheme, int history_len, GuardrailMode mode, GuardrailConfig rails,
                 LlmBackend& backend, std::string model, VirtualTime decision_delay,
                 DecisionLog log)
        : scheme_(scheme),
          history_len_(history_len),
          mode_(mode),
          rails_(rails),
          backend_(backend),
          model_(std::move(model)),
          decision_delay_(decision_delay),
          log_(log) {}

    void consult(TcpSender& s) {
        NetSnapshot snap = build_snapshot(s.ring(), history_len_, s.flow().ssthresh);
        MessagePair msg = render_prompt(scheme_, snap);
        ChatRequest req{model_, msg.system_text, msg.user_text, 0.0, 256};
        std::string text = backend_.complete(req);

        DecisionRecord rec;
        rec.t_s = s.loop().now().to_seconds();
        rec.flow_id = s.flow_id();
        rec.scheme = scheme_;
        rec.snapshot = snap;
        rec.raw_text = text;

        DecisionOrError parsed = parse_decision(text);
        if (auto* err = std::get_if<ParseError>(&parsed)) {
            rec.error = to_string(err->kind);
            rec.applied_cwnd = s.flow().cwnd;  // hold
            rec.clamped = false;
        } else {
            LlmDecision d = apply_guardrails(std::get<LlmDecision>(parsed), s.flow().cwnd, mode_,
                                             rails_);
            rec.applied_cwnd = d.next_cwnd;
            rec.clamped = d.clamped;
            if (decision_delay_.us == 0) {
                apply_decision(s.flow(), d);
                s.try_send();
            } else {
                s.loop().schedule_in(decision_delay_, [&s, d] {
                    apply_decision(s.flow(), d);
                    s.try_send();
                });
            }
        }
        if (log_.records) log_.records->push_back(std::move(rec));
    }

private:
    PromptScheme scheme_;
    int history_len_;
    GuardrailMode mode_;
    GuardrailConfig rails_;
    LlmBackend& backend_;
    std::string model_;
    VirtualTime decision_delay_;
    DecisionLog log_;
};

class LlmLController : public CcController {
public:
    LlmLController(LatencyTriggerConfig trig, bool per_ack_ring, LlmConsulter consulter)
        : trig_(trig), per_ack_ring_(per_ack_ring), consulter_(std::move(consulter)) {}

    void on_ack(TcpSender& s, bool) override {
        if (!s.sampler().has_rtt()) return;
        if (per_ack_ring_) s.sample_path();
        if (s.flow().phase != Phase::CongestionAvoidance) return;
        if (should_fire_latency(trig_, st_, s.sampler().latest_rtt(), s.loop().now())) {
            if (!per_ack_ring_) s.sample_path();
            consulter_.consult(s);
        }
    }

private:
    LatencyTriggerConfig trig_;
    TriggerState st_;
    bool per_ack_ring_;
    LlmConsulter consulter_;
};

class LlmGController : public CcController {
public:
    LlmGController(AckTriggerConfig trig, bool per_ack_ring, LlmConsulter consulter)
        : trig_(trig), per_ack_ring_(per_ack_ring), consulter_(std::move(consulter)) {}

    void on_ack(TcpSender& s, bool) override {
        if (s.sampler().has_rtt() && per_ack_ring_) s.sample_path();
        ++st_.acks_since_fire;
        if (s.flow().phase != Phase::CongestionAvoidance) return;
        if (!s.sampler().has_rtt()) return;
        if (should_fire_ack(trig_, st_, s.loop().now())) {
            if (!per_ack_ring_) s.sample_path();
            consulter_.consult(s);
        }
    }

    void on_loss_event(TcpSender& s) override {
        if (!s.sampler().has_rtt()) return;
        s.sample_path();  // fresh sample carrying the retransmit just made
        consulter_.consult(s);
    }

private:
    AckTriggerConfig trig_;
    TriggerState st_;
    bool per_ack_ring_;
    LlmConsulter consulter_;
};

class HeuristicController : public CcController {
public:
    HeuristicController(HeuristicParams params, VirtualTime interval, VirtualTime jitter)
        : params_(params), interval_(interval), jitter_(jitter) {}

    void on_start(TcpSender& s) override { schedule_tick(s); }

    void on_loss_event(TcpSender& s) override {
        if (!s.sampler().has_rtt()) return;
        PathSample sample = s.sample_path();
        heuristic_step(state_, s.flow(), sample, params_, s.loop().now());
        s.try_send();
    }

private:
    void schedule_tick(TcpSender& s) {
        // Seeded jitter de-synchronizes competing flows' consult phases so
        // queue-full drops rotate instead of always hitting the same flow.
        VirtualTime next = interval_;
        if (jitter_.us > 0) {
            next += VirtualTime::usec(
                static_cast<int64_t>(s.loop().rng().next_u64() % uint64_t(jitter_.us)));
        }
        s.loop().schedule_in(next, [this, &s] {
            tick(s);
            schedule_tick(s);
        });
    }

    void tick(TcpSender& s) {
        if (s.flow().phase != Phase::CongestionAvoidance) return;
        if (!s.sampler().has_rtt()) return;
        PathSample sample = s.sample_path();
        HeuristicAction act = heuristic_step(state_, s.flow(), sample, params_, s.loop().now());
        if (act.kind == HeuristicActionKind::Probe) s.try_send();
    }

    HeuristicParams params_;
    HeuristicState state_;
    VirtualTime interval_;
    VirtualTime jitter_;
};

std::unique_ptr<LlmBackend> make_backend(const ExperimentConfig& cfg) {
    const BackendConfig& b = cfg.backend;
    if (b.kind == "mock") {
        std::vector<std::string> script = b.script;
        if (!b.script_file.empty()) {
            std::ifstream in(b.script_file);
            if (!in) throw ConfigError("mock script file not found: " + b.script_file);
            nlohmann::json j = nlohmann::json::parse(in);
            script = j.get<std::vector<std::string>>();
        }
        std::vector<std::string> expanded;
        for (int r = 0; r < std::max(1, b.script_repeat); ++r) {
            expanded.insert(expanded.end(), script.begin(), script.end());
        }
        std::unique_ptr<LlmBackend> mock = std::make_unique<MockBackend>(std::move(expanded));
        if (b.record) {
            if (b.cassette.empty()) throw ConfigError("record mode needs a cassette path");
            return std::make_unique<RecordingBackend>(std::move(mock), b.cassette);
        }
        return mock;
    }
    if (b.kind == "replay") {
        if (b.cassette.empty()) throw ConfigError("replay backend needs a cassette path");
        if (!std::filesystem::exists(b.cassette)) {
            throw ConfigError("replay cassette not found: " + b.cassette);
        }
        return std::make_unique<ReplayBackend>(Cassette::load(b.cassette));
    }
    if (b.kind == "live") {
        LiveConfig lc = LiveConfig::from_env();
        if (!b.model.empty()) lc.model = b.model;
        std::unique_ptr<LlmBackend> live = std::make_unique<LiveBackend>(lc);
        if (b.record) {
            if (b.cassette.empty()) throw ConfigError("record mode needs a cassette path");
            return std::make_unique<RecordingBackend>(std::move(live), b.cassette);
        }
        return live;
    }
    throw ConfigError("unknown backend kind: " + b.kind);
}

bool mode_uses_llm(CcaMode m) {
    return m == CcaMode::TcpLlmL || m == CcaMode::TcpLlmG || m == CcaMode::TcpLlmGAggressive;
}

}  // namespace

BaselineRunRecord to_baseline_record(const MetricsBundle& b) {
    BaselineRunRecord r;
    r.duration = VirtualTime::from_seconds(b.duration_s);
    if (b.first_loss_rtt_s) r.first_loss_rtt = VirtualTime::from_seconds(*b.first_loss_rtt_s);
    r.acks_in_first_10s = b.acks_first_10s;
    return r;
}

RunConfig ExperimentConfig::run_config() const {
    RunConfig rc;
    rc.duration = VirtualTime::from_seconds(duration_s);
    rc.seed = seed;
    rc.queue_sample_interval = VirtualTime::from_seconds(queue_sample_interval_ms / 1e3);
    return rc;
}

std::unique_ptr<Network> build_topology(const ExperimentConfig& cfg) {
    if (cfg.n_senders < 1) throw ConfigError("n_senders must be >= 1");
    if (static_cast<int>(cfg.modes.size()) != cfg.n_senders) {
        throw ConfigError("modes list length must equal n_senders");
    }
    if (cfg.duration_s <= 0) throw ConfigError("duration must be positive");

    auto net = std::make_unique<Network>(cfg.run_config());
    Network& n = *net;
    for (const auto& m : cfg.modes) n.modes.push_back(cca_mode_from_string(m));
    n.trace = cfg.resolve_trace();

    LinkSpec egress_spec;
    egress_spec.rate_bps = static_cast<int64_t>(cfg.access.rate_mbps * 1e6);
    egress_spec.one_way_delay = VirtualTime::from_seconds(cfg.access.delay_ms / 1e3);
    egress_spec.queue_capacity = cfg.access.queue_packets;
    n.egress = std::make_unique<Link>(n.loop, egress_spec, [&n](Packet p) {
        n.receivers[p.flow_id]->on_data(p, n.loop.now());
    });

    LinkSpec bn_spec;
    bn_spec.trace = &n.trace;
    bn_spec.one_way_delay = VirtualTime::from_seconds(cfg.bottleneck.delay_ms / 1e3);
    bn_spec.queue_capacity = cfg.bottleneck.queue_packets;
    n.bottleneck = std::make_unique<Link>(n.loop, bn_spec,
                                          [&n](Packet p) { n.egress->enqueue(std::move(p)); });

    VirtualTime reverse_delay = VirtualTime::from_seconds(
        (2 * cfg.access.delay_ms + cfg.bottleneck.delay_ms) / 1e3);

    for (int i = 0; i < cfg.n_senders; ++i) {
        n.ack_pipes.push_back(std::make_unique<DelayPipe>(
            n.loop, reverse_delay, [&n, i](Packet p) { n.senders[i]->on_ack_packet(p); }));
        n.receivers.push_back(std::make_unique<TcpReceiver>(
            i, [&n, i](Packet p) { n.ack_pipes[i]->send(std::move(p)); }));

        LinkSpec access_spec;
        access_spec.rate_bps = static_cast<int64_t>(cfg.access.rate_mbps * 1e6);
        access_spec.one_way_delay = VirtualTime::from_seconds(cfg.access.delay_ms / 1e3);
        access_spec.queue_capacity = cfg.access.queue_packets;
        n.access_links.push_back(std::make_unique<Link>(
            n.loop, access_spec, [&n](Packet p) { n.bottleneck->enqueue(std::move(p)); }));

        n.senders.push_back(std::make_unique<TcpSender>(
            n.loop, i, n.modes[i], cfg.tcp,
            [&n, i](Packet p) { n.access_links[i]->enqueue(std::move(p)); }));
    }
    return net;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    std::vector<CcaMode> modes;
    for (const auto& m : cfg.modes) modes.push_back(cca_mode_from_string(m));

    // Fail fast on backend problems before the simulation starts.
    std::unique_ptr<LlmBackend> backend;
    if (std::any_of(modes.begin(), modes.end(), mode_uses_llm)) backend = make_backend(cfg);

    std::unique_ptr<Network> net = build_topology(cfg);
    Network& network = *net;
    EventLoop& loop = network.loop;
    const RunConfig rc = cfg.run_config();
    const VirtualTime duration = rc.duration;
    const int n = cfg.n_senders;

    ExperimentResult result;
    MetricsBundle& bundle = result.bundle;
    bundle.config_echo = cfg.to_json();
    bundle.duration_s = cfg.duration_s;
    bundle.n_flows = n;
    bundle.totals.assign(n, {});
    bundle.thr_bins_mbps.assign(n, std::vector<double>(static_cast<size_t>(cfg.duration_s), 0.0));
    bundle.bottleneck_queue_capacity = cfg.bottleneck.queue_packets;
    result.flow_traces.assign(cfg.record_flow_trace ? n : 0, {});

    auto count_drop = [&bundle](const Packet& p) { ++bundle.totals[p.flow_id].packets_dropped; };
    network.bottleneck->set_drop_hook(count_drop);
    network.egress->set_drop_hook(count_drop);
    for (auto& link : network.access_links) link->set_drop_hook(count_drop);

    std::vector<std::unique_ptr<CcController>> controllers;
    GuardrailConfig rails = cfg.policy.guardrails;
    VirtualTime decision_delay = VirtualTime::from_seconds(cfg.policy.decision_delay_ms / 1e3);
    DecisionLog log{&bundle.decisions};
    bool per_ack_ring;
    if (cfg.policy.sampling == "per_ack") {
        per_ack_ring = true;
    } else if (cfg.policy.sampling == "per_trigger") {
        per_ack_ring = false;
    } else {
        throw ConfigError("policy.sampling must be per_ack or per_trigger");
    }

    for (int i = 0; i < n; ++i) {
        TcpReceiver& receiver = *network.receivers[i];
        receiver.on_delivered = [&bundle, i, duration](VirtualTime t, int64_t bytes) {
            bundle.totals[i].bytes_delivered += bytes;
            auto sec = static_cast<size_t>(std::min(t, duration - VirtualTime{1}).to_seconds());
            if (sec < bundle.thr_bins_mbps[i].size()) {
                bundle.thr_bins_mbps[i][sec] += static_cast<double>(bytes) * 8.0 / 1e6;
            }
        };

        TcpSender& sender = *network.senders[i];
        sender.on_rtt_observed = [&bundle, i](VirtualTime t, VirtualTime rtt, double thr_bps) {
            bundle.samples.push_back({t.to_seconds(), i, rtt.to_millis(), thr_bps / 1e6});
        };
        if (cfg.record_flow_trace) {
            sender.on_ack_progress = [&result, i](VirtualTime t, int64_t una, int64_t nxt,
                                                  int64_t cwnd) {
                result.flow_traces[i].push_back({t.to_seconds(), una, nxt, cwnd});
            };
        }

        switch (modes[i]) {
            case CcaMode::NewReno:
                controllers.push_back(std::make_unique<CcController>());
                break;
            case CcaMode::TcpLlmL:
                controllers.push_back(std::make_unique<LlmLController>(
                    cfg.latency_trigger(), per_ack_ring,
                    LlmConsulter(prompt_scheme_from_string(cfg.policy.scheme_l),
                                 cfg.policy.history_len, GuardrailMode::L, rails, *backend,
                                 cfg.backend.model, decision_delay, log)));
                break;
            case CcaMode::TcpLlmG:
            case CcaMode::TcpLlmGAggressive: {
                PromptScheme scheme = modes[i] == CcaMode::TcpLlmG
                                          ? PromptScheme::GeneralG
                                          : PromptScheme::GeneralGAggressive;
                controllers.push_back(std::make_unique<LlmGController>(
                    cfg.ack_trigger(), per_ack_ring,
                    LlmConsulter(scheme, cfg.policy.history_len, GuardrailMode::G, rails,
                                 *backend, cfg.backend.model, decision_delay, log)));
                break;
            }
            case CcaMode::HeuristicCc:
                controllers.push_back(std::make_unique<HeuristicController>(
                    cfg.heuristic.resolve(),
                    VirtualTime::from_seconds(cfg.heuristic.consult_interval_ms / 1e3),
                    VirtualTime::from_seconds(cfg.heuristic.consult_jitter_ms / 1e3)));
                break;
        }
        sender.set_controller(controllers.back().get());
        sender.start(VirtualTime::from_seconds(cfg.start_stagger_ms / 1e3) * i);
    }

    // Bottleneck queue sampling at a fixed cadence.
    const VirtualTime sample_every = rc.queue_sample_interval;
    std::function<void()> sample_queue = [&] {
        bundle.queue.push_back({loop.now().to_seconds(), network.bottleneck->occupancy()});
        if (loop.now() + sample_every < duration) loop.schedule_in(sample_every, sample_queue);
    };
    loop.schedule(VirtualTime{0}, sample_queue);

    loop.schedule(VirtualTime::sec(10),
                  [&] { bundle.acks_first_10s = network.senders[0]->acks_received(); });

    loop.run_until(duration);

    for (int i = 0; i < n; ++i) {
        bundle.totals[i].bytes_sent = network.senders[i]->bytes_sent();
        bundle.totals[i].packets_sent = network.senders[i]->packets_sent();
        bundle.totals[i].packets_received = network.receivers[i]->packets_received();
        bundle.totals[i].retransmits = network.senders[i]->retransmit_total();
        bundle.totals[i].acks_received = network.senders[i]->acks_received();
    }
    if (auto rtt = network.senders[0]->first_loss_rtt()) {
        bundle.first_loss_rtt_s = rtt->to_seconds();
    }

    bundle.capacity_integral_bits = network.trace.integral_bits(VirtualTime{0}, duration);
    bundle.mean_capacity_mbps = network.trace.mean_rate_bps(VirtualTime{0}, duration) / 1e6;
    for (int sec = 0; sec < static_cast<int>(cfg.duration_s); ++sec) {
        bundle.capacity_per_sec_mbps.push_back(
            network.trace.mean_rate_bps(VirtualTime::sec(sec), VirtualTime::sec(sec + 1)) / 1e6);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Config (de)serialization

namespace {

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

template <typename T>
void maybe_get_opt(const nlohmann::json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    maybe_get(j, "duration_s", c.duration_s);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "n_senders", c.n_senders);
    maybe_get(j, "modes", c.modes);
    if (j.contains("trace")) {
        const auto& t = j.at("trace");
        maybe_get(t, "file", c.trace.file);
        if (t.contains("shape")) c.trace.shape = trace_shape_from_string(t.at("shape"));
        maybe_get(t, "rate_mbps", c.trace.rate_mbps);
        maybe_get(t, "seed", c.trace.seed);
        maybe_get(t, "jitter", c.trace.jitter);
    }
    if (j.contains("access")) {
        const auto& a = j.at("access");
        maybe_get(a, "rate_mbps", c.access.rate_mbps);
        maybe_get(a, "delay_ms", c.access.delay_ms);
        maybe_get(a, "queue_packets", c.access.queue_packets);
    }
    if (j.contains("bottleneck")) {
        const auto& b = j.at("bottleneck");
        maybe_get(b, "delay_ms", c.bottleneck.delay_ms);
        maybe_get(b, "queue_packets", c.bottleneck.queue_packets);
    }
    if (j.contains("tcp")) {
        const auto& t = j.at("tcp");
        int mss = c.tcp.mss;
        maybe_get(t, "mss", mss);
        c.tcp.mss = mss;
        maybe_get(t, "initial_cwnd", c.tcp.initial_cwnd);
        maybe_get(t, "initial_ssthresh", c.tcp.initial_ssthresh);
        if (t.contains("min_rto_ms")) {
            c.tcp.min_rto = VirtualTime::from_seconds(t.at("min_rto_ms").get<double>() / 1e3);
        }
        if (t.contains("rto_cap_s")) {
            c.tcp.rto_cap = VirtualTime::from_seconds(t.at("rto_cap_s").get<double>());
        }
        if (t.contains("throughput_window_s")) {
            c.tcp.throughput_window =
                VirtualTime::from_seconds(t.at("throughput_window_s").get<double>());
        }
    }
    if (j.contains("policy")) {
        const auto& p = j.at("policy");
        maybe_get(p, "history_len", c.policy.history_len);
        maybe_get(p, "scheme_l", c.policy.scheme_l);
        maybe_get(p, "sampling", c.policy.sampling);
        maybe_get(p, "decision_delay_ms", c.policy.decision_delay_ms);
        if (p.contains("guardrails")) {
            const auto& g = p.at("guardrails");
            maybe_get(g, "mss_floor", c.policy.guardrails.mss_floor);
            maybe_get(g, "l_max_step_fraction", c.policy.guardrails.l_mode_max_step_fraction);
            maybe_get(g, "g_min_fraction", c.policy.guardrails.g_mode_min_fraction_of_current);
            maybe_get(g, "cwnd_hard_cap", c.policy.guardrails.cwnd_hard_cap);
        }
    }
    if (j.contains("trigger")) {
        const auto& t = j.at("trigger");
        maybe_get(t, "latency_baseline_us", c.trigger.latency_baseline_us);
        maybe_get(t, "alpha", c.trigger.alpha);
        maybe_get(t, "cooldown_s", c.trigger.cooldown_s);
        maybe_get_opt(t, "latency_threshold_us", c.trigger.latency_threshold_us);
        maybe_get(t, "ack_baseline", c.trigger.ack_baseline);
        maybe_get(t, "beta", c.trigger.beta);
        maybe_get_opt(t, "ack_threshold", c.trigger.ack_threshold);
    }
    if (j.contains("heuristic")) {
        const auto& h = j.at("heuristic");
        maybe_get(h, "preset", c.heuristic.preset);
        maybe_get(h, "consult_interval_ms", c.heuristic.consult_interval_ms);
        maybe_get(h, "consult_jitter_ms", c.heuristic.consult_jitter_ms);
        maybe_get_opt(h, "t_probe_s", c.heuristic.t_probe_s);
        maybe_get_opt(h, "delta_bytes", c.heuristic.delta_bytes);
        maybe_get_opt(h, "eps_rtt_ms", c.heuristic.eps_rtt_ms);
        maybe_get_opt(h, "eps_rtt_plus_ms", c.heuristic.eps_rtt_plus_ms);
        maybe_get_opt(h, "r_heavy", c.heuristic.r_heavy);
    }
    if (j.contains("backend")) {
        const auto& b = j.at("backend");
        maybe_get(b, "kind", c.backend.kind);
        maybe_get(b, "cassette", c.backend.cassette);
        maybe_get(b, "script", c.backend.script);
        maybe_get(b, "script_file", c.backend.script_file);
        maybe_get(b, "script_repeat", c.backend.script_repeat);
        maybe_get(b, "record", c.backend.record);
        maybe_get(b, "model", c.backend.model);
    }
    maybe_get(j, "queue_sample_interval_ms", c.queue_sample_interval_ms);
    maybe_get(j, "start_stagger_ms", c.start_stagger_ms);
    maybe_get(j, "record_flow_trace", c.record_flow_trace);
    return c;
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j{
        {"duration_s", duration_s},
        {"seed", seed},
        {"n_senders", n_senders},
        {"modes", modes},
        {"trace",
         {{"file", trace.file},
          {"shape", ccsim::to_string(trace.shape)},
          {"rate_mbps", trace.rate_mbps},
          {"seed", trace.seed},
          {"jitter", trace.jitter}}},
        {"access",
         {{"rate_mbps", access.rate_mbps},
          {"delay_ms", access.delay_ms},
          {"queue_packets", access.queue_packets}}},
        {"bottleneck",
         {{"delay_ms", bottleneck.delay_ms}, {"queue_packets", bottleneck.queue_packets}}},
        {"tcp",
         {{"mss", tcp.mss},
          {"initial_cwnd", tcp.initial_cwnd},
          {"initial_ssthresh", tcp.initial_ssthresh},
          {"min_rto_ms", tcp.min_rto.to_seconds() * 1e3},
          {"rto_cap_s", tcp.rto_cap.to_seconds()},
          {"throughput_window_s", tcp.throughput_window.to_seconds()}}},
        {"policy",
         {{"history_len", policy.history_len},
          {"scheme_l", policy.scheme_l},
          {"sampling", policy.sampling},
          {"decision_delay_ms", policy.decision_delay_ms},
          {"guardrails",
           {{"mss_floor", policy.guardrails.mss_floor},
            {"l_max_step_fraction", policy.guardrails.l_mode_max_step_fraction},
            {"g_min_fraction", policy.guardrails.g_mode_min_fraction_of_current},
            {"cwnd_hard_cap", policy.guardrails.cwnd_hard_cap}}}}},
        {"trigger",
         {{"latency_baseline_us", trigger.latency_baseline_us},
          {"alpha", trigger.alpha},
          {"cooldown_s", trigger.cooldown_s},
          {"ack_baseline", trigger.ack_baseline},
          {"beta", trigger.beta}}},
        {"heuristic",
         {{"preset", heuristic.preset},
          {"consult_interval_ms", heuristic.consult_interval_ms},
          {"consult_jitter_ms", heuristic.consult_jitter_ms}}},
        {"backend",
         {{"kind", backend.kind},
          {"cassette", backend.cassette},
          {"script", backend.script},
          {"script_file", backend.script_file},
          {"script_repeat", backend.script_repeat},
          {"record", backend.record},
          {"model", backend.model}}},
        {"queue_sample_interval_ms", queue_sample_interval_ms},
        {"start_stagger_ms", start_stagger_ms},
        {"record_flow_trace", record_flow_trace},
    };
    if (trigger.latency_threshold_us) j["trigger"]["latency_threshold_us"] = *trigger.latency_threshold_us;
    if (trigger.ack_threshold) j["trigger"]["ack_threshold"] = *trigger.ack_threshold;
    if (heuristic.t_probe_s) j["heuristic"]["t_probe_s"] = *heuristic.t_probe_s;
    if (heuristic.delta_bytes) j["heuristic"]["delta_bytes"] = *heuristic.delta_bytes;
    if (heuristic.eps_rtt_ms) j["heuristic"]["eps_rtt_ms"] = *heuristic.eps_rtt_ms;
    if (heuristic.eps_rtt_plus_ms) j["heuristic"]["eps_rtt_plus_ms"] = *heuristic.eps_rtt_plus_ms;
    if (heuristic.r_heavy) j["heuristic"]["r_heavy"] = *heuristic.r_heavy;
    return j;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("config: cannot open " + path);
    return from_json(nlohmann::json::parse(in));
}

void ExperimentConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("config: cannot write " + path);
    out << to_json().dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Sweeps

void set_config_param(ExperimentConfig& cfg, const std::string& name, double value) {
    if (name == "trigger.alpha") {
        cfg.trigger.alpha = value;
        cfg.trigger.latency_threshold_us.reset();
    } else if (name == "trigger.beta") {
        cfg.trigger.beta = value;
        cfg.trigger.ack_threshold.reset();
    } else if (name == "policy.H") {
        cfg.policy.history_len = static_cast<int>(value);
    } else if (name == "tcp.initial_cwnd") {
        cfg.tcp.initial_cwnd = static_cast<int64_t>(value);
    } else if (name == "heuristic.consult_interval_ms") {
        cfg.heuristic.consult_interval_ms = value;
    } else if (name == "heuristic.t_probe_s") {
        cfg.heuristic.t_probe_s = value;
    } else {
        throw UnknownParameterError("unknown sweep parameter: " + name);
    }
}

std::vector<SweepRow> sweep(const ExperimentConfig& base,
                            const std::vector<std::pair<std::string, std::vector<double>>>& grid) {
    if (grid.empty()) throw ConfigError("sweep: empty grid");
    std::vector<SweepRow> rows;
    std::vector<size_t> idx(grid.size(), 0);
    uint64_t flat = 0;
    while (true) {
        ExperimentConfig cfg = base;
        SweepRow row;
        for (size_t d = 0; d < grid.size(); ++d) {
            set_config_param(cfg, grid[d].first, grid[d].second[idx[d]]);
            row.params.emplace_back(grid[d].first, grid[d].second[idx[d]]);
        }
        cfg.seed = base.seed + flat;  // each grid point independently reproducible
        row.seed = cfg.seed;
        row.summary = summarize(run_experiment(cfg).bundle);
        rows.push_back(std::move(row));

        size_t d = 0;
        while (d < grid.size() && ++idx[d] == grid[d].second.size()) {
            idx[d] = 0;
            ++d;
        }
        ++flat;
        if (d == grid.size()) break;
    }
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("sweep: cannot write " + path);
    if (rows.empty()) return;
    for (const auto& [name, _] : rows[0].params) out << name << ',';
    out << "seed,rtt_avg_ms,rtt_std_ms,thr_avg_mbps,thr_std_mbps,jain\n";
    char buf[256];
    for (const auto& row : rows) {
        for (const auto& [_, value] : row.params) {
            std::snprintf(buf, sizeof(buf), "%g,", value);
            out << buf;
        }
        std::snprintf(buf, sizeof(buf), "%llu,%.2f,%.2f,%.4f,%.4f,%.4f\n",
                      static_cast<unsigned long long>(row.seed), row.summary.mean_rtt_ms,
                      row.summary.std_rtt_ms, row.summary.total_thr_mbps,
                      row.summary.total_thr_std_mbps, row.summary.fairness.jain);
        out << buf;
    }
}

}  // namespace ccsim
