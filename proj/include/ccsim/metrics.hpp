#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccsim/prompts.hpp"
#include "ccsim/snapshot.hpp"
#include "ccsim/time.hpp"

namespace ccsim {

struct MetricsRow {
    double t_s{0};
    int flow{0};
    double rtt_ms{0};
    double thr_mbps{0};
};

struct QueueRow {
    double t_s{0};
    int qlen{0};
};

struct FlowTotals {
    int64_t bytes_sent{0};
    int64_t bytes_delivered{0};
    int64_t packets_sent{0};
    int64_t packets_received{0};
    int64_t packets_dropped{0};
    int64_t retransmits{0};
    int64_t acks_received{0};
};

struct DecisionRecord {
    double t_s{0};
    int flow_id{0};
    PromptScheme scheme{PromptScheme::GeneralG};
    NetSnapshot snapshot;
    std::string raw_text;
    int64_t applied_cwnd{0};
    bool clamped{false};
    std::optional<std::string> error;  // parse-error kind when the decision was held
};

struct MetricsBundle {
    nlohmann::json config_echo;
    double duration_s{0};
    int n_flows{0};
    std::vector<MetricsRow> samples;  // per-ACK path samples, event order
    std::vector<QueueRow> queue;      // bottleneck occupancy, fixed cadence
    std::vector<std::vector<double>> thr_bins_mbps;  // [flow][second]
    std::vector<FlowTotals> totals;
    std::vector<DecisionRecord> decisions;
    std::optional<double> first_loss_rtt_s;
    int64_t acks_first_10s{0};
    double capacity_integral_bits{0};
    double mean_capacity_mbps{0};
    std::vector<double> capacity_per_sec_mbps;
    int bottleneck_queue_capacity{0};
};

/// Jain fairness index (sum x)^2 / (n * sum x^2) over per-flow mean
/// throughputs; lies in [1/n, 1].
double jain_index(const std::vector<double>& x);

struct FairnessReport {
    std::vector<double> shares_pct;  // per-flow mean utilization share
    double jain{0};
    std::vector<std::vector<double>> share_series;  // [flow][second]
};

struct FlowSummary {
    double mean_rtt_ms{0};
    double std_rtt_ms{0};
    double mean_thr_mbps{0};
    double std_thr_mbps{0};  // over the flow's per-second bins
    double share_pct{0};
    int64_t retransmits{0};
};

struct SummaryReport {
    double mean_rtt_ms{0};  // pooled over all flows' samples
    double std_rtt_ms{0};
    double total_thr_mbps{0};
    double total_thr_std_mbps{0};  // over the per-second aggregate series
    std::vector<FlowSummary> flows;
    std::vector<int64_t> queue_histogram;  // fixed 5-packet bins
    int queue_hist_bin_width{5};
    FairnessReport fairness;

    nlohmann::json to_json() const;
};

SummaryReport summarize(const MetricsBundle& b);

/// Windowed helpers over [from_s, to_s).
double mean_rtt_ms_over(const MetricsBundle& b, double from_s, double to_s, int flow = -1);
double mean_thr_mbps_over(const MetricsBundle& b, double from_s, double to_s, int flow);
FairnessReport fairness_over(const MetricsBundle& b, double from_s, double to_s);

nlohmann::json decision_to_json(const DecisionRecord& d);
DecisionRecord decision_from_json(const nlohmann::json& j);
nlohmann::json snapshot_to_json(const NetSnapshot& s);
NetSnapshot snapshot_from_json(const nlohmann::json& j);

/// Writes summary.json, metrics.csv, queue.csv, decisions.jsonl and
/// bundle.json (everything needed to re-summarize) into `dir`.
void store_bundle(const MetricsBundle& b, const std::string& dir);
MetricsBundle load_bundle(const std::string& dir);

}  // namespace ccsim
