#include "ccsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ccsim/errors.hpp"

namespace ccsim {

double jain_index(const std::vector<double>& x) {
    if (x.empty()) throw DegenerateInputError("jain_index: empty input");
    double sum = 0, sum_sq = 0;
    for (double v : x) {
        if (v < 0) throw DegenerateInputError("jain_index: negative throughput");
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0) throw DegenerateInputError("jain_index: all-zero throughputs");
    return (sum * sum) / (static_cast<double>(x.size()) * sum_sq);
}

namespace {

struct MeanStd {
    double mean{0};
    double std{0};
    int64_t n{0};
};

MeanStd mean_std(const std::vector<double>& xs) {
    MeanStd m;
    m.n = static_cast<int64_t>(xs.size());
    if (xs.empty()) return m;
    double sum = 0;
    for (double v : xs) sum += v;
    m.mean = sum / static_cast<double>(xs.size());
    double var = 0;
    for (double v : xs) var += (v - m.mean) * (v - m.mean);
    m.std = std::sqrt(var / static_cast<double>(xs.size()));
    return m;
}

}  // namespace

SummaryReport summarize(const MetricsBundle& b) {
    SummaryReport r;

    std::vector<double> all_rtt;
    std::vector<std::vector<double>> flow_rtt(b.n_flows);
    for (const auto& row : b.samples) {
        all_rtt.push_back(row.rtt_ms);
        flow_rtt[row.flow].push_back(row.rtt_ms);
    }
    auto pooled = mean_std(all_rtt);
    r.mean_rtt_ms = pooled.mean;
    r.std_rtt_ms = pooled.std;

    std::vector<double> flow_means;
    std::vector<double> total_series;
    for (int f = 0; f < b.n_flows; ++f) {
        FlowSummary fs;
        auto ms = mean_std(flow_rtt[f]);
        fs.mean_rtt_ms = ms.mean;
        fs.std_rtt_ms = ms.std;
        auto thr = mean_std(b.thr_bins_mbps[f]);
        fs.mean_thr_mbps = thr.mean;
        fs.std_thr_mbps = thr.std;
        fs.share_pct = b.mean_capacity_mbps > 0 ? fs.mean_thr_mbps / b.mean_capacity_mbps * 100.0
                                                : 0.0;
        fs.retransmits = b.totals[f].retransmits;
        r.total_thr_mbps += fs.mean_thr_mbps;
        flow_means.push_back(fs.mean_thr_mbps);
        r.flows.push_back(fs);
        if (total_series.size() < b.thr_bins_mbps[f].size()) {
            total_series.resize(b.thr_bins_mbps[f].size(), 0.0);
        }
        for (size_t sec = 0; sec < b.thr_bins_mbps[f].size(); ++sec) {
            total_series[sec] += b.thr_bins_mbps[f][sec];
        }
    }
    r.total_thr_std_mbps = mean_std(total_series).std;

    int nbins = b.bottleneck_queue_capacity / r.queue_hist_bin_width + 1;
    r.queue_histogram.assign(nbins, 0);
    for (const auto& q : b.queue) {
        int idx = std::min(q.qlen / r.queue_hist_bin_width, nbins - 1);
        ++r.queue_histogram[idx];
    }

    r.fairness.shares_pct.reserve(r.flows.size());
    for (const auto& fs : r.flows) r.fairness.shares_pct.push_back(fs.share_pct);
    bool any = std::any_of(flow_means.begin(), flow_means.end(), [](double v) { return v > 0; });
    r.fairness.jain = any ? jain_index(flow_means) : 0.0;
    r.fairness.share_series.assign(b.n_flows, {});
    for (int f = 0; f < b.n_flows; ++f) {
        for (size_t sec = 0; sec < b.thr_bins_mbps[f].size(); ++sec) {
            double cap = sec < b.capacity_per_sec_mbps.size() ? b.capacity_per_sec_mbps[sec] : 0;
            r.fairness.share_series[f].push_back(cap > 0 ? b.thr_bins_mbps[f][sec] / cap * 100.0
                                                         : 0.0);
        }
    }
    return r;
}

double mean_rtt_ms_over(const MetricsBundle& b, double from_s, double to_s, int flow) {
    double sum = 0;
    int64_t n = 0;
    for (const auto& row : b.samples) {
        if (row.t_s < from_s || row.t_s >= to_s) continue;
        if (flow >= 0 && row.flow != flow) continue;
        sum += row.rtt_ms;
        ++n;
    }
    return n > 0 ? sum / static_cast<double>(n) : 0.0;
}

double mean_thr_mbps_over(const MetricsBundle& b, double from_s, double to_s, int flow) {
    int lo = std::max(0, static_cast<int>(from_s));
    int hi = std::min(static_cast<int>(b.thr_bins_mbps[flow].size()), static_cast<int>(to_s));
    if (hi <= lo) return 0.0;
    double sum = 0;
    for (int i = lo; i < hi; ++i) sum += b.thr_bins_mbps[flow][i];
    return sum / static_cast<double>(hi - lo);
}

FairnessReport fairness_over(const MetricsBundle& b, double from_s, double to_s) {
    FairnessReport r;
    std::vector<double> means;
    double cap = 0;
    int lo = std::max(0, static_cast<int>(from_s));
    int hi = std::min(static_cast<int>(b.capacity_per_sec_mbps.size()), static_cast<int>(to_s));
    for (int i = lo; i < hi; ++i) cap += b.capacity_per_sec_mbps[i];
    cap = hi > lo ? cap / (hi - lo) : 0;
    for (int f = 0; f < b.n_flows; ++f) {
        double m = mean_thr_mbps_over(b, from_s, to_s, f);
        means.push_back(m);
        r.shares_pct.push_back(cap > 0 ? m / cap * 100.0 : 0.0);
    }
    r.jain = jain_index(means);
    return r;
}

nlohmann::json SummaryReport::to_json() const {
    nlohmann::json flows_json = nlohmann::json::array();
    for (const auto& f : flows) {
        flows_json.push_back({{"mean_rtt_ms", f.mean_rtt_ms},
                              {"std_rtt_ms", f.std_rtt_ms},
                              {"mean_thr_mbps", f.mean_thr_mbps},
                              {"std_thr_mbps", f.std_thr_mbps},
                              {"share_pct", f.share_pct},
                              {"retransmits", f.retransmits}});
    }
    return nlohmann::json{{"mean_rtt_ms", mean_rtt_ms},
                          {"std_rtt_ms", std_rtt_ms},
                          {"total_thr_mbps", total_thr_mbps},
                          {"total_thr_std_mbps", total_thr_std_mbps},
                          {"flows", flows_json},
                          {"queue_histogram", queue_histogram},
                          {"queue_hist_bin_width", queue_hist_bin_width},
                          {"fairness",
                           {{"shares_pct", fairness.shares_pct},
                            {"jain", fairness.jain},
                            {"share_series", fairness.share_series}}}};
}

nlohmann::json snapshot_to_json(const NetSnapshot& s) {
    return nlohmann::json{{"last_cwnd", s.last_cwnd},
                          {"current_cwnd", s.current_cwnd},
                          {"ssthreshold", s.ssthresh},
                          {"last_rtt", s.last_rtt_s},
                          {"current_rtt", s.current_rtt_s},
                          {"last_throughput", s.last_throughput_mbps},
                          {"current_throughput", s.current_throughput_mbps},
                          {"current_retransmit_packet", s.current_retransmit_packets},
                          {"history_cwnd", s.history_cwnd},
                          {"history_rtt", s.history_rtt_s},
                          {"history_throughput", s.history_throughput_mbps},
                          {"history_retransmit_packet", s.history_retransmit}};
}

NetSnapshot snapshot_from_json(const nlohmann::json& j) {
    NetSnapshot s;
    s.last_cwnd = j.at("last_cwnd").get<int64_t>();
    s.current_cwnd = j.at("current_cwnd").get<int64_t>();
    s.ssthresh = j.at("ssthreshold").get<int64_t>();
    s.last_rtt_s = j.at("last_rtt").get<double>();
    s.current_rtt_s = j.at("current_rtt").get<double>();
    s.last_throughput_mbps = j.at("last_throughput").get<double>();
    s.current_throughput_mbps = j.at("current_throughput").get<double>();
    s.current_retransmit_packets = j.at("current_retransmit_packet").get<int64_t>();
    s.history_cwnd = j.at("history_cwnd").get<std::vector<int64_t>>();
    s.history_rtt_s = j.at("history_rtt").get<std::vector<double>>();
    s.history_throughput_mbps = j.at("history_throughput").get<std::vector<double>>();
    s.history_retransmit = j.at("history_retransmit_packet").get<std::vector<int64_t>>();
    return s;
}

nlohmann::json decision_to_json(const DecisionRecord& d) {
    nlohmann::json j{{"t", d.t_s},
                     {"flow_id", d.flow_id},
                     {"scheme", to_string(d.scheme)},
                     {"snapshot", snapshot_to_json(d.snapshot)},
                     {"raw_text", d.raw_text},
                     {"applied_cwnd", d.applied_cwnd},
                     {"clamped", d.clamped}};
    if (d.error) j["error"] = *d.error;
    return j;
}

DecisionRecord decision_from_json(const nlohmann::json& j) {
    DecisionRecord d;
    d.t_s = j.at("t").get<double>();
    d.flow_id = j.at("flow_id").get<int>();
    d.scheme = prompt_scheme_from_string(j.at("scheme").get<std::string>());
    d.snapshot = snapshot_from_json(j.at("snapshot"));
    d.raw_text = j.at("raw_text").get<std::string>();
    d.applied_cwnd = j.at("applied_cwnd").get<int64_t>();
    d.clamped = j.at("clamped").get<bool>();
    if (j.contains("error")) d.error = j.at("error").get<std::string>();
    return d;
}

namespace {

nlohmann::json totals_to_json(const FlowTotals& t) {
    return nlohmann::json{{"bytes_sent", t.bytes_sent},
                          {"bytes_delivered", t.bytes_delivered},
                          {"packets_sent", t.packets_sent},
                          {"packets_received", t.packets_received},
                          {"packets_dropped", t.packets_dropped},
                          {"retransmits", t.retransmits},
                          {"acks_received", t.acks_received}};
}

FlowTotals totals_from_json(const nlohmann::json& j) {
    FlowTotals t;
    t.bytes_sent = j.at("bytes_sent").get<int64_t>();
    t.bytes_delivered = j.at("bytes_delivered").get<int64_t>();
    t.packets_sent = j.at("packets_sent").get<int64_t>();
    t.packets_received = j.at("packets_received").get<int64_t>();
    t.packets_dropped = j.at("packets_dropped").get<int64_t>();
    t.retransmits = j.at("retransmits").get<int64_t>();
    t.acks_received = j.at("acks_received").get<int64_t>();
    return t;
}

}  // namespace

void store_bundle(const MetricsBundle& b, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    char buf[128];

    {
        std::ofstream out(fs::path(dir) / "metrics.csv");
        if (!out) throw IoError("store_bundle: cannot write metrics.csv");
        out << "t,flow,rtt_ms,thr_mbps\n";
        for (const auto& row : b.samples) {
            std::snprintf(buf, sizeof(buf), "%.6f,%d,%.3f,%.6f\n", row.t_s, row.flow, row.rtt_ms,
                          row.thr_mbps);
            out << buf;
        }
    }
    {
        std::ofstream out(fs::path(dir) / "queue.csv");
        if (!out) throw IoError("store_bundle: cannot write queue.csv");
        out << "t,qlen\n";
        for (const auto& q : b.queue) {
            std::snprintf(buf, sizeof(buf), "%.6f,%d\n", q.t_s, q.qlen);
            out << buf;
        }
    }
    {
        std::ofstream out(fs::path(dir) / "decisions.jsonl");
        if (!out) throw IoError("store_bundle: cannot write decisions.jsonl");
        for (const auto& d : b.decisions) out << decision_to_json(d).dump() << '\n';
    }
    {
        nlohmann::json totals = nlohmann::json::array();
        for (const auto& t : b.totals) totals.push_back(totals_to_json(t));
        nlohmann::json j{{"config", b.config_echo},
                         {"duration_s", b.duration_s},
                         {"n_flows", b.n_flows},
                         {"thr_bins_mbps", b.thr_bins_mbps},
                         {"totals", totals},
                         {"acks_first_10s", b.acks_first_10s},
                         {"capacity_integral_bits", b.capacity_integral_bits},
                         {"mean_capacity_mbps", b.mean_capacity_mbps},
                         {"capacity_per_sec_mbps", b.capacity_per_sec_mbps},
                         {"bottleneck_queue_capacity", b.bottleneck_queue_capacity}};
        if (b.first_loss_rtt_s) j["first_loss_rtt_s"] = *b.first_loss_rtt_s;
        std::ofstream out(fs::path(dir) / "bundle.json");
        if (!out) throw IoError("store_bundle: cannot write bundle.json");
        out << j.dump(2) << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "summary.json");
        if (!out) throw IoError("store_bundle: cannot write summary.json");
        out << summarize(b).to_json().dump(2) << '\n';
    }
}

MetricsBundle load_bundle(const std::string& dir) {
    namespace fs = std::filesystem;
    MetricsBundle b;

    std::ifstream meta(fs::path(dir) / "bundle.json");
    if (!meta) throw IoError("load_bundle: cannot open bundle.json in " + dir);
    nlohmann::json j = nlohmann::json::parse(meta);
    b.config_echo = j.at("config");
    b.duration_s = j.at("duration_s").get<double>();
    b.n_flows = j.at("n_flows").get<int>();
    b.thr_bins_mbps = j.at("thr_bins_mbps").get<std::vector<std::vector<double>>>();
    for (const auto& t : j.at("totals")) b.totals.push_back(totals_from_json(t));
    b.acks_first_10s = j.at("acks_first_10s").get<int64_t>();
    b.capacity_integral_bits = j.at("capacity_integral_bits").get<double>();
    b.mean_capacity_mbps = j.at("mean_capacity_mbps").get<double>();
    b.capacity_per_sec_mbps = j.at("capacity_per_sec_mbps").get<std::vector<double>>();
    b.bottleneck_queue_capacity = j.at("bottleneck_queue_capacity").get<int>();
    if (j.contains("first_loss_rtt_s")) b.first_loss_rtt_s = j.at("first_loss_rtt_s").get<double>();

    std::ifstream mcsv(fs::path(dir) / "metrics.csv");
    if (!mcsv) throw IoError("load_bundle: cannot open metrics.csv in " + dir);
    std::string line;
    std::getline(mcsv, line);  // header
    while (std::getline(mcsv, line)) {
        MetricsRow row;
        if (std::sscanf(line.c_str(), "%lf,%d,%lf,%lf", &row.t_s, &row.flow, &row.rtt_ms,
                        &row.thr_mbps) == 4) {
            b.samples.push_back(row);
        }
    }

    std::ifstream qcsv(fs::path(dir) / "queue.csv");
    if (!qcsv) throw IoError("load_bundle: cannot open queue.csv in " + dir);
    std::getline(qcsv, line);
    while (std::getline(qcsv, line)) {
        QueueRow q;
        if (std::sscanf(line.c_str(), "%lf,%d", &q.t_s, &q.qlen) == 2) b.queue.push_back(q);
    }

    std::ifstream dj(fs::path(dir) / "decisions.jsonl");
    if (dj) {
        while (std::getline(dj, line)) {
            if (line.empty()) continue;
            b.decisions.push_back(decision_from_json(nlohmann::json::parse(line)));
        }
    }
    return b;
}

}  // namespace ccsim
