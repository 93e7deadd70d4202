#include <doctest.h>

#include "ccsim/metrics.hpp"

using namespace ccsim;

namespace {

MetricsBundle tiny_bundle() {
    MetricsBundle b;
    b.duration_s = 3;
    b.n_flows = 2;
    b.samples = {{0.5, 0, 50.0, 5.0}, {0.6, 1, 60.0, 5.0}, {1.5, 0, 70.0, 5.0}};
    b.queue = {{0.0, 0}, {0.01, 2}, {0.02, 7}};
    b.thr_bins_mbps = {{4.0, 5.0, 6.0}, {4.0, 5.0, 6.0}};
    b.totals.assign(2, {});
    b.capacity_integral_bits = 3 * 10e6;
    b.mean_capacity_mbps = 10.0;
    b.capacity_per_sec_mbps = {10.0, 10.0, 10.0};
    b.bottleneck_queue_capacity = 100;
    return b;
}

}  // namespace

TEST_CASE("jain index basics") {
    CHECK(jain_index({1, 1, 1}) == doctest::Approx(1.0));
    CHECK(jain_index({5, 0, 0}) == doctest::Approx(1.0 / 3.0));
    // Measured three-way split from a near-equal allocation.
    CHECK(jain_index({35.6, 29.6, 33.2}) == doctest::Approx(0.994380).epsilon(1e-5));
    CHECK_THROWS_AS(jain_index({0, 0, 0}), DegenerateInputError);
    CHECK_THROWS_AS(jain_index({}), DegenerateInputError);
    CHECK_THROWS_AS(jain_index({1, -2}), DegenerateInputError);
}

TEST_CASE("summary aggregates rtt, shares and the queue histogram") {
    MetricsBundle b = tiny_bundle();
    SummaryReport r = summarize(b);
    CHECK(r.mean_rtt_ms == doctest::Approx(60.0));
    CHECK(r.flows.size() == 2);
    CHECK(r.flows[0].mean_rtt_ms == doctest::Approx(60.0));
    CHECK(r.flows[1].mean_rtt_ms == doctest::Approx(60.0));
    // mean throughput 5 Mb/s on a 10 Mb/s link: 50% share each.
    CHECK(r.flows[0].share_pct == doctest::Approx(50.0));
    CHECK(r.fairness.jain == doctest::Approx(1.0));
    // queue samples 0, 2, 7 with width-5 bins: two in [0,5), one in [5,10).
    CHECK(r.queue_histogram[0] == 2);
    CHECK(r.queue_histogram[1] == 1);

    // Pure function: summarizing twice yields the same JSON.
    CHECK(summarize(b).to_json() == r.to_json());
}

TEST_CASE("degenerate queue distribution lands in the first bin") {
    MetricsBundle b = tiny_bundle();
    b.queue = {{0.0, 0}, {0.01, 0}, {0.02, 0}};
    SummaryReport r = summarize(b);
    CHECK(r.queue_histogram[0] == 3);
    for (size_t i = 1; i < r.queue_histogram.size(); ++i) CHECK(r.queue_histogram[i] == 0);
}

TEST_CASE("windowed helpers slice by time") {
    MetricsBundle b = tiny_bundle();
    CHECK(mean_rtt_ms_over(b, 0.0, 1.0) == doctest::Approx(55.0));
    CHECK(mean_rtt_ms_over(b, 1.0, 3.0) == doctest::Approx(70.0));
    CHECK(mean_rtt_ms_over(b, 0.0, 3.0, 0) == doctest::Approx(60.0));
    CHECK(mean_thr_mbps_over(b, 1.0, 3.0, 0) == doctest::Approx(5.5));
    auto fr = fairness_over(b, 1.0, 3.0);
    CHECK(fr.jain == doctest::Approx(1.0));
    CHECK(fr.shares_pct[0] == doctest::Approx(55.0));
}

TEST_CASE("decision records survive the jsonl round trip") {
    DecisionRecord d;
    d.t_s = 12.5;
    d.flow_id = 1;
    d.scheme = PromptScheme::GeneralG;
    d.snapshot.current_cwnd = 100000;
    d.snapshot.last_cwnd = 98000;
    d.snapshot.ssthresh = 65535;
    d.snapshot.current_rtt_s = 0.042;
    d.snapshot.last_rtt_s = 0.040;
    d.snapshot.current_throughput_mbps = 9.99;
    d.snapshot.last_throughput_mbps = 9.87;
    d.snapshot.history_cwnd = {100000, 98000};
    d.snapshot.history_rtt_s = {0.042, 0.040};
    d.snapshot.history_throughput_mbps = {9.99, 9.87};
    d.snapshot.history_retransmit = {0, 1};
    d.raw_text = "{\"next_CWND\": 72400, \"next_SSThreshold\": 72400}";
    d.applied_cwnd = 72400;
    d.clamped = false;

    DecisionRecord back = decision_from_json(decision_to_json(d));
    CHECK(back.t_s == d.t_s);
    CHECK(back.flow_id == d.flow_id);
    CHECK(back.raw_text == d.raw_text);
    CHECK(back.snapshot.current_cwnd == d.snapshot.current_cwnd);
    CHECK(back.snapshot.history_rtt_s == d.snapshot.history_rtt_s);
    CHECK_FALSE(back.error.has_value());
}
