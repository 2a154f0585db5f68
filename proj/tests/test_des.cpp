#include "tierplan/des.hpp"

#include <map>
#include <random>

#include <gtest/gtest.h>

#include "support/schedule_oracle.hpp"
#include "tierplan/errors.hpp"

namespace tierplan {
namespace {

constexpr Duration kMs{1'000'000};

TEST(SimulateTwoTier, SingleBatchGeneratesAtStageSumMultiples) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{3};
  lat.link_fwd = Duration{5};
  lat.inter_rtt = Duration{14};  // two half-RTT delays of 7
  lat.tier2_compute = Duration{11};
  lat.link_bwd = Duration{13};
  const std::int64_t pass = 3 + 5 + 7 + 11 + 13 + 7;

  SimOptions options;
  options.iterations = 8;
  const auto report = simulate_two_tier(1, 1, 1, 1, 1, lat, options);
  ASSERT_EQ(report.gen_ts.size(), 8u);
  for (std::size_t i = 0; i < report.gen_ts.size(); ++i) {
    EXPECT_EQ(report.gen_ts[i].count(),
              pass * static_cast<std::int64_t>(i + options.warmup_passes + 1));
  }
  EXPECT_DOUBLE_EQ(report.tbt_ns, static_cast<double>(pass));
}

TEST(SimulateTwoTier, TwoLayerTwoBatchHandSchedule) {
  // N=2, K=1, IF=2, no network, equal compute `a` on both tiers. Hand
  // enumeration: batch 0 returns to stage 0 every 4a after the pipe fills.
  const std::int64_t a = 1000;
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{a};
  lat.tier2_compute = Duration{a};

  SimOptions options;
  options.iterations = 4;
  const auto report = simulate_two_tier(2, 1, 1, 1, 2, lat, options);
  ASSERT_EQ(report.gen_ts.size(), 4u);
  EXPECT_EQ(report.gen_ts[0].count(), 12 * a);
  EXPECT_EQ(report.gen_ts[1].count(), 16 * a);
  EXPECT_EQ(report.gen_ts[2].count(), 20 * a);
  EXPECT_EQ(report.gen_ts[3].count(), 24 * a);
  EXPECT_DOUBLE_EQ(report.tbt_ns, 4.0 * static_cast<double>(a));
}

TEST(SimulateTwoTier, FullUtilizationAtAnalyticInflightMinimum) {
  // (t_att + t_n) / t_noatt = 1.5, so IF_gh = 3 saturates Tier-1; one
  // batch less leaves a visible bubble.
  TwoTierStageLatencies lat;
  lat.tier1_compute = kMs;
  lat.tier2_compute = kMs;
  lat.inter_rtt = Duration{500'000};

  SimOptions options;
  options.iterations = 8;
  options.track_utilization = true;

  const auto saturated = simulate_two_tier(4, 1, 1, 1, 3, lat, options);
  ASSERT_EQ(saturated.tier1_utilization.size(), 1u);
  EXPECT_GE(saturated.tier1_utilization[0], 0.999999);

  const auto starved = simulate_two_tier(4, 1, 1, 1, 2, lat, options);
  EXPECT_LT(starved.tier1_utilization[0], 0.99);
  EXPECT_NEAR(starved.tier1_utilization[0], 0.8, 1e-9);
}

TEST(SimulateSingleTier, TextbookPipelineSchedule) {
  SingleTierStageLatencies lat;
  lat.compute = kMs;
  SimOptions options;
  options.iterations = 6;
  const auto report = simulate_single_tier(4, 4, 2, 4, lat, options);
  EXPECT_DOUBLE_EQ(report.tbt_ns, 4.0 * 1e6);
  // throughput = B * K / (N * t)
  EXPECT_DOUBLE_EQ(report.throughput_tps, 2.0 * 4.0 / (4.0 * 1e-3));
}

TEST(SimulateSingleTier, SectionThreeTwoScenarioSaturatesAllPipes) {
  // K=10, N=80, 5.6ms per layer, 2ms RTT / 8 Gbps / 16 KiB per batch:
  // IF_pp = 20 keeps every Tier-1 pipe busy.
  SingleTierStageLatencies lat;
  lat.compute = Duration{5'600'000};
  lat.link = Duration{16'384};
  lat.rtt = Duration{2'000'000};
  SimOptions options;
  options.iterations = 6;
  options.track_utilization = true;
  const auto report = simulate_single_tier(80, 10, 1, 20, lat, options);
  ASSERT_EQ(report.tier1_utilization.size(), 10u);
  for (double u : report.tier1_utilization) EXPECT_GE(u, 0.99);
}

TEST(ThroughputFrom, TwelveTokensPerSecond) {
  const std::vector<Duration> gen = {Duration{1'000'000'000}, Duration{2'000'000'000},
                                     Duration{3'000'000'000}};
  EXPECT_DOUBLE_EQ(throughput_from(gen, 4, 3), 12.0);
}

TEST(ThroughputFrom, ConstantDeltaEqualsSingleDelta) {
  const std::vector<Duration> gen = {Duration{500}, Duration{1000}, Duration{1500},
                                     Duration{2000}};
  EXPECT_DOUBLE_EQ(throughput_from(gen, 1, 1), 1e9 / 500.0);
}

TEST(ThroughputFrom, InsufficientSamplesIsAnError) {
  EXPECT_THROW(throughput_from({Duration{1}}, 1, 1), ValidationError);
}

TEST(LatencyBreakdown, NoQueueingWithSingleBatch) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{100};
  lat.link_fwd = Duration{10};
  lat.inter_rtt = Duration{20};
  lat.tier2_compute = Duration{50};
  lat.link_bwd = Duration{10};
  SimOptions options;
  options.iterations = 5;
  options.retain_event_log = true;
  const auto report = simulate_two_tier(2, 1, 1, 1, 1, lat, options);
  const auto breakdown = latency_breakdown(report);
  EXPECT_EQ(breakdown.queue_wait, kZero);
  const auto window = report.gen_ts.back() - report.gen_ts.front();
  EXPECT_EQ(breakdown.compute + breakdown.transit + breakdown.static_delay +
                breakdown.queue_wait,
            window);
}

TEST(LatencyBreakdown, StaticDelaysOnlyShowAsRttTerms) {
  TwoTierStageLatencies lat;
  lat.inter_rtt = Duration{10'000'000};
  SimOptions options;
  options.iterations = 5;
  options.retain_event_log = true;
  const auto report = simulate_two_tier(1, 1, 1, 1, 1, lat, options);
  const auto breakdown = latency_breakdown(report);
  EXPECT_EQ(breakdown.transit, kZero);
  EXPECT_EQ(breakdown.compute, kZero);
  EXPECT_EQ(breakdown.queue_wait, kZero);
  EXPECT_EQ(breakdown.static_delay.count(), 4 * 10'000'000);  // 4 measured passes
}

TEST(LatencyBreakdown, QueueShareGrowsWithOversizedInflight) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = kMs;
  lat.tier2_compute = kMs;
  lat.inter_rtt = kMs;
  SimOptions options;
  options.iterations = 8;
  options.retain_event_log = true;

  const auto at_minimum = simulate_two_tier(4, 1, 1, 1, 3, lat, options);
  const auto oversized = simulate_two_tier(4, 1, 1, 1, 6, lat, options);
  const auto q_min = latency_breakdown(at_minimum).queue_wait;
  const auto q_big = latency_breakdown(oversized).queue_wait;
  EXPECT_GT(q_big, kZero);
  EXPECT_GT(q_big, q_min);
}

TEST(LatencyBreakdown, RequiresRetainedLog) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = kMs;
  const auto report = simulate_two_tier(1, 1, 1, 1, 1, lat, {});
  EXPECT_THROW(latency_breakdown(report), ValidationError);
}

TEST(Simulate, DeterministicAcrossRuns) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{313};
  lat.link_fwd = Duration{101};
  lat.inter_rtt = Duration{999};
  lat.tier2_compute = Duration{727};
  lat.link_bwd = Duration{55};
  SimOptions options;
  options.iterations = 16;
  const auto a = simulate_two_tier(3, 2, 2, 5, 4, lat, options);
  const auto b = simulate_two_tier(3, 2, 2, 5, 4, lat, options);
  ASSERT_EQ(a.gen_ts.size(), b.gen_ts.size());
  for (std::size_t i = 0; i < a.gen_ts.size(); ++i) EXPECT_EQ(a.gen_ts[i], b.gen_ts[i]);
}

TEST(Simulate, ConservationAndBusyIntervalMonotonicity) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{400};
  lat.link_fwd = Duration{30};
  lat.inter_rtt = Duration{200};
  lat.tier2_compute = Duration{350};
  lat.link_bwd = Duration{25};
  SimOptions options;
  options.iterations = 10;
  options.retain_event_log = true;
  const auto report = simulate_two_tier(4, 2, 1, 1, 3, lat, options);
  ASSERT_TRUE(report.event_log.has_value());

  // Every batch visits every stage the same number of times (+-1 for the
  // partial pass in flight when the run stops).
  std::map<std::pair<Count, Count>, Count> visits;
  for (const auto& rec : *report.event_log) visits[{rec.batch, rec.stage}] += 1;
  Count lo = ~0ull, hi = 0;
  for (const auto& [key, count] : visits) {
    lo = std::min(lo, count);
    hi = std::max(hi, count);
  }
  EXPECT_EQ(visits.size(), 3u * 24u);  // IF batches x 6N stages, none skipped
  EXPECT_LE(hi - lo, 1u);

  // Occupying pipes never overlap service intervals.
  std::map<Count, Duration> last_finish;
  for (const auto& rec : *report.event_log) {
    if (report.pipe_kinds[rec.pipe] == PipeKind::StaticDelay) continue;
    auto it = last_finish.find(rec.pipe);
    if (it != last_finish.end()) {
      EXPECT_GE(rec.start, it->second);
    }
    last_finish[rec.pipe] = rec.finish;
  }
}

TEST(Simulate, RefusesOversizedIterationCount) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = kMs;
  SimOptions options;
  options.iterations = 1'000'000;
  EXPECT_THROW(simulate_two_tier(1, 1, 1, 1, 1, lat, options), ValidationError);
}

TEST(Simulate, RejectsMoreNodesThanLayers) {
  SingleTierStageLatencies lat;
  lat.compute = kMs;
  EXPECT_THROW(simulate_single_tier(2, 3, 1, 1, lat, {}), ValidationError);
}

TEST(Simulate, PopOrderSwitchKeepsInvariants) {
  TwoTierStageLatencies lat;
  lat.tier1_compute = Duration{400};
  lat.link_fwd = Duration{35};
  lat.inter_rtt = Duration{100};
  lat.tier2_compute = Duration{600};
  lat.link_bwd = Duration{20};
  for (PopOrder order : {PopOrder::LatestStageFirst, PopOrder::EarliestStageFirst}) {
    SimOptions options;
    options.iterations = 8;
    options.pop_order = order;
    const auto report = simulate_two_tier(4, 2, 1, 2, 4, lat, options);
    ASSERT_EQ(report.gen_ts.size(), 8u);
    for (std::size_t i = 1; i < report.gen_ts.size(); ++i) {
      EXPECT_GT(report.gen_ts[i], report.gen_ts[i - 1]);
    }
  }
}

// Randomized small instances against the brute-force schedule enumerator:
// identical generation timestamps, nanosecond for nanosecond.
TEST(OracleEquivalence, RandomizedTwoTierInstances) {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<std::int64_t> delay_us(1, 5000);
  std::uniform_int_distribution<Count> nodes_dist(1, 4);
  std::uniform_int_distribution<Count> extra_layers(0, 3);
  std::uniform_int_distribution<Count> inflight_dist(1, 6);

  for (int trial = 0; trial < 20; ++trial) {
    const Count nodes = nodes_dist(rng);
    const Count layers = nodes + extra_layers(rng);
    const Count inflight = inflight_dist(rng);
    TwoTierStageLatencies lat;
    lat.tier1_compute = Duration{delay_us(rng) * 1000};
    lat.link_fwd = Duration{delay_us(rng) * 1000};
    lat.inter_rtt = Duration{2 * delay_us(rng) * 1000};
    lat.tier2_compute = Duration{delay_us(rng) * 1000};
    lat.link_bwd = Duration{delay_us(rng) * 1000};

    SimOptions options;
    options.iterations = 8;
    const auto report = simulate_two_tier(layers, nodes, 1, 1, inflight, lat, options);

    testing::OracleSetup setup;
    setup.n_layers = layers;
    setup.nodes = nodes;
    setup.stages_per_layer = 6;
    setup.slot_delays = {lat.tier1_compute.count(), lat.link_fwd.count(),
                         lat.inter_rtt.count() / 2, lat.tier2_compute.count(),
                         lat.link_bwd.count(),      lat.inter_rtt.count() / 2};
    setup.inflight = inflight;
    setup.generations = options.warmup_passes + options.iterations;
    const auto oracle = testing::oracle_gen_ts(setup);

    ASSERT_EQ(oracle.size(), options.warmup_passes + report.gen_ts.size()) << "trial " << trial;
    for (std::size_t i = 0; i < report.gen_ts.size(); ++i) {
      ASSERT_EQ(report.gen_ts[i].count(), oracle[i + options.warmup_passes])
          << "trial " << trial << " gen " << i;
    }
  }
}

TEST(OracleEquivalence, RandomizedSingleTierInstances) {
  std::mt19937 rng(987654321);
  std::uniform_int_distribution<std::int64_t> delay_us(1, 5000);
  std::uniform_int_distribution<Count> nodes_dist(1, 4);
  std::uniform_int_distribution<Count> extra_layers(0, 3);
  std::uniform_int_distribution<Count> inflight_dist(1, 6);

  for (int trial = 0; trial < 20; ++trial) {
    const Count nodes = nodes_dist(rng);
    const Count layers = nodes + extra_layers(rng);
    const Count inflight = inflight_dist(rng);
    SingleTierStageLatencies lat;
    lat.compute = Duration{delay_us(rng) * 1000};
    lat.link = Duration{delay_us(rng) * 1000};
    lat.rtt = Duration{2 * delay_us(rng) * 1000};

    SimOptions options;
    options.iterations = 8;
    const auto report = simulate_single_tier(layers, nodes, 1, inflight, lat, options);

    testing::OracleSetup setup;
    setup.n_layers = layers;
    setup.nodes = nodes;
    setup.stages_per_layer = 3;
    setup.slot_delays = {lat.compute.count(), lat.link.count(), lat.rtt.count() / 2};
    setup.inflight = inflight;
    setup.generations = options.warmup_passes + options.iterations;
    const auto oracle = testing::oracle_gen_ts(setup);

    ASSERT_EQ(oracle.size(), options.warmup_passes + report.gen_ts.size()) << "trial " << trial;
    for (std::size_t i = 0; i < report.gen_ts.size(); ++i) {
      ASSERT_EQ(report.gen_ts[i].count(), oracle[i + options.warmup_passes])
          << "trial " << trial << " gen " << i;
    }
  }
}

}  // namespace
}  // namespace tierplan
