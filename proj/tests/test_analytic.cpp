#include "tierplan/analytic.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "tierplan/errors.hpp"

namespace tierplan {
namespace {

using testing::ethernet_8gbps;
using testing::epyc_like_profile;
using testing::ideal_link;
using testing::llama70b_like;
using testing::t4_like_profile;

constexpr Duration kMs{1'000'000};

TEST(IfPp, TenWayPipelineWorkedExample) {
  // t_n at B=1 over 8 Gbps / 2ms RTT: 1.016384ms.
  EXPECT_EQ(if_pp(10, 80, Duration{5'600'000}, Duration{1'016'384}), 20u);
}

TEST(IfPp, NoNetworkLatencyNeedsExactlyKBatches) {
  EXPECT_EQ(if_pp(10, 80, Duration{5'600'000}, kZero), 10u);
}

TEST(IfPp, SingleNodeCases) {
  EXPECT_EQ(if_pp(1, 4, kMs, kZero), 1u);
  // Any positive transit below N*t_c still forces a second batch.
  EXPECT_EQ(if_pp(1, 4, kMs, Duration{1}), 2u);
  EXPECT_EQ(if_pp(1, 4, kMs, Duration{4'000'000}), 2u);
}

TEST(IfPp, AlwaysMultipleOfKAndAtLeastK) {
  for (Count k : {1u, 3u, 10u}) {
    for (std::int64_t tn : {0, 100, 999999, 5000000}) {
      const Count inflight = if_pp(k, 4 * k, kMs, Duration{tn});
      EXPECT_GE(inflight, k);
      EXPECT_EQ(inflight % k, 0u);
    }
  }
}

TEST(IfPp, MonotoneInTransitAndAntitoneInCompute) {
  EXPECT_LE(if_pp(4, 16, kMs, Duration{500'000}), if_pp(4, 16, kMs, Duration{900'000}));
  EXPECT_GE(if_pp(4, 16, Duration{500'000}, kMs), if_pp(4, 16, Duration{900'000}, kMs));
}

TEST(IfPp, RejectsZeroCompute) {
  EXPECT_THROW(if_pp(2, 4, kZero, kMs), ValidationError);
}

TEST(IfTp, TenWayTensorParallelWorkedExample) {
  // The published count (22) is anchored to the rounded transit time of
  // ~1ms; the exact alpha-beta value 1.016384ms crosses the ceiling.
  EXPECT_EQ(if_tp(10, Duration{480'000}, Duration{1'000'000}), 22u);
  EXPECT_EQ(if_tp(10, Duration{480'000}, Duration{1'016'384}), 23u);
}

TEST(IfTp, NoNetworkLatencyNeedsOneBatch) {
  EXPECT_EQ(if_tp(10, Duration{480'000}, kZero), 1u);
}

TEST(IfTp, ExactBarrierBoundaryNeedsTwoBatches) {
  // t_n == t_c_min / K: one batch in transit while the other computes.
  EXPECT_EQ(if_tp(10, Duration{480'000}, Duration{48'000}), 2u);
}

TEST(IfTp, MonotoneInTransitAndAntitoneInBarrierTime) {
  EXPECT_LE(if_tp(4, kMs, Duration{200'000}), if_tp(4, kMs, Duration{900'000}));
  EXPECT_GE(if_tp(4, Duration{200'000}, kMs), if_tp(4, Duration{900'000}, kMs));
}

TEST(MaxBatchTp, TightAtTheReturnedBatch) {
  SynthProfileParams params;
  params.max_batch = 64;
  params.nonattention = SynthStageParams{Duration{480'000}, kZero};
  const auto profile = synthesize_profile(params);
  const auto spec = llama70b_like();
  const auto link = ethernet_8gbps();
  const auto payload = PayloadModel::for_model(spec);

  const auto result = max_batch_tp(10, 32, profile, link, spec);
  auto inflight_at = [&](Count b) {
    const auto t_n = one_way_transfer_time(link, b * payload.intra_tier1_per_token);
    return if_tp(10, profile.latency(StageKind::NonAttention, b), t_n);
  };
  EXPECT_LE(result.batch, 32 / inflight_at(result.batch));
  EXPECT_GT(result.batch + 1, 32 / inflight_at(result.batch + 1));
}

TEST(IfGh, InstantTierTwoNeedsOneBatch) {
  EXPECT_EQ(if_gh(kZero, kZero, kMs), 1u);
}

TEST(IfGh, ExactDoubleOverheadNeedsThree) {
  EXPECT_EQ(if_gh(Duration{1'500'000}, Duration{500'000}, kMs), 3u);
}

TEST(IfGh, MonotoneInTierTwoLatency) {
  EXPECT_LE(if_gh(kMs, kMs, kMs), if_gh(Duration{2'000'000}, kMs, kMs));
  EXPECT_GE(if_gh(kMs, kMs, Duration{500'000}), if_gh(kMs, kMs, kMs));
}

TEST(MaxBatchPp, SectionThreeTwoWorkedExample) {
  // Constant 5.6ms per layer on the profile; 32 context slots; K=10.
  SynthProfileParams params;
  params.max_batch = 64;
  params.nonattention = SynthStageParams{Duration{5'600'000}, kZero};
  const auto profile = synthesize_profile(params);
  const auto spec = llama70b_like();

  const auto constrained =
      max_batch_pp(10, 80, 32, profile, ethernet_8gbps(), spec);
  EXPECT_EQ(constrained.batch, 1u);
  EXPECT_EQ(constrained.inflight, 20u);

  const auto unconstrained = max_batch_pp(10, 80, 32, profile, ideal_link(), spec);
  EXPECT_EQ(unconstrained.batch, 3u);
  EXPECT_EQ(unconstrained.inflight, 10u);
}

TEST(MaxBatchPp, TightAtTheReturnedBatch) {
  SynthProfileParams params;
  params.max_batch = 64;
  params.nonattention = SynthStageParams{Duration{5'600'000}, kZero};
  const auto profile = synthesize_profile(params);
  const auto spec = llama70b_like();
  const auto link = ethernet_8gbps();
  const auto payload = PayloadModel::for_model(spec);

  const auto result = max_batch_pp(10, 80, 32, profile, link, spec);
  auto inflight_at = [&](Count b) {
    const auto t_n = one_way_transfer_time(link, b * payload.intra_tier1_per_token);
    return if_pp(10, 80, profile.latency(StageKind::NonAttention, b), t_n);
  };
  EXPECT_LE(result.batch, 32 / inflight_at(result.batch));
  EXPECT_GT(result.batch + 1, 32 / inflight_at(result.batch + 1));
}

TEST(MaxBatchPp, CapacityBelowKIsInfeasible) {
  SynthProfileParams params;
  params.max_batch = 8;
  params.nonattention = SynthStageParams{kMs, kZero};
  const auto profile = synthesize_profile(params);
  EXPECT_THROW(max_batch_pp(10, 80, 9, profile, ideal_link(), llama70b_like()),
               FeasibilityError);
}

TEST(MaxBatchTp, AppendixBWorkedExample) {
  // NonAttention entries hold the 0.48ms smallest-barrier latency.
  SynthProfileParams params;
  params.max_batch = 64;
  params.nonattention = SynthStageParams{Duration{480'000}, kZero};
  const auto profile = synthesize_profile(params);
  const auto spec = llama70b_like();

  const auto zero_latency = max_batch_tp(10, 32, profile, ideal_link(), spec);
  EXPECT_EQ(zero_latency.batch, 32u);
  EXPECT_EQ(zero_latency.inflight, 1u);

  const auto ethernet = max_batch_tp(10, 32, profile, ethernet_8gbps(), spec);
  EXPECT_EQ(ethernet.batch, 1u);
}

TEST(MaxBatchTp, EmptyCapacityIsInfeasible) {
  SynthProfileParams params;
  params.max_batch = 8;
  params.nonattention = SynthStageParams{kMs, kZero};
  const auto profile = synthesize_profile(params);
  EXPECT_THROW(max_batch_tp(10, 0, profile, ideal_link(), llama70b_like()),
               FeasibilityError);
}

// Tuned two-tier fixture: T4-like saturating non-attention, EPYC-like
// batch-linear attention, 100 Gbps / 2ms inter-tier, ideal intra-tier
// links (IF_pp = 1), 189 context slots per Tier-2 node.
struct GhFixture {
  TransformerSpec spec = llama70b_like();
  KernelProfile tier1 = t4_like_profile();
  KernelProfile tier2 = epyc_like_profile();
  LinkSpec inter{100e9, Duration{2'000'000}};
  LinkSpec intra = ideal_link();
  Count slots_per_tier2 = 189;
};

TEST(MaxBatchGh, ReproducesTunedTableFourRow) {
  const GhFixture fx;
  const auto result = max_batch_gh(1, 4, 4 * fx.slots_per_tier2, fx.tier1, fx.tier2,
                                   fx.inter, fx.intra, fx.spec);
  EXPECT_EQ(result.tier1_batch, 252u);
  EXPECT_EQ(result.tier2_batch, 63u);
  EXPECT_EQ(result.inflight_gh, 3u);
  EXPECT_EQ(result.inflight_pp, 1u);
}

TEST(MaxBatchGh, OverheadBandStaysWithinOneAcrossTierTwoCounts) {
  const GhFixture fx;
  Count lo = 1000, hi = 0;
  Count prev_tier1_batch = 0;
  for (Count k2 : {1u, 2u, 4u, 8u, 16u}) {
    const auto result = max_batch_gh(1, k2, k2 * fx.slots_per_tier2, fx.tier1, fx.tier2,
                                     fx.inter, fx.intra, fx.spec);
    lo = std::min(lo, result.inflight_gh);
    hi = std::max(hi, result.inflight_gh);
    EXPECT_GT(result.tier1_batch, prev_tier1_batch);
    prev_tier1_batch = result.tier1_batch;
  }
  EXPECT_LE(hi - lo, 1u);
}

TEST(MaxBatchGh, BalancedShardsDifferByAtMostOne) {
  const GhFixture fx;
  const auto result = max_batch_gh(1, 2, 377, fx.tier1, fx.tier2, fx.inter, fx.intra,
                                   fx.spec);
  EXPECT_EQ(result.tier1_batch % 2, 1u);  // odd total
  EXPECT_EQ(result.tier2_batch, ceil_div(result.tier1_batch, 2));
  EXPECT_LE(2 * result.tier2_batch - result.tier1_batch, 1u);
}

TEST(MaxBatchGh, ConstraintReducesToCapacityWhenFactorsKnown) {
  // Ideal links and near-instant attention pin IF_gh to 2 (any positive
  // Tier-2 latency costs one extra batch) and IF_pp to 1, so the search
  // must return floor(slots / 2).
  const auto spec = llama70b_like();
  SynthProfileParams t2;
  t2.max_batch = 4096;
  t2.attention = SynthStageParams{kZero, Duration{1}};
  const auto result = max_batch_gh(1, 4, 757, t4_like_profile(), synthesize_profile(t2),
                                   ideal_link(), ideal_link(), spec);
  EXPECT_EQ(result.inflight_gh, 2u);
  EXPECT_EQ(result.inflight_pp, 1u);
  EXPECT_EQ(result.tier1_batch, 757u / 2u);
}

TEST(MaxBatchGh, TightAtTheReturnedBatch) {
  const GhFixture fx;
  const Count slots = 4 * fx.slots_per_tier2;
  const auto result =
      max_batch_gh(1, 4, slots, fx.tier1, fx.tier2, fx.inter, fx.intra, fx.spec);
  const auto payload = PayloadModel::for_model(fx.spec);
  auto factors_at = [&](Count bt) {
    const auto t_noatt = fx.tier1.latency(StageKind::NonAttention, bt);
    const auto t_att = fx.tier2.latency(StageKind::Attention, ceil_div(bt, 4));
    const auto t_rt = round_trip_transfer_time(
        fx.inter, bt * payload.tier1_to_tier2_per_token,
        bt * payload.tier2_to_tier1_per_token);
    return if_gh(t_att, t_rt, t_noatt) * if_pp(1, fx.spec.n_layers, t_noatt, kZero);
  };
  EXPECT_LE(result.tier1_batch, slots / factors_at(result.tier1_batch));
  EXPECT_GT(result.tier1_batch + 1, slots / factors_at(result.tier1_batch + 1));
}

TEST(CostTable, LoadsTableSixPrices) {
  std::istringstream in(
      "device,unit_price_usd\n"
      "NVIDIA T4,1780\n"
      "NVIDIA H100,30979\n"
      "AMD EPYC 7H12,2078\n");
  const auto table = parse_cost_table(in, "test");
  EXPECT_DOUBLE_EQ(table.price_for("NVIDIA T4"), 1780.0);
  EXPECT_DOUBLE_EQ(table.price_for("NVIDIA H100"), 30979.0);
  EXPECT_THROW(table.price_for("B200"), ValidationError);
}

TEST(CostPerThroughput, SingleNodeExample) {
  CostTable table;
  table.unit_price_usd["node"] = 100.0;
  EXPECT_DOUBLE_EQ(cost_per_throughput({{"node", 1}}, table, 10.0), 10.0);
}

TEST(CostPerThroughput, LinearInNodeCounts) {
  CostTable table;
  table.unit_price_usd["gpu"] = 1780.0;
  table.unit_price_usd["cpu"] = 800.0;
  const std::vector<std::pair<std::string, Count>> nodes = {{"gpu", 4}, {"cpu", 12}};
  const std::vector<std::pair<std::string, Count>> doubled = {{"gpu", 8}, {"cpu", 24}};
  EXPECT_DOUBLE_EQ(cost_per_throughput(doubled, table, 100.0),
                   2.0 * cost_per_throughput(nodes, table, 100.0));
}

TEST(CostPerThroughput, RejectsZeroThroughputAndUnknownDevice) {
  CostTable table;
  table.unit_price_usd["gpu"] = 1.0;
  EXPECT_THROW(cost_per_throughput({{"gpu", 1}}, table, 0.0), ValidationError);
  EXPECT_THROW(cost_per_throughput({{"tpu", 1}}, table, 1.0), ValidationError);
}

}  // namespace
}  // namespace tierplan
