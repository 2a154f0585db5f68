#include "tierplan/des.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "tierplan/errors.hpp"

namespace tierplan {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

struct Event {
  std::int64_t ts = 0;
  std::uint32_t stage = 0;
  std::uint32_t id = 0;
};

// slot = stage % stages_per_layer; both topologies follow the same
// compute / link / static-delay pattern with period 3.
constexpr PipeKind kind_of_slot(Count slot) {
  switch (slot % 3) {
    case 0:
      return PipeKind::ComputeNode;
    case 1:
      return PipeKind::Link;
    default:
      return PipeKind::StaticDelay;
  }
}

class Engine {
 public:
  Engine(Count n_layers, Count nodes, Count stages_per_layer,
         std::vector<std::int64_t> slot_delays, Count inflight,
         const SimOptions& options)
      : n_layers_(n_layers),
        nodes_(nodes),
        stages_per_layer_(stages_per_layer),
        total_stages_(n_layers * stages_per_layer),
        slot_delays_(std::move(slot_delays)),
        inflight_(inflight),
        options_(options) {
    if (nodes_ == 0) throw ValidationError("simulate: need at least one node");
    if (n_layers_ < nodes_) {
      throw ValidationError("simulate: " + std::to_string(nodes_) +
                            " nodes cannot all host layers of a " +
                            std::to_string(n_layers_) + "-layer model");
    }
    if (inflight_ == 0) throw ValidationError("simulate: IF must be >= 1");
    if (options_.iterations == 0) throw ValidationError("simulate: E must be >= 1");
    if (options_.iterations > options_.iteration_cap) {
      throw ValidationError("simulate: E exceeds the safety cap of " +
                            std::to_string(options_.iteration_cap));
    }

    // Contiguous layer blocks; remainder layers go to the lowest ranks.
    layer_owner_.resize(n_layers_);
    const Count base = n_layers_ / nodes_;
    const Count extra = n_layers_ % nodes_;
    Count layer = 0;
    for (Count node = 0; node < nodes_; ++node) {
      const Count span = base + (node < extra ? 1 : 0);
      for (Count i = 0; i < span; ++i) layer_owner_[layer++] = node;
    }

    const Count n_pipes = nodes_ * stages_per_layer_;
    queues_.resize(n_pipes);
    busy_till_.assign(n_pipes, 0);
    next_event_ts_.assign(n_pipes, kInf);
    busy_total_.assign(n_pipes, 0);
    if (options_.track_utilization) intervals_.resize(n_pipes);
    if (options_.retain_event_log) log_.emplace();
  }

  SimReport run() {
    for (Count i = 0; i < inflight_; ++i) {
      queues_[0].push_back(Event{0, 0, static_cast<std::uint32_t>(i)});
    }
    refresh(0);

    const Count wanted = options_.warmup_passes + options_.iterations;
    gen_all_.reserve(wanted + 1);
    while (gen_all_.size() < wanted) {
      step();
    }
    // Finish every service that starts before the final measured
    // generation, so busy intervals and the event log cover the whole
    // measurement window.
    const std::int64_t horizon = gen_all_[wanted - 1];
    while (true) {
      while (!ready_.empty()) {
        const auto [ts, p] = ready_.top();
        if (next_event_ts_[p] == ts && !queues_[p].empty()) break;
        ready_.pop();
      }
      if (ready_.empty() || ready_.top().first >= horizon) break;
      step();
    }
    return make_report();
  }

 private:
  Count pipe_of_stage(Count stage) const {
    return layer_owner_[stage / stages_per_layer_] * stages_per_layer_ +
           stage % stages_per_layer_;
  }

  // next_event_ts = earliest time the pipe can start its next event.
  // Stale ready_ entries are skipped at pop time.
  void refresh(Count pipe) {
    const auto& q = queues_[pipe];
    std::int64_t value = kInf;
    if (!q.empty()) {
      std::int64_t min_ts = kInf;
      for (const Event& e : q) min_ts = std::min(min_ts, e.ts);
      const bool occupying = kind_of_slot(pipe % stages_per_layer_) != PipeKind::StaticDelay;
      value = occupying ? std::max(busy_till_[pipe], min_ts) : min_ts;
    }
    next_event_ts_[pipe] = value;
    if (value != kInf) ready_.push({value, pipe});
  }

  // True when `a` should be served before `b`.
  bool precedes(const Event& a, const Event& b) const {
    if (a.stage != b.stage) {
      return options_.pop_order == PopOrder::LatestStageFirst ? a.stage > b.stage
                                                              : a.stage < b.stage;
    }
    if (a.ts != b.ts) return a.ts < b.ts;
    return a.id < b.id;
  }

  void step() {
    // Earliest startable pipe; ties by pipe index. Entries are lazily
    // invalidated when next_event_ts moved.
    Count pipe = 0;
    while (true) {
      if (ready_.empty()) throw Error("simulate: no runnable pipe (internal)");
      const auto [ts, p] = ready_.top();
      ready_.pop();
      if (next_event_ts_[p] == ts && !queues_[p].empty()) {
        pipe = p;
        break;
      }
    }

    auto& q = queues_[pipe];
    const std::int64_t limit = next_event_ts_[pipe];
    std::size_t pick = q.size();
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i].ts > limit) continue;
      if (pick == q.size() || precedes(q[i], q[pick])) pick = i;
    }
    if (pick == q.size()) throw Error("simulate: no eligible event (internal)");
    const Event event = q[pick];
    q[pick] = q.back();
    q.pop_back();

    const Count slot = event.stage % stages_per_layer_;
    const std::int64_t delay = slot_delays_[slot];
    const bool occupying = kind_of_slot(slot) != PipeKind::StaticDelay;
    std::int64_t start = event.ts;
    if (occupying) {
      start = std::max(busy_till_[pipe], event.ts);
      busy_till_[pipe] = start + delay;
      busy_total_[pipe] += delay;
      if (options_.track_utilization) intervals_[pipe].push_back({start, start + delay});
    }
    const std::int64_t finish = start + delay;
    end_ts_ = std::max(end_ts_, finish);

    if (log_) {
      log_->push_back(EventRecord{log_->size(), pipe, event.id, event.stage,
                                  Duration{event.ts}, Duration{start}, Duration{finish}});
    }

    const auto next_stage = static_cast<std::uint32_t>((event.stage + 1) % total_stages_);
    const Count next_pipe = pipe_of_stage(next_stage);
    queues_[next_pipe].push_back(Event{finish, next_stage, event.id});
    refresh(next_pipe);
    refresh(pipe);

    if (next_stage == 0 && event.id == 0) {
      gen_all_.push_back(finish);
    }
  }

  SimReport make_report() const {
    SimReport report;
    report.gen_ts.reserve(options_.iterations);
    const Count wanted = options_.warmup_passes + options_.iterations;
    for (Count i = options_.warmup_passes; i < wanted && i < gen_all_.size(); ++i) {
      report.gen_ts.push_back(Duration{gen_all_[i]});
    }
    if (report.gen_ts.size() >= 2) {
      const auto span = (report.gen_ts.back() - report.gen_ts.front()).count();
      report.tbt_ns = static_cast<double>(span) /
                      static_cast<double>(report.gen_ts.size() - 1);
    }

    const Count n_pipes = nodes_ * stages_per_layer_;
    report.pipe_busy_fraction.resize(n_pipes, 0);
    report.pipe_kinds.resize(n_pipes);
    for (Count p = 0; p < n_pipes; ++p) {
      report.pipe_kinds[p] = kind_of_slot(p % stages_per_layer_);
      if (end_ts_ > 0) {
        report.pipe_busy_fraction[p] =
            static_cast<double>(busy_total_[p]) / static_cast<double>(end_ts_);
      }
    }

    if (options_.track_utilization && report.gen_ts.size() >= 2) {
      const std::int64_t w0 = report.gen_ts.front().count();
      const std::int64_t w1 = report.gen_ts.back().count();
      auto window_busy = [&](Count pipe) {
        std::int64_t busy = 0;
        for (const auto& [s, f] : intervals_[pipe]) {
          busy += std::max<std::int64_t>(0, std::min(f, w1) - std::max(s, w0));
        }
        return static_cast<double>(busy) / static_cast<double>(w1 - w0);
      };
      for (Count node = 0; node < nodes_; ++node) {
        report.tier1_utilization.push_back(window_busy(node * stages_per_layer_));
        if (stages_per_layer_ == 6) {
          report.tier2_utilization.push_back(window_busy(node * stages_per_layer_ + 3));
        }
      }
    }

    if (log_) report.event_log = *log_;
    return report;
  }

  const Count n_layers_;
  const Count nodes_;
  const Count stages_per_layer_;
  const Count total_stages_;
  const std::vector<std::int64_t> slot_delays_;
  const Count inflight_;
  const SimOptions options_;

  std::vector<Count> layer_owner_;
  std::vector<std::vector<Event>> queues_;
  std::vector<std::int64_t> busy_till_;
  std::vector<std::int64_t> next_event_ts_;
  std::vector<std::int64_t> busy_total_;
  std::vector<std::vector<std::pair<std::int64_t, std::int64_t>>> intervals_;
  std::optional<std::vector<EventRecord>> log_;
  std::vector<std::int64_t> gen_all_;
  std::int64_t end_ts_ = 0;

  using ReadyEntry = std::pair<std::int64_t, Count>;  // (start time, pipe)
  std::priority_queue<ReadyEntry, std::vector<ReadyEntry>, std::greater<>> ready_;
};

}  // namespace

SimReport simulate_two_tier(Count n_layers, Count tier1_nodes, Count tier2_per_tier1,
                            Count shard_batch, Count inflight,
                            const TwoTierStageLatencies& latencies,
                            const SimOptions& options) {
  if (tier2_per_tier1 == 0) {
    throw ValidationError("simulate_two_tier: K' must be >= 1");
  }
  const std::vector<std::int64_t> delays = {
      latencies.tier1_compute.count(), latencies.link_fwd.count(),
      latencies.inter_rtt.count() / 2, latencies.tier2_compute.count(),
      latencies.link_bwd.count(),      latencies.inter_rtt.count() / 2};
  Engine engine(n_layers, tier1_nodes, 6, delays, inflight, options);
  SimReport report = engine.run();
  report.config_echo = ConfigEcho{tier1_nodes, tier2_per_tier1, shard_batch,
                                  shard_batch * tier2_per_tier1, inflight};
  if (report.gen_ts.size() >= 2) {
    report.throughput_tps =
        throughput_from(report.gen_ts, report.config_echo.tier1_batch, inflight);
  }
  return report;
}

SimReport simulate_single_tier(Count n_layers, Count tier1_nodes, Count batch,
                               Count inflight, const SingleTierStageLatencies& latencies,
                               const SimOptions& options) {
  const std::vector<std::int64_t> delays = {latencies.compute.count(),
                                            latencies.link.count(),
                                            latencies.rtt.count() / 2};
  Engine engine(n_layers, tier1_nodes, 3, delays, inflight, options);
  SimReport report = engine.run();
  report.config_echo = ConfigEcho{tier1_nodes, 0, batch, batch, inflight};
  if (report.gen_ts.size() >= 2) {
    report.throughput_tps = throughput_from(report.gen_ts, batch, inflight);
  }
  return report;
}

double throughput_from(const std::vector<Duration>& gen_ts, Count batch_total,
                       Count inflight) {
  if (gen_ts.size() < 2) {
    throw ValidationError("throughput_from: need at least 2 generation timestamps");
  }
  const auto span = (gen_ts.back() - gen_ts.front()).count();
  if (span <= 0) {
    throw ValidationError("throughput_from: generation timestamps must advance");
  }
  const double mean_tbt_sec =
      static_cast<double>(span) / static_cast<double>(gen_ts.size() - 1) / 1e9;
  return static_cast<double>(batch_total) * static_cast<double>(inflight) / mean_tbt_sec;
}

LatencyBreakdown latency_breakdown(const SimReport& report) {
  if (!report.event_log) {
    throw ValidationError("latency_breakdown: event log was not retained");
  }
  if (report.gen_ts.size() < 2) {
    throw ValidationError("latency_breakdown: need at least 2 measured generations");
  }
  const std::int64_t w0 = report.gen_ts.front().count();
  const std::int64_t w1 = report.gen_ts.back().count();

  LatencyBreakdown out;
  out.passes = report.gen_ts.size() - 1;
  for (const EventRecord& rec : *report.event_log) {
    if (rec.batch != 0) continue;
    if (rec.enqueue.count() < w0 || rec.finish.count() > w1) continue;
    out.queue_wait += rec.start - rec.enqueue;
    const Duration service = rec.finish - rec.start;
    switch (report.pipe_kinds[rec.pipe]) {
      case PipeKind::ComputeNode:
        out.compute += service;
        break;
      case PipeKind::Link:
        out.transit += service;
        break;
      case PipeKind::StaticDelay:
        out.static_delay += service;
        break;
    }
  }
  return out;
}

}  // namespace tierplan
