#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrsim/time.hpp"

namespace hrsim {

/// Latency distribution over delivered frames. Percentiles use nearest-rank
/// on the sorted sample: index ceil(q * n) - 1.
struct LatencySummary {
    std::uint64_t count{0};
    double mean_us{0.0};
    double p50_us{0.0};
    double p95_us{0.0};
    double p99_us{0.0};
    double min_us{0.0};
    double max_us{0.0};
};

LatencySummary summarize_latencies(std::vector<SimTime> samples);

struct FlowSummary {
    int flow{-1};
    std::uint64_t offered{0};
    std::uint64_t delivered{0};
    std::uint64_t lost{0};
    std::uint64_t in_flight{0};
    std::uint64_t deadline_missed{0};
    double loss_rate{0.0}; // lost / offered
    LatencySummary latency;
};

struct MetricsSummary {
    std::vector<FlowSummary> flows; // sorted by flow id
    FlowSummary total;              // flow == -1
    std::uint64_t double_deliveries{0};
};

/// End-to-end accounting for application frames. Every offered frame is
/// registered once; each must end Delivered or Lost, anything else is
/// reported as in flight. A second delivery of the same frame is counted and
/// thrown as an invariant violation so elimination bugs cannot pass silently.
class Metrics {
  public:
    void set_flow_deadline(int flow, SimTime deadline);

    void register_frame(std::uint64_t frame_id, int flow, SimTime created_at);
    void record_delivery(std::uint64_t frame_id, SimTime at);
    void record_loss(std::uint64_t frame_id, SimTime at);

    std::uint64_t offered() const { return frames_.size(); }
    std::uint64_t double_deliveries() const { return double_deliveries_; }
    std::optional<SimTime> delivery_time(std::uint64_t frame_id) const;

    MetricsSummary summarize() const;

  private:
    enum class State : std::uint8_t { InFlight, Delivered, Lost };
    struct Entry {
        int flow{-1};
        SimTime created_at{0};
        SimTime ended_at{0};
        State state{State::InFlight};
    };

    std::map<std::uint64_t, Entry> frames_;
    std::map<int, SimTime> deadlines_;
    std::uint64_t double_deliveries_{0};
};

} // namespace hrsim
