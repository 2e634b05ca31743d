#include "hrsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hrsim/errors.hpp"

namespace hrsim {

namespace {

double nearest_rank_us(const std::vector<SimTime>& sorted, double q) {
    if (sorted.empty())
        return 0.0;
    auto n = static_cast<double>(sorted.size());
    std::size_t idx = static_cast<std::size_t>(std::ceil(q * n));
    idx = idx == 0 ? 0 : idx - 1;
    idx = std::min(idx, sorted.size() - 1);
    return sorted[idx].as_micros();
}

} // namespace

LatencySummary summarize_latencies(std::vector<SimTime> samples) {
    LatencySummary s;
    s.count = samples.size();
    if (samples.empty())
        return s;
    std::sort(samples.begin(), samples.end());
    double sum = 0.0;
    for (SimTime t : samples)
        sum += t.as_micros();
    s.mean_us = sum / static_cast<double>(samples.size());
    s.min_us = samples.front().as_micros();
    s.max_us = samples.back().as_micros();
    s.p50_us = nearest_rank_us(samples, 0.50);
    s.p95_us = nearest_rank_us(samples, 0.95);
    s.p99_us = nearest_rank_us(samples, 0.99);
    return s;
}

void Metrics::set_flow_deadline(int flow, SimTime deadline) {
    deadlines_[flow] = deadline;
}

void Metrics::register_frame(std::uint64_t frame_id, int flow,
                             SimTime created_at) {
    auto [it, fresh] = frames_.emplace(frame_id, Entry{flow, created_at});
    if (!fresh)
        throw InvariantViolation("frame " + std::to_string(frame_id) +
                                 " registered twice");
    (void)it;
}

void Metrics::record_delivery(std::uint64_t frame_id, SimTime at) {
    auto it = frames_.find(frame_id);
    if (it == frames_.end())
        throw InvariantViolation("delivery of unregistered frame " +
                                 std::to_string(frame_id));
    if (it->second.state == State::Delivered) {
        ++double_deliveries_;
        throw InvariantViolation("frame " + std::to_string(frame_id) +
                                 " delivered twice (elimination failed)");
    }
    it->second.state = State::Delivered;
    it->second.ended_at = at;
}

void Metrics::record_loss(std::uint64_t frame_id, SimTime at) {
    auto it = frames_.find(frame_id);
    if (it == frames_.end())
        throw InvariantViolation("loss of unregistered frame " +
                                 std::to_string(frame_id));
    if (it->second.state != State::InFlight)
        return; // a surviving copy already settled this frame
    it->second.state = State::Lost;
    it->second.ended_at = at;
}

std::optional<SimTime> Metrics::delivery_time(std::uint64_t frame_id) const {
    auto it = frames_.find(frame_id);
    if (it == frames_.end() || it->second.state != State::Delivered)
        return std::nullopt;
    return it->second.ended_at;
}

MetricsSummary Metrics::summarize() const {
    struct Acc {
        FlowSummary s;
        std::vector<SimTime> lat;
    };
    std::map<int, Acc> per_flow;
    Acc total;
    total.s.flow = -1;

    for (const auto& [id, e] : frames_) {
        auto& acc = per_flow[e.flow];
        acc.s.flow = e.flow;
        for (Acc* a : {&acc, &total}) {
            ++a->s.offered;
            switch (e.state) {
            case State::Delivered: {
                ++a->s.delivered;
                SimTime lat = e.ended_at - e.created_at;
                a->s.latency.count = 0; // filled by summarize_latencies
                a->lat.push_back(lat);
                auto d = deadlines_.find(e.flow);
                if (d != deadlines_.end() && lat > d->second)
                    ++a->s.deadline_missed;
                break;
            }
            case State::Lost:
                ++a->s.lost;
                break;
            case State::InFlight:
                ++a->s.in_flight;
                break;
            }
        }
    }

    auto finish = [](Acc& a) {
        a.s.latency = summarize_latencies(std::move(a.lat));
        a.s.loss_rate = a.s.offered == 0 ? 0.0
                                         : static_cast<double>(a.s.lost) /
                                               static_cast<double>(a.s.offered);
    };

    MetricsSummary out;
    for (auto& [flow, acc] : per_flow) {
        finish(acc);
        out.flows.push_back(acc.s);
    }
    finish(total);
    out.total = total.s;
    out.double_deliveries = double_deliveries_;
    return out;
}

} // namespace hrsim
