#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <unordered_set>
#include <vector>

#include "hrsim/time.hpp"

namespace hrsim {

using EventId = std::uint64_t;

struct RunSummary {
    std::uint64_t events_processed{0};
    SimTime end_time{0};
    bool drained{false}; // queue was empty when the run stopped
};

/// Deterministic discrete-event core. Events fire in (fire_at, id) order;
/// ids are assigned monotonically at scheduling time, so simultaneous events
/// fire FIFO. Single-threaded per run.
class Engine {
  public:
    /// Throws ConfigError if at < now().
    EventId schedule_at(SimTime at, std::function<void()> fn);
    EventId schedule_in(SimTime delay, std::function<void()> fn);

    /// True if the event was still pending and is now cancelled.
    bool cancel(EventId id);

    /// Processes every event with fire_at <= until, then advances the clock
    /// to `until`.
    RunSummary run(SimTime until);

    /// Processes events until the queue empties or the next event would fire
    /// past `hard_limit`. The clock stays at the last processed event.
    RunSummary run_until_idle(SimTime hard_limit);

    SimTime now() const { return now_; }
    std::uint64_t events_processed() const { return processed_; }
    bool queue_empty() const { return pending_.empty(); }

  private:
    struct Item {
        SimTime at;
        EventId id;
        std::function<void()> fn;
    };
    struct Later {
        bool operator()(const Item& a, const Item& b) const {
            if (a.at != b.at) return b.at < a.at;
            return b.id < a.id;
        }
    };

    bool step(); // fire the next non-cancelled event; false if queue empty

    std::priority_queue<Item, std::vector<Item>, Later> queue_;
    std::unordered_set<EventId> pending_;
    std::unordered_set<EventId> cancelled_;
    SimTime now_{0};
    EventId next_id_{1};
    std::uint64_t processed_{0};
};

} // namespace hrsim
