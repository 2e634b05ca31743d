#pragma once

#include <cstdint>
#include <string>

#include "hrsim/time.hpp"

namespace hrsim {

/// 16-bit wrapping sequence source, one per (MLD, direction).
struct SeqCounter {
    std::uint16_t next{0};

    std::uint16_t take() { return next++; }
};

/// Serial-number comparison: a is newer than b iff (a - b) mod 2^16 is in
/// (0, 2^15). Equality is neither newer nor older.
bool seq_newer(std::uint16_t a, std::uint16_t b);

enum class DedupVerdict : std::uint8_t { Pass, Discard };

/// Portable elimination history: what a successor needs to continue
/// duplicate discard seamlessly (counters stay with the measuring node).
struct DedupSnapshot {
    bool seen_any{false};
    std::uint16_t highest{0};
    std::uint64_t bitmap{0};
    SimTime last_arrival{0};
};

/// Sliding-window duplicate eliminator for one replication origin. Tracks the
/// highest sequence seen and a bitmap of the `window` sequences at or below
/// it; anything older than the window is dropped and counted separately from
/// true duplicates.
class DedupState {
  public:
    struct Counters {
        std::uint64_t passed{0};
        std::uint64_t discarded{0};
        std::uint64_t out_of_window{0};
    };

    explicit DedupState(int window = 64, SimTime stale_after = seconds(2));

    /// Decides one arriving copy and updates state. `at` drives staleness.
    DedupVerdict accept(std::uint16_t seq, SimTime at);

    /// Forgets all history if nothing has arrived for stale_after, so a
    /// restarted sender is not mistaken for a stale duplicate burst.
    void reset_if_stale(SimTime now);

    const Counters& counters() const { return counters_; }
    int window() const { return window_; }

    DedupSnapshot snapshot() const {
        return {seen_any_, highest_, bitmap_, last_arrival_};
    }
    void restore(const DedupSnapshot& s) {
        seen_any_ = s.seen_any;
        highest_ = s.highest;
        bitmap_ = s.bitmap;
        last_arrival_ = s.last_arrival;
    }

  private:
    int window_;
    SimTime stale_after_;
    bool seen_any_{false};
    std::uint16_t highest_{0};
    std::uint64_t bitmap_{0}; // bit i = seen (highest_ - i)
    SimTime last_arrival_{0};
    Counters counters_;
};

} // namespace hrsim
