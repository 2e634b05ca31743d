#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "hrsim/engine.hpp"
#include "hrsim/metrics.hpp"
#include "hrsim/rng.hpp"
#include "hrsim/trace.hpp"

namespace hrsim {

/// Shared spine of one simulation run: the event engine, the trace log, the
/// frame ledger, and the named RNG streams. Streams are keyed by stable
/// names so randomness is independent of object construction order.
class SimCore {
  public:
    explicit SimCore(std::uint64_t seed) : seed_(seed) {}

    SimCore(const SimCore&) = delete;
    SimCore& operator=(const SimCore&) = delete;

    Engine& engine() { return engine_; }
    Trace& trace() { return trace_; }
    Metrics& metrics() { return metrics_; }
    std::uint64_t seed() const { return seed_; }

    SimTime now() const { return engine_.now(); }
    std::uint64_t next_frame_id() { return next_frame_id_++; }

    /// Returns the stream for `name`, creating it on first use.
    RngStream& rng(const std::string& name);

  private:
    std::uint64_t seed_;
    Engine engine_;
    Trace trace_;
    Metrics metrics_;
    std::uint64_t next_frame_id_{1};
    std::map<std::string, std::unique_ptr<RngStream>> streams_;
};

} // namespace hrsim
