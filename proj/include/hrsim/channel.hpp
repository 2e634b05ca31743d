#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hrsim/core.hpp"
#include "hrsim/frames.hpp"

namespace hrsim {

/// Stop-and-wait ARQ over one wireless link. Each attempt fails
/// independently with loss_prob; up to retry_limit retries follow the first
/// attempt. With a attempt_airtime and t ack_timeout, attempt k starts at
/// (k-1)(a+t) after the transmission starts, a success on attempt k delivers
/// at (k-1)(a+t)+a, and exhausting all retry_limit+1 attempts drops the
/// frame at (retry_limit+1)(a+t).
struct WirelessParams {
    double loss_prob{0.15};
    int retry_limit{7};
    SimTime attempt_airtime{micros(300)};
    SimTime ack_timeout{micros(100)};

    /// Throws ConfigError when out of range.
    void check(const std::string& context) const;
    double residual_loss() const; // loss_prob ^ (retry_limit + 1)
};

using DeliverFn = std::function<void(const Frame&)>;
using DropFn = std::function<void(const Frame&, const std::string& reason)>;

/// One STA-link-to-AP attachment. Transmissions in either direction share
/// the link's RNG stream; concurrent transmissions do not contend. The
/// attempt outcomes of a transmission are drawn up front, so aborting a
/// chain never shifts the draws seen by later traffic.
class WirelessLink {
  public:
    struct Counters {
        std::uint64_t transmissions{0};
        std::uint64_t attempts{0};
        std::uint64_t delivered{0};
        std::uint64_t dropped{0};
        std::uint64_t aborted{0};
        SimTime airtime{0};
    };

    WirelessLink(SimCore& core, std::string id, WirelessParams params);

    /// Starts an ARQ chain for f; exactly one of the callbacks fires unless
    /// the chain is aborted or shut down first. Returns a handle for abort().
    std::uint64_t transmit(const Frame& f, DeliverFn on_delivered,
                           DropFn on_dropped);

    /// Cancels an unresolved chain without firing its callbacks. Returns
    /// false when the chain already delivered, dropped, or was aborted.
    bool abort(std::uint64_t tx_id);

    /// Tears the link down: every unresolved chain is cancelled and its drop
    /// callback fires now with reason "link_down".
    void shutdown();

    const std::string& id() const { return id_; }
    const WirelessParams& params() const { return params_; }
    const Counters& counters() const { return counters_; }
    std::size_t in_flight() const { return chains_.size(); }

  private:
    struct Chain {
        Frame frame;
        DropFn on_dropped;
        std::vector<EventId> events;
    };

    void resolve(std::uint64_t tx_id);

    SimCore& core_;
    std::string id_;
    WirelessParams params_;
    std::uint64_t next_tx_id_{1};
    std::map<std::uint64_t, Chain> chains_;
    Counters counters_;
};

} // namespace hrsim
