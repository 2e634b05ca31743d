#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hrsim/core.hpp"
#include "hrsim/frames.hpp"

namespace hrsim {

/// Anything with Ethernet ports. Cables are point to point with a fixed
/// one-way latency and no loss; delivery order on a cable is FIFO because
/// the engine breaks time ties by schedule order.
class WiredNode {
  public:
    WiredNode(SimCore& core, std::string id) : core_(core), id_(std::move(id)) {}
    virtual ~WiredNode() = default;

    WiredNode(const WiredNode&) = delete;
    WiredNode& operator=(const WiredNode&) = delete;

    const std::string& id() const { return id_; }
    std::size_t port_count() const { return ports_.size(); }

    virtual void on_wired_receive(const Frame& f, std::size_t port) = 0;

    /// Connects a new port on each node with the given one-way latency.
    static void connect(WiredNode& a, WiredNode& b, SimTime latency);

  protected:
    void send_wired(std::size_t port, const Frame& f);
    void send_wired_all_but(std::size_t except_port, const Frame& f);

    SimCore& core_;
    std::string id_;

  private:
    struct Port {
        WiredNode* peer{nullptr};
        std::size_t peer_port{0};
        SimTime latency{0};
    };
    std::vector<Port> ports_;
};

/// Transparent learning bridge. Forwarding state ages out lazily: an entry
/// older than mac_age is treated as unknown and dropped on lookup.
class LearningSwitch : public WiredNode {
  public:
    struct Counters {
        std::uint64_t forwarded{0};
        std::uint64_t flooded{0};
        std::uint64_t filtered{0};
    };

    LearningSwitch(SimCore& core, std::string id, SimTime mac_age = seconds(300))
        : WiredNode(core, std::move(id)), mac_age_(mac_age) {}

    void on_wired_receive(const Frame& f, std::size_t port) override;

    const Counters& counters() const { return counters_; }
    /// Port the address would currently forward to, aging applied.
    std::optional<std::size_t> lookup(const MacAddress& mac);

  private:
    struct TableEntry {
        std::size_t port{0};
        SimTime last_seen{0};
    };
    SimTime mac_age_;
    std::map<MacAddress, TableEntry> table_;
    Counters counters_;
};

/// Single-homed legacy Ethernet endpoint. It understands nothing about
/// replication: it keeps frames addressed to its MAC and ignores the rest.
/// Delivered frames are checked for transparency: no relay tag may remain
/// and the source address must be the originator's stable MAC.
class EthernetHost : public WiredNode {
  public:
    struct Counters {
        std::uint64_t originated{0};
        std::uint64_t delivered{0};
        std::uint64_t ignored{0};
        std::uint64_t transparency_violations{0};
    };

    EthernetHost(SimCore& core, std::string id, MacAddress mac,
                 bool keep_frames = true)
        : WiredNode(core, std::move(id)), mac_(mac), keep_frames_(keep_frames) {}

    const MacAddress& mac() const { return mac_; }

    /// Injects one application frame into the wire and registers it for
    /// end-to-end accounting.
    void originate(const MacAddress& da, int flow, ReliabilityCategory rc,
                   AccessCategory ac, std::size_t payload_len);

    void on_wired_receive(const Frame& f, std::size_t port) override;

    const Counters& counters() const { return counters_; }
    const std::vector<Frame>& received() const { return received_; }

  private:
    MacAddress mac_;
    bool keep_frames_;
    std::vector<Frame> received_;
    Counters counters_;
};

} // namespace hrsim
