#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hrsim/channel.hpp"
#include "hrsim/dedup.hpp"
#include "hrsim/hr_sta.hpp"
#include "hrsim/wired.hpp"

namespace hrsim {

/// Multi-link AP with one distribution-system port. For every served STA
/// the cluster elects one primary AP: the AP serving the STA's primary
/// link, or the lowest AP id among serving APs while the primary link is
/// roaming. Replication duty (downlink sequencing and duplication, uplink
/// elimination) follows an explicit handoff message, so at most one AP ever
/// holds it; frames that arrive while duty is in flight are dropped and
/// counted rather than risking double delivery.
class HrAp : public WiredNode {
  public:
    struct ApLink {
        std::string link_id;
        int channel{0};
    };
    struct Options {
        int dedup_window{64};
        SimTime dedup_stale{seconds(2)};
    };
    struct Election {
        std::string ap;
        bool fallback{false};
        bool operator==(const Election&) const = default;
    };
    struct Counters {
        std::uint64_t forwarded_wired{0};
        std::uint64_t distributed{0};
        std::uint64_t relayed_up{0};
        std::uint64_t relay_forwarded{0};
        std::uint64_t relayed_down{0};
        std::uint64_t relay_suppressed{0};
        std::uint64_t misdirected_drops{0};
        std::uint64_t no_duty_drops{0};
        std::uint64_t stale_path_drops{0};
        std::uint64_t air_copy_drops{0};
        std::uint64_t pap_fallback_elections{0};
        std::uint64_t cedes_tx{0};
        std::uint64_t cedes_rx{0};
        std::uint64_t control_rx{0};
        std::uint64_t ignored{0};
    };

    HrAp(SimCore& core, std::string id, MacAddress wired_mac,
         std::vector<ApLink> links, Options opts);

    const MacAddress& wired_mac() const { return wired_mac_; }
    const std::vector<ApLink>& ap_links() const { return ap_links_; }

    // Static infrastructure directory, provisioned at build time.
    void provision_ap(const std::string& ap_id, const MacAddress& wired_mac);
    void provision_sta(const std::string& sta_id,
                       std::vector<std::string> link_ids, std::size_t primary,
                       const MacAddress& primary_mac);
    /// Seeds the initial cluster-wide serving map entry (setup only).
    void note_serving(const std::string& sta_id, const std::string& link_id,
                      const std::string& ap_id);

    /// Creates the radio link and attaches the STA. With announce the change
    /// is broadcast to the cluster; setup uses announce=false.
    void associate(HrSta& sta, std::size_t sta_link, std::size_t ap_link,
                   const WirelessParams& params, bool announce = true);
    void disassociate(HrSta& sta, std::size_t sta_link, bool announce = true);
    void grant_duty(const std::string& sta_id);

    void on_air_receive(const Frame& f, HrSta& sta, std::size_t sta_link);
    void on_wired_receive(const Frame& f, std::size_t port) override;

    std::optional<Election> election(const std::string& sta_id) const;
    bool has_duty(const std::string& sta_id) const {
        return duty_.count(sta_id) > 0;
    }
    bool serves(const std::string& sta_id) const {
        return local_.count(sta_id) > 0;
    }
    std::shared_ptr<WirelessLink> link_for(const std::string& sta_id,
                                           std::size_t sta_link) const;
    std::optional<std::size_t> ap_link_of(const std::string& sta_id,
                                          std::size_t sta_link) const;

    const Counters& counters() const { return counters_; }
    const std::map<std::string, DedupState>& uplink_dedup() const {
        return up_dedup_;
    }

  private:
    struct Attach {
        std::size_t ap_link{0};
        std::shared_ptr<WirelessLink> link;
    };
    struct LocalSta {
        HrSta* sta{nullptr};
        std::map<std::size_t, Attach> links;
    };
    struct StaMeta {
        std::vector<std::string> link_ids;
        std::size_t primary{0};
        MacAddress primary_mac;
    };

    void recompute_election(const std::string& sta_id);
    void send_notice(const std::string& sta_id, const std::string& link_id,
                     bool associated);
    void send_cede(const std::string& sta_id, const std::string& to_ap);
    void handle_control(const Frame& f);
    void handle_relay(const Frame& f);
    void eliminate_and_forward(const std::string& sta_id, Frame f);
    void distribute_downlink(const std::string& sta_id, const Frame& f);
    void transmit_to_sta(LocalSta& ls, std::size_t sta_link, const Frame& f);
    DedupState& dedup_for(std::map<std::string, DedupState>& m,
                          const std::string& key);
    void settle_loss(const Frame& f);
    Frame make_control(const MacAddress& da, ControlBody body);

    MacAddress wired_mac_;
    std::vector<ApLink> ap_links_;
    Options opts_;
    std::map<std::string, MacAddress> ap_directory_;
    std::map<std::string, StaMeta> sta_directory_;
    std::map<MacAddress, std::string> sta_by_primary_mac_;
    std::map<std::string, LocalSta> local_;
    // cluster view: sta -> (sta link id -> serving ap id)
    std::map<std::string, std::map<std::string, std::string>> serving_view_;
    std::map<std::string, Election> elected_;
    std::set<std::string> duty_;
    std::map<std::string, SeqCounter> dl_seq_;
    std::map<std::string, DedupState> up_dedup_;
    std::map<std::string, DedupState> relay_filter_;
    Counters counters_;
};

inline constexpr std::uint8_t kMaxRelayHops = 8;

} // namespace hrsim
