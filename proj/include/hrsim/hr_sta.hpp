#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "hrsim/channel.hpp"
#include "hrsim/core.hpp"
#include "hrsim/dedup.hpp"
#include "hrsim/frames.hpp"

namespace hrsim {

class HrAp;

/// Multi-link station. The upper MAC assigns one sequence number per
/// reliable frame and replicates it over up to `redundancy` associated
/// links; arriving downlink copies are eliminated per duplicator before the
/// application sees them. Best-effort traffic rides the primary link, or the
/// lowest-index associated link while the primary is roaming.
class HrSta {
  public:
    struct Options {
        bool cross_link_abort{false};
        int dedup_window{64};
        SimTime dedup_stale{seconds(2)};
        bool keep_frames{true};
    };

    struct Counters {
        std::uint64_t originated{0};
        std::uint64_t copies_sent{0};
        std::uint64_t no_link_drops{0};
        std::uint64_t frames_lost{0};
        std::uint64_t delivered{0};
        std::uint64_t siblings_aborted{0};
        std::uint64_t transparency_violations{0};
    };

    HrSta(SimCore& core, MultiLinkElement mle, Options opts);

    const std::string& id() const { return mle_.mld_id; }
    const MultiLinkElement& mle() const { return mle_; }

    // link management, driven by the AP side
    void attach_link(std::size_t link_index, HrAp* ap,
                     std::shared_ptr<WirelessLink> link);
    void detach_link(std::size_t link_index);
    bool link_associated(std::size_t link_index) const;
    int associated_count() const;
    HrAp* serving_ap(std::size_t link_index) const;

    /// Injects one application frame. Reliable frames fan out over the
    /// first `redundancy` associated links in link-index order; a frame with
    /// no usable link is an immediate loss.
    void originate(const MacAddress& da, int flow, ReliabilityCategory rc,
                   AccessCategory ac, std::size_t payload_len);

    void on_air_receive(const Frame& f, std::size_t link_index);

    const Counters& counters() const { return counters_; }
    const std::vector<Frame>& received() const { return received_; }
    const std::map<std::string, DedupState>& downlink_dedup() const {
        return dl_dedup_;
    }
    /// Links a reliable frame would use right now.
    std::vector<std::size_t> pick_links(ReliabilityCategory rc) const;

  private:
    struct Attachment {
        HrAp* ap{nullptr};
        std::shared_ptr<WirelessLink> link;
    };
    struct PendingCopy {
        std::size_t link_index{0};
        std::uint64_t tx_id{0};
        std::shared_ptr<WirelessLink> link;
    };

    void on_copy_delivered(std::uint64_t frame_id, std::size_t link_index);
    void on_copy_dropped(const Frame& f, std::size_t link_index);
    void deliver_app(const Frame& f);

    SimCore& core_;
    MultiLinkElement mle_;
    Options opts_;
    std::vector<std::optional<Attachment>> attachments_;
    SeqCounter up_seq_;
    std::map<std::string, DedupState> dl_dedup_; // keyed by duplicator id
    std::map<std::uint64_t, std::vector<PendingCopy>> pending_;
    std::vector<Frame> received_;
    Counters counters_;
};

} // namespace hrsim
